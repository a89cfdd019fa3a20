#pragma once

#include <cstddef>

// Per-backend function table for the float32 fast path.
namespace ssvae::kernels {

struct KernelTable {
    void (*gemm_nn)(std::size_t, std::size_t, std::size_t, const float*, const float*, float*, bool);
    void (*gemm_nt)(std::size_t, std::size_t, std::size_t, const float*, const float*, float*, bool);
    void (*gemm_tn)(std::size_t, std::size_t, std::size_t, const float*, const float*, float*, bool);
    void (*add)(std::size_t, const float*, const float*, float*);
    void (*sub)(std::size_t, const float*, const float*, float*);
    void (*mul)(std::size_t, const float*, const float*, float*);
    void (*fill)(std::size_t, float, float*);
    void (*scale)(std::size_t, float, const float*, float*);
    void (*axpy)(std::size_t, float, const float*, float*);
    void (*fma_acc)(std::size_t, const float*, const float*, float*);
    void (*relu)(std::size_t, const float*, float*);
    void (*relu_grad)(std::size_t, const float*, const float*, float*);
    void (*sigmoid)(std::size_t, const float*, float*);
    void (*sigmoid_grad)(std::size_t, const float*, const float*, float*);
    void (*exp)(std::size_t, const float*, float*);
    void (*log)(std::size_t, const float*, float*);
    void (*log_grad)(std::size_t, const float*, const float*, float*);
    void (*softplus)(std::size_t, const float*, float*);
    void (*softplus_grad)(std::size_t, const float*, const float*, float*);
    void (*clamp)(std::size_t, const float*, float, float, float*);
    void (*clamp_grad)(std::size_t, const float*, float, float, const float*, float*);
    double (*sum)(std::size_t, const float*);
    void (*col_sum)(std::size_t, std::size_t, const float*, float*, bool);
    void (*add_rowvec)(std::size_t, std::size_t, const float*, const float*, float*);
    void (*softmax_rows)(std::size_t, std::size_t, const float*, float*);
    void (*softmax_grad)(std::size_t, std::size_t, const float*, const float*, float*);
    double (*bce_sum)(std::size_t, const float*, const float*, float);
    void (*bce_grad)(std::size_t, const float*, const float*, float, float, float*);
    void (*rmsprop_update)(std::size_t, float*, const float*, float*, float, float, float);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();
const KernelTable& avx512_table();

}  // namespace ssvae::kernels
