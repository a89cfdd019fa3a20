#include "ssvae/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernels_table.hpp"

namespace ssvae::kernels {

namespace {

const KernelTable* g_table = nullptr;
Backend g_backend = Backend::scalar;

Backend parse_backend(const std::string& s) {
    if (s == "scalar") return Backend::scalar;
    if (s == "avx2") return Backend::avx2;
    if (s == "avx512") return Backend::avx512;
    if (s == "auto" || s.empty()) return detect_backend();
    throw std::runtime_error("unknown SSVAE_KERNELS value '" + s +
                             "' (expected scalar|avx2|avx512|auto)");
}

void init_once() {
    if (g_table) return;
    const char* env = std::getenv("SSVAE_KERNELS");
    select_backend(env ? parse_backend(env) : detect_backend());
}

}  // namespace

bool backend_supported(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
        case Backend::avx512: return __builtin_cpu_supports("avx512f");
    }
    return false;
}

Backend detect_backend() {
    if (backend_supported(Backend::avx512)) return Backend::avx512;
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    return Backend::scalar;
}

void select_backend(Backend b) {
    if (!backend_supported(b))
        throw std::runtime_error(std::string("kernel backend '") + backend_name(b) +
                                 "' is not supported on this CPU");
    switch (b) {
        case Backend::scalar: g_table = &scalar_table(); break;
        case Backend::avx2: g_table = &avx2_table(); break;
        case Backend::avx512: g_table = &avx512_table(); break;
    }
    g_backend = b;
}

Backend active_backend() {
    init_once();
    return g_backend;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::avx512: return "avx512";
    }
    return "?";
}

#define SSVAE_DISPATCH(fn, ...) \
    init_once();                \
    return g_table->fn(__VA_ARGS__)

void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool acc) {
    SSVAE_DISPATCH(gemm_nn, m, k, n, a, b, c, acc);
}
void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool acc) {
    SSVAE_DISPATCH(gemm_nt, m, k, n, a, b, c, acc);
}
void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool acc) {
    SSVAE_DISPATCH(gemm_tn, m, k, n, a, b, c, acc);
}
void add(std::size_t n, const float* a, const float* b, float* out) { SSVAE_DISPATCH(add, n, a, b, out); }
void sub(std::size_t n, const float* a, const float* b, float* out) { SSVAE_DISPATCH(sub, n, a, b, out); }
void mul(std::size_t n, const float* a, const float* b, float* out) { SSVAE_DISPATCH(mul, n, a, b, out); }
void fill(std::size_t n, float value, float* out) { SSVAE_DISPATCH(fill, n, value, out); }
void scale(std::size_t n, float alpha, const float* x, float* out) { SSVAE_DISPATCH(scale, n, alpha, x, out); }
void axpy(std::size_t n, float alpha, const float* x, float* y) { SSVAE_DISPATCH(axpy, n, alpha, x, y); }
void fma_acc(std::size_t n, const float* a, const float* b, float* out) { SSVAE_DISPATCH(fma_acc, n, a, b, out); }
void relu(std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(relu, n, x, out); }
void relu_grad(std::size_t n, const float* x, const float* dy, float* dx) { SSVAE_DISPATCH(relu_grad, n, x, dy, dx); }
void sigmoid(std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(sigmoid, n, x, out); }
void sigmoid_grad(std::size_t n, const float* y, const float* dy, float* dx) { SSVAE_DISPATCH(sigmoid_grad, n, y, dy, dx); }
void exp(std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(exp, n, x, out); }
void log(std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(log, n, x, out); }
void log_grad(std::size_t n, const float* x, const float* dy, float* dx) { SSVAE_DISPATCH(log_grad, n, x, dy, dx); }
void softplus(std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(softplus, n, x, out); }
void softplus_grad(std::size_t n, const float* x, const float* dy, float* dx) { SSVAE_DISPATCH(softplus_grad, n, x, dy, dx); }
void clamp(std::size_t n, const float* x, float lo, float hi, float* out) { SSVAE_DISPATCH(clamp, n, x, lo, hi, out); }
void clamp_grad(std::size_t n, const float* x, float lo, float hi,
                const float* dy, float* dx) { SSVAE_DISPATCH(clamp_grad, n, x, lo, hi, dy, dx); }
double sum(std::size_t n, const float* x) { SSVAE_DISPATCH(sum, n, x); }
void col_sum(std::size_t m, std::size_t n, const float* a, float* out, bool acc) { SSVAE_DISPATCH(col_sum, m, n, a, out, acc); }
void add_rowvec(std::size_t m, std::size_t n, const float* a, const float* v, float* out) { SSVAE_DISPATCH(add_rowvec, m, n, a, v, out); }
void softmax_rows(std::size_t m, std::size_t n, const float* x, float* out) { SSVAE_DISPATCH(softmax_rows, m, n, x, out); }
void softmax_grad(std::size_t m, std::size_t n, const float* y, const float* dy, float* dx) { SSVAE_DISPATCH(softmax_grad, m, n, y, dy, dx); }
double bce_sum(std::size_t n, const float* x, const float* xr, float eps) { SSVAE_DISPATCH(bce_sum, n, x, xr, eps); }
void bce_grad(std::size_t n, const float* x, const float* xr, float eps,
              float scale_, float* dxr) { SSVAE_DISPATCH(bce_grad, n, x, xr, eps, scale_, dxr); }
void rmsprop_update(std::size_t n, float* p, const float* g, float* acc,
                    float lr, float rho, float eps) { SSVAE_DISPATCH(rmsprop_update, n, p, g, acc, lr, rho, eps); }

#undef SSVAE_DISPATCH

}  // namespace ssvae::kernels
