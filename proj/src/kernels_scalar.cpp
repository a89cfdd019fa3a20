#include "ssvae/kernels.hpp"

#include "kernels_ref.hpp"
#include "kernels_table.hpp"

namespace ssvae::kernels {

const KernelTable& scalar_table() {
    static const KernelTable t = {
        &ref::gemm_nn<float>, &ref::gemm_nt<float>, &ref::gemm_tn<float>,
        &ref::add<float>, &ref::sub<float>, &ref::mul<float>,
        &ref::fill<float>, &ref::scale<float>, &ref::axpy<float>, &ref::fma_acc<float>,
        &ref::relu<float>, &ref::relu_grad<float>,
        &ref::sigmoid<float>, &ref::sigmoid_grad<float>,
        &ref::exp<float>, &ref::log<float>, &ref::log_grad<float>,
        &ref::softplus<float>, &ref::softplus_grad<float>,
        &ref::clamp<float>, &ref::clamp_grad<float>,
        &ref::sum<float>, &ref::col_sum<float>, &ref::add_rowvec<float>,
        &ref::softmax_rows<float>, &ref::softmax_grad<float>,
        &ref::bce_sum<float>, &ref::bce_grad<float>,
        &ref::rmsprop_update<float>,
    };
    return t;
}

// double overloads always take the reference path; they back the
// high-precision gradient checker, not the training loop.
void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool acc) { ref::gemm_nn(m, k, n, a, b, c, acc); }
void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool acc) { ref::gemm_nt(m, k, n, a, b, c, acc); }
void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool acc) { ref::gemm_tn(m, k, n, a, b, c, acc); }
void add(std::size_t n, const double* a, const double* b, double* out) { ref::add(n, a, b, out); }
void sub(std::size_t n, const double* a, const double* b, double* out) { ref::sub(n, a, b, out); }
void mul(std::size_t n, const double* a, const double* b, double* out) { ref::mul(n, a, b, out); }
void fill(std::size_t n, double value, double* out) { ref::fill(n, value, out); }
void scale(std::size_t n, double alpha, const double* x, double* out) { ref::scale(n, alpha, x, out); }
void axpy(std::size_t n, double alpha, const double* x, double* y) { ref::axpy(n, alpha, x, y); }
void fma_acc(std::size_t n, const double* a, const double* b, double* out) { ref::fma_acc(n, a, b, out); }
void relu(std::size_t n, const double* x, double* out) { ref::relu(n, x, out); }
void relu_grad(std::size_t n, const double* x, const double* dy, double* dx) { ref::relu_grad(n, x, dy, dx); }
void sigmoid(std::size_t n, const double* x, double* out) { ref::sigmoid(n, x, out); }
void sigmoid_grad(std::size_t n, const double* y, const double* dy, double* dx) { ref::sigmoid_grad(n, y, dy, dx); }
void exp(std::size_t n, const double* x, double* out) { ref::exp(n, x, out); }
void log(std::size_t n, const double* x, double* out) { ref::log(n, x, out); }
void log_grad(std::size_t n, const double* x, const double* dy, double* dx) { ref::log_grad(n, x, dy, dx); }
void softplus(std::size_t n, const double* x, double* out) { ref::softplus(n, x, out); }
void softplus_grad(std::size_t n, const double* x, const double* dy, double* dx) { ref::softplus_grad(n, x, dy, dx); }
void clamp(std::size_t n, const double* x, double lo, double hi, double* out) { ref::clamp(n, x, lo, hi, out); }
void clamp_grad(std::size_t n, const double* x, double lo, double hi,
                const double* dy, double* dx) { ref::clamp_grad(n, x, lo, hi, dy, dx); }
double sum(std::size_t n, const double* x) { return ref::sum(n, x); }
void col_sum(std::size_t m, std::size_t n, const double* a, double* out, bool acc) { ref::col_sum(m, n, a, out, acc); }
void add_rowvec(std::size_t m, std::size_t n, const double* a, const double* v, double* out) { ref::add_rowvec(m, n, a, v, out); }
void softmax_rows(std::size_t m, std::size_t n, const double* x, double* out) { ref::softmax_rows(m, n, x, out); }
void softmax_grad(std::size_t m, std::size_t n, const double* y, const double* dy, double* dx) { ref::softmax_grad(m, n, y, dy, dx); }
double bce_sum(std::size_t n, const double* x, const double* xr, double eps) { return ref::bce_sum(n, x, xr, eps); }
void bce_grad(std::size_t n, const double* x, const double* xr, double eps,
              double scale, double* dxr) { ref::bce_grad(n, x, xr, eps, scale, dxr); }
void rmsprop_update(std::size_t n, double* p, const double* g, double* acc,
                    double lr, double rho, double eps) { ref::rmsprop_update(n, p, g, acc, lr, rho, eps); }

}  // namespace ssvae::kernels
