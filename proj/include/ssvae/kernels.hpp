#pragma once

#include <cstddef>
#include <string>

// Dense float32 inner loops behind a runtime-dispatched backend. Every entry
// point has a scalar reference implementation; the AVX2/AVX-512 variants are
// equivalence-tested against it. double overloads run the scalar path only
// and exist for high-precision gradient checking.
namespace ssvae::kernels {

enum class Backend { scalar, avx2, avx512 };

// Highest backend this CPU supports (also the default unless the
// SSVAE_KERNELS env var says otherwise: scalar|avx2|avx512|auto).
Backend detect_backend();
bool backend_supported(Backend b);
Backend active_backend();
void select_backend(Backend b);  // throws std::runtime_error if unsupported
const char* backend_name(Backend b);

// c[m x n] = a[m x k] * b[k x n], all row-major. accumulate adds into c.
void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate = false);
// c[m x n] = a[m x k] * b^T with b stored [n x k]
void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate = false);
// c[k x n] = a^T * b with a stored [m x k], b stored [m x n]
void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate = false);

void add(std::size_t n, const float* a, const float* b, float* out);
void sub(std::size_t n, const float* a, const float* b, float* out);
void mul(std::size_t n, const float* a, const float* b, float* out);
void fill(std::size_t n, float value, float* out);
void scale(std::size_t n, float alpha, const float* x, float* out);
void axpy(std::size_t n, float alpha, const float* x, float* y);  // y += alpha*x
void fma_acc(std::size_t n, const float* a, const float* b, float* out);  // out += a.*b

void relu(std::size_t n, const float* x, float* out);
void relu_grad(std::size_t n, const float* x, const float* dy, float* dx);  // dx += dy*(x>0)
void sigmoid(std::size_t n, const float* x, float* out);
void sigmoid_grad(std::size_t n, const float* y, const float* dy, float* dx);  // dx += dy*y*(1-y)
void exp(std::size_t n, const float* x, float* out);
void log(std::size_t n, const float* x, float* out);  // caller keeps x > 0
void log_grad(std::size_t n, const float* x, const float* dy, float* dx);  // dx += dy/x
void softplus(std::size_t n, const float* x, float* out);
void softplus_grad(std::size_t n, const float* x, const float* dy, float* dx);  // dx += dy*sigmoid(x)
void clamp(std::size_t n, const float* x, float lo, float hi, float* out);
void clamp_grad(std::size_t n, const float* x, float lo, float hi,
                const float* dy, float* dx);  // pass-through inside [lo,hi]

double sum(std::size_t n, const float* x);  // double accumulation
void col_sum(std::size_t m, std::size_t n, const float* a, float* out,
             bool accumulate = false);  // out[j] = sum_i a[i*n+j]
void add_rowvec(std::size_t m, std::size_t n, const float* a, const float* v, float* out);

void softmax_rows(std::size_t m, std::size_t n, const float* x, float* out);
// dx += y .* (dy - rowdot(dy, y)) for each row of a softmax output y
void softmax_grad(std::size_t m, std::size_t n, const float* y, const float* dy, float* dx);

// sum of -[x*log(xr) + (1-x)*log(1-xr)] with xr clamped to [eps, 1-eps]
double bce_sum(std::size_t n, const float* x, const float* xr, float eps);
// dxr += scale * (xr-x)/(xr*(1-xr)) where xr is strictly inside (eps, 1-eps); 0 at the clamp
void bce_grad(std::size_t n, const float* x, const float* xr, float eps,
              float scale, float* dxr);

// acc = rho*acc + (1-rho)*g^2 ; p -= lr*g/(sqrt(acc)+eps)
void rmsprop_update(std::size_t n, float* p, const float* g, float* acc,
                    float lr, float rho, float eps);

// ---- double-precision reference overloads (scalar path, no dispatch) ----
void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool accumulate = false);
void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool accumulate = false);
void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const double* a, const double* b, double* c, bool accumulate = false);
void add(std::size_t n, const double* a, const double* b, double* out);
void sub(std::size_t n, const double* a, const double* b, double* out);
void mul(std::size_t n, const double* a, const double* b, double* out);
void fill(std::size_t n, double value, double* out);
void scale(std::size_t n, double alpha, const double* x, double* out);
void axpy(std::size_t n, double alpha, const double* x, double* y);
void fma_acc(std::size_t n, const double* a, const double* b, double* out);
void relu(std::size_t n, const double* x, double* out);
void relu_grad(std::size_t n, const double* x, const double* dy, double* dx);
void sigmoid(std::size_t n, const double* x, double* out);
void sigmoid_grad(std::size_t n, const double* y, const double* dy, double* dx);
void exp(std::size_t n, const double* x, double* out);
void log(std::size_t n, const double* x, double* out);
void log_grad(std::size_t n, const double* x, const double* dy, double* dx);
void softplus(std::size_t n, const double* x, double* out);
void softplus_grad(std::size_t n, const double* x, const double* dy, double* dx);
void clamp(std::size_t n, const double* x, double lo, double hi, double* out);
void clamp_grad(std::size_t n, const double* x, double lo, double hi,
                const double* dy, double* dx);
double sum(std::size_t n, const double* x);
void col_sum(std::size_t m, std::size_t n, const double* a, double* out,
             bool accumulate = false);
void add_rowvec(std::size_t m, std::size_t n, const double* a, const double* v, double* out);
void softmax_rows(std::size_t m, std::size_t n, const double* x, double* out);
void softmax_grad(std::size_t m, std::size_t n, const double* y, const double* dy, double* dx);
double bce_sum(std::size_t n, const double* x, const double* xr, double eps);
void bce_grad(std::size_t n, const double* x, const double* xr, double eps,
              double scale, double* dxr);
void rmsprop_update(std::size_t n, double* p, const double* g, double* acc,
                    double lr, double rho, double eps);

}  // namespace ssvae::kernels
