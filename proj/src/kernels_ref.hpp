#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

// Reference implementations shared by the scalar float backend and the
// double-precision overloads. Plain loops, no reordering tricks: these are
// the ground truth the SIMD variants are tested against.
namespace ssvae::kernels::ref {

template <typename T>
void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const T* a, const T* b, T* c, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        T* crow = c + i * n;
        if (!accumulate) std::fill(crow, crow + n, T(0));
        const T* arow = a + i * k;
        for (std::size_t p = 0; p < k; ++p) {
            const T av = arow[p];
            const T* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const T* a, const T* b, T* c, bool accumulate) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* arow = a + i * k;
        for (std::size_t j = 0; j < n; ++j) {
            const T* brow = b + j * k;
            T acc = 0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            if (accumulate)
                c[i * n + j] += acc;
            else
                c[i * n + j] = acc;
        }
    }
}

template <typename T>
void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const T* a, const T* b, T* c, bool accumulate) {
    if (!accumulate) std::fill(c, c + k * n, T(0));
    for (std::size_t s = 0; s < m; ++s) {
        const T* arow = a + s * k;
        const T* brow = b + s * n;
        for (std::size_t i = 0; i < k; ++i) {
            const T av = arow[i];
            if (av == T(0)) continue;
            T* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

template <typename T>
void add(std::size_t n, const T* a, const T* b, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}

template <typename T>
void sub(std::size_t n, const T* a, const T* b, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}

template <typename T>
void mul(std::size_t n, const T* a, const T* b, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}

template <typename T>
void fill(std::size_t n, T value, T* out) {
    std::fill(out, out + n, value);
}

template <typename T>
void scale(std::size_t n, T alpha, const T* x, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

template <typename T>
void axpy(std::size_t n, T alpha, const T* x, T* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

template <typename T>
void fma_acc(std::size_t n, const T* a, const T* b, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] += a[i] * b[i];
}

template <typename T>
void relu(std::size_t n, const T* x, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = x[i] > T(0) ? x[i] : T(0);
}

template <typename T>
void relu_grad(std::size_t n, const T* x, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] > T(0)) dx[i] += dy[i];
}

template <typename T>
void sigmoid(std::size_t n, const T* x, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = T(1) / (T(1) + std::exp(-x[i]));
}

template <typename T>
void sigmoid_grad(std::size_t n, const T* y, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] * y[i] * (T(1) - y[i]);
}

template <typename T>
void exp(std::size_t n, const T* x, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(x[i]);
}

template <typename T>
void log(std::size_t n, const T* x, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::log(x[i]);
}

template <typename T>
void log_grad(std::size_t n, const T* x, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i) dx[i] += dy[i] / x[i];
}

template <typename T>
void softplus(std::size_t n, const T* x, T* out) {
    // log(1+e^x) = max(x,0) + log1p(e^{-|x|}), stable for large |x|
    for (std::size_t i = 0; i < n; ++i) {
        const T v = x[i];
        out[i] = std::max(v, T(0)) + std::log1p(std::exp(-std::abs(v)));
    }
}

template <typename T>
void softplus_grad(std::size_t n, const T* x, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i)
        dx[i] += dy[i] / (T(1) + std::exp(-x[i]));
}

template <typename T>
void clamp(std::size_t n, const T* x, T lo, T hi, T* out) {
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

template <typename T>
void clamp_grad(std::size_t n, const T* x, T lo, T hi, const T* dy, T* dx) {
    for (std::size_t i = 0; i < n; ++i)
        if (x[i] >= lo && x[i] <= hi) dx[i] += dy[i];
}

template <typename T>
double sum(std::size_t n, const T* x) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += static_cast<double>(x[i]);
    return acc;
}

template <typename T>
void col_sum(std::size_t m, std::size_t n, const T* a, T* out, bool accumulate) {
    if (!accumulate) std::fill(out, out + n, T(0));
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = a + i * n;
        for (std::size_t j = 0; j < n; ++j) out[j] += row[j];
    }
}

template <typename T>
void add_rowvec(std::size_t m, std::size_t n, const T* a, const T* v, T* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = a + i * n;
        T* orow = out + i * n;
        for (std::size_t j = 0; j < n; ++j) orow[j] = row[j] + v[j];
    }
}

template <typename T>
void softmax_rows(std::size_t m, std::size_t n, const T* x, T* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* row = x + i * n;
        T* orow = out + i * n;
        T mx = row[0];
        for (std::size_t j = 1; j < n; ++j) mx = std::max(mx, row[j]);
        T total = 0;
        for (std::size_t j = 0; j < n; ++j) {
            orow[j] = std::exp(row[j] - mx);
            total += orow[j];
        }
        const T inv = T(1) / total;
        for (std::size_t j = 0; j < n; ++j) orow[j] *= inv;
    }
}

template <typename T>
void softmax_grad(std::size_t m, std::size_t n, const T* y, const T* dy, T* dx) {
    for (std::size_t i = 0; i < m; ++i) {
        const T* yrow = y + i * n;
        const T* dyrow = dy + i * n;
        T* dxrow = dx + i * n;
        T dot = 0;
        for (std::size_t j = 0; j < n; ++j) dot += dyrow[j] * yrow[j];
        for (std::size_t j = 0; j < n; ++j) dxrow[j] += yrow[j] * (dyrow[j] - dot);
    }
}

template <typename T>
double bce_sum(std::size_t n, const T* x, const T* xr, T eps) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const T r = std::min(std::max(xr[i], eps), T(1) - eps);
        acc -= static_cast<double>(x[i]) * std::log(static_cast<double>(r)) +
               (1.0 - static_cast<double>(x[i])) * std::log(1.0 - static_cast<double>(r));
    }
    return acc;
}

template <typename T>
void bce_grad(std::size_t n, const T* x, const T* xr, T eps, T scale, T* dxr) {
    for (std::size_t i = 0; i < n; ++i) {
        const T r = xr[i];
        if (r <= eps || r >= T(1) - eps) continue;
        dxr[i] += scale * (r - x[i]) / (r * (T(1) - r));
    }
}

template <typename T>
void rmsprop_update(std::size_t n, T* p, const T* g, T* acc, T lr, T rho, T eps) {
    for (std::size_t i = 0; i < n; ++i) {
        acc[i] = rho * acc[i] + (T(1) - rho) * g[i] * g[i];
        p[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
}

}  // namespace ssvae::kernels::ref
