#include <immintrin.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "kernels_ref.hpp"
#include "kernels_table.hpp"

// AVX2+FMA float32 backend. GEMMs use packed B panels with register-tiled
// microkernels; transcendentals use the classic cephes-style polynomial
// kernels (exp/log accurate to ~1 ulp of float over the clamped range).
namespace ssvae::kernels::avx2 {
namespace {

inline __m256 exp256(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    x = _mm256_min_ps(x, _mm256_set1_ps(88.3762626647949f));
    x = _mm256_max_ps(x, _mm256_set1_ps(-88.3762626647949f));

    __m256 fx = _mm256_fmadd_ps(x, _mm256_set1_ps(1.44269504088896341f),
                                _mm256_set1_ps(0.5f));
    fx = _mm256_floor_ps(fx);

    // Cody-Waite split of ln2
    x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(0.693359375f), x);
    x = _mm256_fnmadd_ps(fx, _mm256_set1_ps(-2.12194440e-4f), x);

    const __m256 z = _mm256_mul_ps(x, x);
    __m256 y = _mm256_set1_ps(1.9875691500e-4f);
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.3981999507e-3f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(8.3334519073e-3f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(4.1665795894e-2f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.6666665459e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(5.0000001201e-1f));
    y = _mm256_fmadd_ps(y, z, x);
    y = _mm256_add_ps(y, one);

    __m256i n = _mm256_cvttps_epi32(fx);
    n = _mm256_add_epi32(n, _mm256_set1_epi32(0x7f));
    n = _mm256_slli_epi32(n, 23);
    return _mm256_mul_ps(y, _mm256_castsi256_ps(n));
}

inline __m256 log256(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 invalid = _mm256_cmp_ps(x, _mm256_setzero_ps(), _CMP_LE_OS);
    x = _mm256_max_ps(x, _mm256_castsi256_ps(_mm256_set1_epi32(0x00800000)));

    __m256i imm = _mm256_srli_epi32(_mm256_castps_si256(x), 23);
    imm = _mm256_sub_epi32(imm, _mm256_set1_epi32(0x7f));
    __m256 e = _mm256_cvtepi32_ps(imm);
    e = _mm256_add_ps(e, one);

    x = _mm256_and_ps(x, _mm256_castsi256_ps(_mm256_set1_epi32(~0x7f800000)));
    x = _mm256_or_ps(x, _mm256_set1_ps(0.5f));

    const __m256 mask = _mm256_cmp_ps(x, _mm256_set1_ps(0.707106781186547524f), _CMP_LT_OS);
    const __m256 tmp = _mm256_and_ps(x, mask);
    x = _mm256_sub_ps(x, one);
    e = _mm256_sub_ps(e, _mm256_and_ps(one, mask));
    x = _mm256_add_ps(x, tmp);

    const __m256 z = _mm256_mul_ps(x, x);
    __m256 y = _mm256_set1_ps(7.0376836292e-2f);
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.1514610310e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.1676998740e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.2420140846e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(1.4249322787e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-1.6668057665e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(2.0000714765e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(-2.4999993993e-1f));
    y = _mm256_fmadd_ps(y, x, _mm256_set1_ps(3.3333331174e-1f));
    y = _mm256_mul_ps(y, x);
    y = _mm256_mul_ps(y, z);
    y = _mm256_fmadd_ps(e, _mm256_set1_ps(-2.12194440e-4f), y);
    y = _mm256_fnmadd_ps(z, _mm256_set1_ps(0.5f), y);
    x = _mm256_add_ps(x, y);
    x = _mm256_fmadd_ps(e, _mm256_set1_ps(0.693359375f), x);
    return _mm256_or_ps(x, invalid);  // NaN for non-positive input
}

inline __m256 sigmoid256(__m256 x) {
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 e = exp256(_mm256_sub_ps(_mm256_setzero_ps(), x));
    return _mm256_div_ps(one, _mm256_add_ps(one, e));
}

inline float hsum(__m256 v) {
    __m128 lo = _mm256_castps256_ps128(v);
    __m128 hi = _mm256_extractf128_ps(v, 1);
    lo = _mm_add_ps(lo, hi);
    lo = _mm_hadd_ps(lo, lo);
    lo = _mm_hadd_ps(lo, lo);
    return _mm_cvtss_f32(lo);
}

// ---- gemm_nn: C[m x n] = A[m x k] * B[k x n] ----
// B is packed into 16-column panels; microkernel is MR x 16 with MR <= 6.

constexpr std::size_t kNR = 16;
constexpr std::size_t kMR = 6;

template <int R>
inline void mk_nn(std::size_t k, const float* a, std::size_t lda,
                  const float* bp, float* c, std::size_t ldc, bool accumulate) {
    __m256 acc0[R], acc1[R];
    for (int r = 0; r < R; ++r) {
        if (accumulate) {
            acc0[r] = _mm256_loadu_ps(c + r * ldc);
            acc1[r] = _mm256_loadu_ps(c + r * ldc + 8);
        } else {
            acc0[r] = _mm256_setzero_ps();
            acc1[r] = _mm256_setzero_ps();
        }
    }
    for (std::size_t p = 0; p < k; ++p) {
        const __m256 b0 = _mm256_loadu_ps(bp + p * kNR);
        const __m256 b1 = _mm256_loadu_ps(bp + p * kNR + 8);
        for (int r = 0; r < R; ++r) {
            const __m256 av = _mm256_broadcast_ss(a + r * lda + p);
            acc0[r] = _mm256_fmadd_ps(av, b0, acc0[r]);
            acc1[r] = _mm256_fmadd_ps(av, b1, acc1[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm256_storeu_ps(c + r * ldc, acc0[r]);
        _mm256_storeu_ps(c + r * ldc + 8, acc1[r]);
    }
}

void gemm_nn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate) {
    const std::size_t n_main = n - n % kNR;
    if (n_main > 0) {
        thread_local std::vector<float> pack;
        pack.resize(k * kNR);
        for (std::size_t j = 0; j < n_main; j += kNR) {
            float* bp = pack.data();
            for (std::size_t p = 0; p < k; ++p)
                std::copy(b + p * n + j, b + p * n + j + kNR, bp + p * kNR);
            std::size_t i = 0;
            for (; i + kMR <= m; i += kMR)
                mk_nn<kMR>(k, a + i * k, k, bp, c + i * n + j, n, accumulate);
            switch (m - i) {
                case 1: mk_nn<1>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                case 2: mk_nn<2>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                case 3: mk_nn<3>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                case 4: mk_nn<4>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                case 5: mk_nn<5>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                default: break;
            }
        }
    }
    if (n_main < n) {
        // ragged right edge, reference loop over the remaining columns
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = n_main; j < n; ++j) {
                float acc = accumulate ? c[i * n + j] : 0.0f;
                for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
                c[i * n + j] = acc;
            }
        }
    }
}

// ---- gemm_nt: C[m x n] = A[m x k] * B^T, B stored [n x k] ----

void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate) {
    const std::size_t kv = k - k % 8;
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const float* b0 = b + j * k;
            const float* b1 = b0 + k;
            const float* b2 = b1 + k;
            const float* b3 = b2 + k;
            __m256 s0 = _mm256_setzero_ps(), s1 = _mm256_setzero_ps();
            __m256 s2 = _mm256_setzero_ps(), s3 = _mm256_setzero_ps();
            for (std::size_t p = 0; p < kv; p += 8) {
                const __m256 av = _mm256_loadu_ps(arow + p);
                s0 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b0 + p), s0);
                s1 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b1 + p), s1);
                s2 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b2 + p), s2);
                s3 = _mm256_fmadd_ps(av, _mm256_loadu_ps(b3 + p), s3);
            }
            __m256 t0 = _mm256_hadd_ps(s0, s1);
            __m256 t1 = _mm256_hadd_ps(s2, s3);
            __m256 t2 = _mm256_hadd_ps(t0, t1);
            __m128 dots = _mm_add_ps(_mm256_castps256_ps128(t2),
                                     _mm256_extractf128_ps(t2, 1));
            alignas(16) float d[4];
            _mm_store_ps(d, dots);
            for (std::size_t p = kv; p < k; ++p) {
                d[0] += arow[p] * b0[p];
                d[1] += arow[p] * b1[p];
                d[2] += arow[p] * b2[p];
                d[3] += arow[p] * b3[p];
            }
            float* crow = c + i * n + j;
            if (accumulate) {
                crow[0] += d[0]; crow[1] += d[1]; crow[2] += d[2]; crow[3] += d[3];
            } else {
                crow[0] = d[0]; crow[1] = d[1]; crow[2] = d[2]; crow[3] = d[3];
            }
        }
        for (; j < n; ++j) {
            const float* brow = b + j * k;
            __m256 s = _mm256_setzero_ps();
            for (std::size_t p = 0; p < kv; p += 8)
                s = _mm256_fmadd_ps(_mm256_loadu_ps(arow + p), _mm256_loadu_ps(brow + p), s);
            float acc = hsum(s);
            for (std::size_t p = kv; p < k; ++p) acc += arow[p] * brow[p];
            if (accumulate)
                c[i * n + j] += acc;
            else
                c[i * n + j] = acc;
        }
    }
}

// ---- gemm_tn: C[k x n] = A^T * B, A stored [m x k], B stored [m x n] ----

template <int R>
inline void mk_tn(std::size_t m, const float* a, std::size_t lda,
                  const float* b, std::size_t ldb, float* c, std::size_t ldc,
                  bool accumulate) {
    __m256 acc0[R], acc1[R];
    for (int r = 0; r < R; ++r) {
        if (accumulate) {
            acc0[r] = _mm256_loadu_ps(c + r * ldc);
            acc1[r] = _mm256_loadu_ps(c + r * ldc + 8);
        } else {
            acc0[r] = _mm256_setzero_ps();
            acc1[r] = _mm256_setzero_ps();
        }
    }
    for (std::size_t s = 0; s < m; ++s) {
        const __m256 b0 = _mm256_loadu_ps(b + s * ldb);
        const __m256 b1 = _mm256_loadu_ps(b + s * ldb + 8);
        for (int r = 0; r < R; ++r) {
            const __m256 av = _mm256_broadcast_ss(a + s * lda + r);
            acc0[r] = _mm256_fmadd_ps(av, b0, acc0[r]);
            acc1[r] = _mm256_fmadd_ps(av, b1, acc1[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm256_storeu_ps(c + r * ldc, acc0[r]);
        _mm256_storeu_ps(c + r * ldc + 8, acc1[r]);
    }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate) {
    constexpr std::size_t IR = 4;
    const std::size_t n_main = n - n % kNR;
    std::size_t i = 0;
    for (; i < k; i += IR) {
        const std::size_t rows = std::min(IR, k - i);
        for (std::size_t j = 0; j < n_main; j += kNR) {
            switch (rows) {
                case 4: mk_tn<4>(m, a + i, k, b + j, n, c + i * n + j, n, accumulate); break;
                case 3: mk_tn<3>(m, a + i, k, b + j, n, c + i * n + j, n, accumulate); break;
                case 2: mk_tn<2>(m, a + i, k, b + j, n, c + i * n + j, n, accumulate); break;
                case 1: mk_tn<1>(m, a + i, k, b + j, n, c + i * n + j, n, accumulate); break;
                default: break;
            }
        }
        if (n_main < n) {
            for (std::size_t r = 0; r < rows; ++r) {
                for (std::size_t j = n_main; j < n; ++j) {
                    float acc = accumulate ? c[(i + r) * n + j] : 0.0f;
                    for (std::size_t s = 0; s < m; ++s)
                        acc += a[s * k + i + r] * b[s * n + j];
                    c[(i + r) * n + j] = acc;
                }
            }
        }
    }
}

// ---- elementwise ----

void add(std::size_t n, const float* a, const float* b, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] + b[i];
}

void sub(std::size_t n, const float* a, const float* b, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_sub_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] - b[i];
}

void mul(std::size_t n, const float* a, const float* b, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i)));
    for (; i < n; ++i) out[i] = a[i] * b[i];
}

void fill(std::size_t n, float value, float* out) {
    const __m256 v = _mm256_set1_ps(value);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) _mm256_storeu_ps(out + i, v);
    for (; i < n; ++i) out[i] = value;
}

void scale(std::size_t n, float alpha, const float* x, float* out) {
    const __m256 av = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_mul_ps(av, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) out[i] = alpha * x[i];
}

void axpy(std::size_t n, float alpha, const float* x, float* y) {
    const __m256 av = _mm256_set1_ps(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(y + i, _mm256_fmadd_ps(av, _mm256_loadu_ps(x + i), _mm256_loadu_ps(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void fma_acc(std::size_t n, const float* a, const float* b, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_fmadd_ps(_mm256_loadu_ps(a + i),
                                                  _mm256_loadu_ps(b + i),
                                                  _mm256_loadu_ps(out + i)));
    for (; i < n; ++i) out[i] += a[i] * b[i];
}

void relu(std::size_t n, const float* x, float* out) {
    const __m256 z = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_max_ps(z, _mm256_loadu_ps(x + i)));
    for (; i < n; ++i) out[i] = x[i] > 0.0f ? x[i] : 0.0f;
}

void relu_grad(std::size_t n, const float* x, const float* dy, float* dx) {
    const __m256 z = _mm256_setzero_ps();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 mask = _mm256_cmp_ps(_mm256_loadu_ps(x + i), z, _CMP_GT_OS);
        const __m256 g = _mm256_and_ps(mask, _mm256_loadu_ps(dy + i));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i)
        if (x[i] > 0.0f) dx[i] += dy[i];
}

void sigmoid(std::size_t n, const float* x, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, sigmoid256(_mm256_loadu_ps(x + i)));
    if (i < n) {
        float tmp_in[8], tmp_out[8];
        std::copy(x + i, x + n, tmp_in);
        std::fill(tmp_in + (n - i), tmp_in + 8, 0.0f);
        _mm256_storeu_ps(tmp_out, sigmoid256(_mm256_loadu_ps(tmp_in)));
        std::copy(tmp_out, tmp_out + (n - i), out + i);
    }
}

void sigmoid_grad(std::size_t n, const float* y, const float* dy, float* dx) {
    const __m256 one = _mm256_set1_ps(1.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 yv = _mm256_loadu_ps(y + i);
        const __m256 g = _mm256_mul_ps(_mm256_loadu_ps(dy + i),
                                       _mm256_mul_ps(yv, _mm256_sub_ps(one, yv)));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i) dx[i] += dy[i] * y[i] * (1.0f - y[i]);
}

void exp(std::size_t n, const float* x, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, exp256(_mm256_loadu_ps(x + i)));
    if (i < n) {
        float tmp_in[8], tmp_out[8];
        std::copy(x + i, x + n, tmp_in);
        std::fill(tmp_in + (n - i), tmp_in + 8, 0.0f);
        _mm256_storeu_ps(tmp_out, exp256(_mm256_loadu_ps(tmp_in)));
        std::copy(tmp_out, tmp_out + (n - i), out + i);
    }
}

void log(std::size_t n, const float* x, float* out) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, log256(_mm256_loadu_ps(x + i)));
    if (i < n) {
        float tmp_in[8], tmp_out[8];
        std::copy(x + i, x + n, tmp_in);
        std::fill(tmp_in + (n - i), tmp_in + 8, 1.0f);
        _mm256_storeu_ps(tmp_out, log256(_mm256_loadu_ps(tmp_in)));
        std::copy(tmp_out, tmp_out + (n - i), out + i);
    }
}

void log_grad(std::size_t n, const float* x, const float* dy, float* dx) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 g = _mm256_div_ps(_mm256_loadu_ps(dy + i), _mm256_loadu_ps(x + i));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i) dx[i] += dy[i] / x[i];
}

void softplus(std::size_t n, const float* x, float* out) {
    const __m256 zero = _mm256_setzero_ps();
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 sign_mask = _mm256_set1_ps(-0.0f);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 xv = _mm256_loadu_ps(x + i);
        const __m256 ax = _mm256_andnot_ps(sign_mask, xv);
        const __m256 e = exp256(_mm256_sub_ps(zero, ax));
        const __m256 l = log256(_mm256_add_ps(one, e));
        _mm256_storeu_ps(out + i, _mm256_add_ps(_mm256_max_ps(xv, zero), l));
    }
    for (; i < n; ++i)
        out[i] = std::max(x[i], 0.0f) + std::log1p(std::exp(-std::abs(x[i])));
}

void softplus_grad(std::size_t n, const float* x, const float* dy, float* dx) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 s = sigmoid256(_mm256_loadu_ps(x + i));
        _mm256_storeu_ps(dx + i, _mm256_fmadd_ps(_mm256_loadu_ps(dy + i), s,
                                                 _mm256_loadu_ps(dx + i)));
    }
    for (; i < n; ++i) dx[i] += dy[i] / (1.0f + std::exp(-x[i]));
}

void clamp(std::size_t n, const float* x, float lo, float hi, float* out) {
    const __m256 lov = _mm256_set1_ps(lo), hiv = _mm256_set1_ps(hi);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8)
        _mm256_storeu_ps(out + i, _mm256_min_ps(hiv, _mm256_max_ps(lov, _mm256_loadu_ps(x + i))));
    for (; i < n; ++i) out[i] = std::min(std::max(x[i], lo), hi);
}

void clamp_grad(std::size_t n, const float* x, float lo, float hi,
                const float* dy, float* dx) {
    const __m256 lov = _mm256_set1_ps(lo), hiv = _mm256_set1_ps(hi);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 xv = _mm256_loadu_ps(x + i);
        const __m256 inside = _mm256_and_ps(_mm256_cmp_ps(xv, lov, _CMP_GE_OS),
                                            _mm256_cmp_ps(xv, hiv, _CMP_LE_OS));
        const __m256 g = _mm256_and_ps(inside, _mm256_loadu_ps(dy + i));
        _mm256_storeu_ps(dx + i, _mm256_add_ps(_mm256_loadu_ps(dx + i), g));
    }
    for (; i < n; ++i)
        if (x[i] >= lo && x[i] <= hi) dx[i] += dy[i];
}

double sum(std::size_t n, const float* x) {
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 v = _mm256_loadu_ps(x + i);
        acc0 = _mm256_add_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(v)));
        acc1 = _mm256_add_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(v, 1)));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double d[4];
    _mm256_store_pd(d, acc0);
    double total = (d[0] + d[1]) + (d[2] + d[3]);
    for (; i < n; ++i) total += static_cast<double>(x[i]);
    return total;
}

void col_sum(std::size_t m, std::size_t n, const float* a, float* out, bool accumulate) {
    if (!accumulate) fill(n, 0.0f, out);
    for (std::size_t i = 0; i < m; ++i) add(n, out, a + i * n, out);
}

void add_rowvec(std::size_t m, std::size_t n, const float* a, const float* v, float* out) {
    for (std::size_t i = 0; i < m; ++i) add(n, a + i * n, v, out + i * n);
}

void softmax_rows(std::size_t m, std::size_t n, const float* x, float* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const float* row = x + i * n;
        float* orow = out + i * n;
        float mx = row[0];
        std::size_t j = 1;
        if (n >= 8) {
            __m256 mv = _mm256_loadu_ps(row);
            for (j = 8; j + 8 <= n; j += 8) mv = _mm256_max_ps(mv, _mm256_loadu_ps(row + j));
            alignas(32) float d[8];
            _mm256_store_ps(d, mv);
            mx = *std::max_element(d, d + 8);
        }
        for (; j < n; ++j) mx = std::max(mx, row[j]);

        float total = 0.0f;
        std::size_t p = 0;
        if (n >= 8) {
            const __m256 mxv = _mm256_set1_ps(mx);
            __m256 tv = _mm256_setzero_ps();
            for (; p + 8 <= n; p += 8) {
                const __m256 e = exp256(_mm256_sub_ps(_mm256_loadu_ps(row + p), mxv));
                _mm256_storeu_ps(orow + p, e);
                tv = _mm256_add_ps(tv, e);
            }
            total = hsum(tv);
        }
        for (; p < n; ++p) {
            orow[p] = std::exp(row[p] - mx);
            total += orow[p];
        }
        scale(n, 1.0f / total, orow, orow);
    }
}

void softmax_grad(std::size_t m, std::size_t n, const float* y, const float* dy, float* dx) {
    ref::softmax_grad(m, n, y, dy, dx);
}

double bce_sum(std::size_t n, const float* x, const float* xr, float eps) {
    const __m256 lov = _mm256_set1_ps(eps), hiv = _mm256_set1_ps(1.0f - eps);
    const __m256 one = _mm256_set1_ps(1.0f);
    __m256d acc0 = _mm256_setzero_pd(), acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 xv = _mm256_loadu_ps(x + i);
        const __m256 r = _mm256_min_ps(hiv, _mm256_max_ps(lov, _mm256_loadu_ps(xr + i)));
        const __m256 t = _mm256_fmadd_ps(xv, log256(r),
                                         _mm256_mul_ps(_mm256_sub_ps(one, xv),
                                                       log256(_mm256_sub_ps(one, r))));
        acc0 = _mm256_sub_pd(acc0, _mm256_cvtps_pd(_mm256_castps256_ps128(t)));
        acc1 = _mm256_sub_pd(acc1, _mm256_cvtps_pd(_mm256_extractf128_ps(t, 1)));
    }
    acc0 = _mm256_add_pd(acc0, acc1);
    alignas(32) double d[4];
    _mm256_store_pd(d, acc0);
    double total = (d[0] + d[1]) + (d[2] + d[3]);
    for (; i < n; ++i) {
        const float r = std::min(std::max(xr[i], eps), 1.0f - eps);
        total -= static_cast<double>(x[i]) * std::log(static_cast<double>(r)) +
                 (1.0 - static_cast<double>(x[i])) * std::log(1.0 - static_cast<double>(r));
    }
    return total;
}

void bce_grad(std::size_t n, const float* x, const float* xr, float eps,
              float s, float* dxr) {
    const __m256 lov = _mm256_set1_ps(eps), hiv = _mm256_set1_ps(1.0f - eps);
    const __m256 one = _mm256_set1_ps(1.0f);
    const __m256 sv = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 r = _mm256_loadu_ps(xr + i);
        const __m256 inside = _mm256_and_ps(_mm256_cmp_ps(r, lov, _CMP_GT_OS),
                                            _mm256_cmp_ps(r, hiv, _CMP_LT_OS));
        const __m256 num = _mm256_mul_ps(sv, _mm256_sub_ps(r, _mm256_loadu_ps(x + i)));
        const __m256 den = _mm256_mul_ps(r, _mm256_sub_ps(one, r));
        const __m256 g = _mm256_and_ps(inside, _mm256_div_ps(num, den));
        _mm256_storeu_ps(dxr + i, _mm256_add_ps(_mm256_loadu_ps(dxr + i), g));
    }
    for (; i < n; ++i) {
        const float r = xr[i];
        if (r <= eps || r >= 1.0f - eps) continue;
        dxr[i] += s * (r - x[i]) / (r * (1.0f - r));
    }
}

void rmsprop_update(std::size_t n, float* p, const float* g, float* acc,
                    float lr, float rho, float eps) {
    const __m256 rhov = _mm256_set1_ps(rho);
    const __m256 om_rho = _mm256_set1_ps(1.0f - rho);
    const __m256 lrv = _mm256_set1_ps(lr);
    const __m256 epsv = _mm256_set1_ps(eps);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 gv = _mm256_loadu_ps(g + i);
        const __m256 a = _mm256_fmadd_ps(rhov, _mm256_loadu_ps(acc + i),
                                         _mm256_mul_ps(om_rho, _mm256_mul_ps(gv, gv)));
        _mm256_storeu_ps(acc + i, a);
        const __m256 denom = _mm256_add_ps(_mm256_sqrt_ps(a), epsv);
        const __m256 step = _mm256_div_ps(_mm256_mul_ps(lrv, gv), denom);
        _mm256_storeu_ps(p + i, _mm256_sub_ps(_mm256_loadu_ps(p + i), step));
    }
    for (; i < n; ++i) {
        acc[i] = rho * acc[i] + (1.0f - rho) * g[i] * g[i];
        p[i] -= lr * g[i] / (std::sqrt(acc[i]) + eps);
    }
}

}  // namespace
}  // namespace ssvae::kernels::avx2

namespace ssvae::kernels {

const KernelTable& avx2_table() {
    static const KernelTable t = {
        &avx2::gemm_nn, &avx2::gemm_nt, &avx2::gemm_tn,
        &avx2::add, &avx2::sub, &avx2::mul,
        &avx2::fill, &avx2::scale, &avx2::axpy, &avx2::fma_acc,
        &avx2::relu, &avx2::relu_grad,
        &avx2::sigmoid, &avx2::sigmoid_grad,
        &avx2::exp, &avx2::log, &avx2::log_grad,
        &avx2::softplus, &avx2::softplus_grad,
        &avx2::clamp, &avx2::clamp_grad,
        &avx2::sum, &avx2::col_sum, &avx2::add_rowvec,
        &avx2::softmax_rows, &avx2::softmax_grad,
        &avx2::bce_sum, &avx2::bce_grad,
        &avx2::rmsprop_update,
    };
    return t;
}

}  // namespace ssvae::kernels
