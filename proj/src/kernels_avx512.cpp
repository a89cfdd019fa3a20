#include <immintrin.h>

#include <algorithm>
#include <cstddef>
#include <vector>

#include "kernels_table.hpp"

// AVX-512F variant of the three GEMMs; everything else reuses the AVX2
// implementations (any CPU with AVX-512F also runs them).
namespace ssvae::kernels::avx512 {
namespace {

constexpr std::size_t kNR = 32;  // two zmm per row
constexpr std::size_t kMR = 8;

template <int R>
inline void mk_nn(std::size_t k, const float* a, std::size_t lda,
                  const float* bp, float* c, std::size_t ldc, bool accumulate) {
    __m512 acc0[R], acc1[R];
    for (int r = 0; r < R; ++r) {
        if (accumulate) {
            acc0[r] = _mm512_loadu_ps(c + r * ldc);
            acc1[r] = _mm512_loadu_ps(c + r * ldc + 16);
        } else {
            acc0[r] = _mm512_setzero_ps();
            acc1[r] = _mm512_setzero_ps();
        }
    }
    for (std::size_t p = 0; p < k; ++p) {
        const __m512 b0 = _mm512_loadu_ps(bp + p * kNR);
        const __m512 b1 = _mm512_loadu_ps(bp + p * kNR + 16);
        for (int r = 0; r < R; ++r) {
            const __m512 av = _mm512_set1_ps(a[r * lda + p]);
            acc0[r] = _mm512_fmadd_ps(av, b0, acc0[r]);
            acc1[r] = _mm512_fmadd_ps(av, b1, acc1[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm512_storeu_ps(c + r * ldc, acc0[r]);
        _mm512_storeu_ps(c + r * ldc + 16, acc1[r]);
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
                case 6: mk_nn<6>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                case 7: mk_nn<7>(k, a + i * k, k, bp, c + i * n + j, n, accumulate); break;
                default: break;
            }
        }
    }
    if (n_main < n) {
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = n_main; j < n; ++j) {
                float acc = accumulate ? c[i * n + j] : 0.0f;
                for (std::size_t p = 0; p < k; ++p) acc += a[i * k + p] * b[p * n + j];
                c[i * n + j] = acc;
            }
        }
    }
}

void gemm_nt(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate) {
    const std::size_t kv = k - k % 16;
    for (std::size_t i = 0; i < m; ++i) {
        const float* arow = a + i * k;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            const float* b0 = b + j * k;
            const float* b1 = b0 + k;
            const float* b2 = b1 + k;
            const float* b3 = b2 + k;
            __m512 s0 = _mm512_setzero_ps(), s1 = _mm512_setzero_ps();
            __m512 s2 = _mm512_setzero_ps(), s3 = _mm512_setzero_ps();
            for (std::size_t p = 0; p < kv; p += 16) {
                const __m512 av = _mm512_loadu_ps(arow + p);
                s0 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b0 + p), s0);
                s1 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b1 + p), s1);
                s2 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b2 + p), s2);
                s3 = _mm512_fmadd_ps(av, _mm512_loadu_ps(b3 + p), s3);
            }
            float d[4] = {_mm512_reduce_add_ps(s0), _mm512_reduce_add_ps(s1),
                          _mm512_reduce_add_ps(s2), _mm512_reduce_add_ps(s3)};
            for (std::size_t p = kv; p < k; ++p) {
                d[0] += arow[p] * b0[p];
                d[1] += arow[p] * b1[p];
                d[2] += arow[p] * b2[p];
                d[3] += arow[p] * b3[p];
            }
            float* crow = c + i * n + j;
            for (int t = 0; t < 4; ++t)
                crow[t] = accumulate ? crow[t] + d[t] : d[t];
        }
        for (; j < n; ++j) {
            const float* brow = b + j * k;
            __m512 s = _mm512_setzero_ps();
            for (std::size_t p = 0; p < kv; p += 16)
                s = _mm512_fmadd_ps(_mm512_loadu_ps(arow + p), _mm512_loadu_ps(brow + p), s);
            float acc = _mm512_reduce_add_ps(s);
            for (std::size_t p = kv; p < k; ++p) acc += arow[p] * brow[p];
            c[i * n + j] = accumulate ? c[i * n + j] + acc : acc;
        }
    }
}

template <int R>
inline void mk_tn(std::size_t m, const float* a, std::size_t lda,
                  const float* b, std::size_t ldb, float* c, std::size_t ldc,
                  bool accumulate) {
    __m512 acc0[R], acc1[R];
    for (int r = 0; r < R; ++r) {
        if (accumulate) {
            acc0[r] = _mm512_loadu_ps(c + r * ldc);
            acc1[r] = _mm512_loadu_ps(c + r * ldc + 16);
        } else {
            acc0[r] = _mm512_setzero_ps();
            acc1[r] = _mm512_setzero_ps();
        }
    }
    for (std::size_t s = 0; s < m; ++s) {
        const __m512 b0 = _mm512_loadu_ps(b + s * ldb);
        const __m512 b1 = _mm512_loadu_ps(b + s * ldb + 16);
        for (int r = 0; r < R; ++r) {
            const __m512 av = _mm512_set1_ps(a[s * lda + r]);
            acc0[r] = _mm512_fmadd_ps(av, b0, acc0[r]);
            acc1[r] = _mm512_fmadd_ps(av, b1, acc1[r]);
        }
    }
    for (int r = 0; r < R; ++r) {
        _mm512_storeu_ps(c + r * ldc, acc0[r]);
        _mm512_storeu_ps(c + r * ldc + 16, acc1[r]);
    }
}

void gemm_tn(std::size_t m, std::size_t k, std::size_t n,
             const float* a, const float* b, float* c, bool accumulate) {
    constexpr std::size_t IR = 4;
    const std::size_t n_main = n - n % kNR;
    for (std::size_t i = 0; i < k; i += IR) {
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

}  // namespace
}  // namespace ssvae::kernels::avx512

namespace ssvae::kernels {

const KernelTable& avx512_table() {
    static const KernelTable t = [] {
        KernelTable t2 = avx2_table();
        t2.gemm_nn = &avx512::gemm_nn;
        t2.gemm_nt = &avx512::gemm_nt;
        t2.gemm_tn = &avx512::gemm_tn;
        return t2;
    }();
    return t;
}

}  // namespace ssvae::kernels
