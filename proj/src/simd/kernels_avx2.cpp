#include "curriculum/simd/kernels.hpp"

#include "curriculum/error.hpp"

#include <immintrin.h>

namespace curriculum::simd::avx2 {

namespace {

double reduce_lanes(__m256d acc) {
    alignas(32) double lane[4];
    _mm256_store_pd(lane, acc);
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val) {
    if (idx.size() != val.size()) throw Error("dot_sparse: index/value length mismatch");
    const std::size_t n = idx.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx.data() + i));
        const __m256d g = _mm256_i32gather_pd(w.data(), vi, 8);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(g, _mm256_loadu_pd(val.data() + i)));
    }
    double r = reduce_lanes(acc);
    for (; i < n; ++i) r = r + w[idx[i]] * val[i];
    return r;
}

void scale(std::span<double> w, double s) {
    const __m256d vs = _mm256_set1_pd(s);
    const std::size_t n = w.size();
    double* p = w.data();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) _mm256_storeu_pd(p + i, _mm256_mul_pd(_mm256_loadu_pd(p + i), vs));
    for (; i < n; ++i) p[i] *= s;
}

double sum_squares(std::span<const double> x) {
    const std::size_t n = x.size();
    __m256d acc = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d v = _mm256_loadu_pd(x.data() + i);
        acc = _mm256_add_pd(acc, _mm256_mul_pd(v, v));
    }
    double r = reduce_lanes(acc);
    for (; i < n; ++i) r = r + x[i] * x[i];
    return r;
}

}  // namespace curriculum::simd::avx2
