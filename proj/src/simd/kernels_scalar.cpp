#include "curriculum/simd/kernels.hpp"

#include "curriculum/error.hpp"

namespace curriculum::simd::reference {

double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val) {
    if (idx.size() != val.size()) throw Error("dot_sparse: index/value length mismatch");
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = idx.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (std::size_t l = 0; l < 4; ++l) lane[l] = lane[l] + w[idx[i + l]] * val[i + l];
    double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) r = r + w[idx[i]] * val[i];
    return r;
}

void axpy_sparse(double a, std::span<const std::uint32_t> idx, std::span<const double> val, std::span<double> w) {
    if (idx.size() != val.size()) throw Error("axpy_sparse: index/value length mismatch");
    for (std::size_t k = 0; k < idx.size(); ++k) w[idx[k]] += a * val[k];
}

void scale(std::span<double> w, double s) {
    for (auto& x : w) x *= s;
}

double sum_squares(std::span<const double> x) {
    double lane[4] = {0.0, 0.0, 0.0, 0.0};
    const std::size_t n = x.size();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
        for (std::size_t l = 0; l < 4; ++l) lane[l] = lane[l] + x[i + l] * x[i + l];
    double r = (lane[0] + lane[1]) + (lane[2] + lane[3]);
    for (; i < n; ++i) r = r + x[i] * x[i];
    return r;
}

}  // namespace curriculum::simd::reference
