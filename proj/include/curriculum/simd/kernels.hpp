#pragma once

// Numeric inner loops of the trainer. Each kernel has a scalar reference and
// an AVX2 variant; the variant is chosen once at runtime from CPUID and can be
// overridden with CURRICULUM_SIMD=scalar|avx2.
//
// Reductions accumulate in four interleaved lanes that are combined as
// (l0 + l1) + (l2 + l3), followed by the tail in order. The scalar reference
// follows the same order, so both variants return bit-identical results.

#include <cstdint>
#include <span>
#include <string_view>

namespace curriculum::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);
bool isa_supported(Isa isa);
Isa active_isa();
/// Test hook; throws if the ISA is unsupported on this CPU or build.
void force_isa(Isa isa);

/// sum_k w[idx[k]] * val[k]
double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val);
/// w[idx[k]] += a * val[k], in order (indices may repeat)
void axpy_sparse(double a, std::span<const std::uint32_t> idx, std::span<const double> val, std::span<double> w);
/// w *= s
void scale(std::span<double> w, double s);
/// sum_i x[i]^2
double sum_squares(std::span<const double> x);

namespace reference {
double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val);
void axpy_sparse(double a, std::span<const std::uint32_t> idx, std::span<const double> val, std::span<double> w);
void scale(std::span<double> w, double s);
double sum_squares(std::span<const double> x);
}  // namespace reference

#if defined(CURRICULUM_HAVE_AVX2)
namespace avx2 {
double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val);
void scale(std::span<double> w, double s);
double sum_squares(std::span<const double> x);
}  // namespace avx2
#endif

}  // namespace curriculum::simd
