#include "curriculum/simd/kernels.hpp"

#include "curriculum/error.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace curriculum::simd {

namespace {

bool cpu_has_avx2() {
#if defined(CURRICULUM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Isa detect() {
    const bool avx2 = cpu_has_avx2();
    if (const char* env = std::getenv("CURRICULUM_SIMD")) {
        const std::string v = env;
        if (v == "scalar") return Isa::scalar;
        if (v == "avx2" && avx2) return Isa::avx2;
    }
    return avx2 ? Isa::avx2 : Isa::scalar;
}

std::atomic<Isa>& current() {
    static std::atomic<Isa> isa{detect()};
    return isa;
}

}  // namespace

std::string_view to_string(Isa isa) {
    return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) {
    return isa == Isa::scalar || cpu_has_avx2();
}

Isa active_isa() { return current().load(std::memory_order_relaxed); }

void force_isa(Isa isa) {
    if (!isa_supported(isa)) throw Error("ISA not supported here: " + std::string(to_string(isa)));
    current().store(isa, std::memory_order_relaxed);
}

double dot_sparse(std::span<const double> w, std::span<const std::uint32_t> idx, std::span<const double> val) {
#if defined(CURRICULUM_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::dot_sparse(w, idx, val);
#endif
    return reference::dot_sparse(w, idx, val);
}

void axpy_sparse(double a, std::span<const std::uint32_t> idx, std::span<const double> val, std::span<double> w) {
    reference::axpy_sparse(a, idx, val, w);
}

void scale(std::span<double> w, double s) {
#if defined(CURRICULUM_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::scale(w, s);
#endif
    reference::scale(w, s);
}

double sum_squares(std::span<const double> x) {
#if defined(CURRICULUM_HAVE_AVX2)
    if (active_isa() == Isa::avx2) return avx2::sum_squares(x);
#endif
    return reference::sum_squares(x);
}

}  // namespace curriculum::simd
