#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace curriculum {

/// Seeded mt19937_64 with bounded integers and unit reals derived by hand;
/// draws are identical across standard libraries.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);

    /// Uniform real in [0, 1) with 53 random bits.
    double unit();

    /// Index drawn from a discrete distribution given by cumulative weights
    /// (last entry is the total).
    std::size_t pick(std::span<const double> cumulative);

    /// Fisher-Yates shuffle driven by below().
    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

/// Draws `count` distinct integers from [0, population) in draw order
/// (Floyd's algorithm, order fixed by the generator stream).
std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t population, std::uint32_t count);

/// Mixes a user seed with a stream tag so independent consumers of one seed
/// (schedule generation, weight init, matrix cells) do not share streams.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

}  // namespace curriculum
