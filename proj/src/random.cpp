#include "curriculum/random.hpp"

#include "curriculum/error.hpp"

#include <algorithm>
#include <unordered_set>

namespace curriculum {

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw Error("Rng::below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    std::uint64_t r;
    do {
        r = engine_();
    } while (r < threshold);
    return r % bound;
}

double Rng::unit() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::pick(std::span<const double> cumulative) {
    if (cumulative.empty()) throw Error("Rng::pick: empty distribution");
    const double u = unit() * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) --it;
    return static_cast<std::size_t>(it - cumulative.begin());
}

std::vector<std::uint32_t> sample_distinct(Rng& rng, std::uint32_t population, std::uint32_t count) {
    if (count > population) throw Error("sample_distinct: count exceeds population");
    std::vector<std::uint32_t> out;
    out.reserve(count);
    std::unordered_set<std::uint32_t> seen;
    const bool use_set = count > 64;
    if (use_set) seen.reserve(count * 2);
    auto contains = [&](std::uint32_t v) {
        return use_set ? seen.contains(v) : std::find(out.begin(), out.end(), v) != out.end();
    };
    for (std::uint32_t j = population - count; j < population; ++j) {
        auto t = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
        const std::uint32_t v = contains(t) ? j : t;
        out.push_back(v);
        if (use_set) seen.insert(v);
    }
    return out;
}

namespace {
std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    return splitmix64(seed ^ splitmix64(stream));
}

}  // namespace curriculum
