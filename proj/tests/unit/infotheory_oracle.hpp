#pragma once

// Independent evaluation of the subset-entropy model used for TSE and EE:
// per-position entropies and adjacent mutual informations are computed from
// the 2x2 joint directly, subsets are enumerated by bitmask and the
// textbook formulas are applied literally. Shares no code with the library.

#include "curriculum/random.hpp"

#include <cmath>
#include <vector>

namespace oracle {

inline double plogp(double x) { return x > 0.0 ? x * std::log(x) : 0.0; }

struct Chain {
    std::vector<double> h;   // marginal entropies
    std::vector<double> mi;  // mi[i] couples i-1 and i; mi[0] unused
};

inline Chain chain_of(const std::vector<double>& p, const std::vector<double>& q) {
    Chain c;
    const std::size_t n = p.size();
    c.h.resize(n);
    c.mi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) c.h[i] = -plogp(p[i]) - plogp(1.0 - p[i]);
    for (std::size_t i = 1; i < n; ++i) {
        const double a = p[i - 1], b = p[i], j = q[i - 1];
        const double cells[2][2] = {{1.0 - a - b + j, b - j}, {a - j, j}};
        const double ma[2] = {1.0 - a, a}, mb[2] = {1.0 - b, b};
        double mi = 0.0;
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const double cell = cells[x][y] < 0.0 ? 0.0 : cells[x][y];
                if (cell > 0.0 && ma[x] * mb[y] > 0.0) mi += cell * std::log(cell / (ma[x] * mb[y]));
            }
        c.mi[i] = mi < 0.0 ? 0.0 : mi;
    }
    return c;
}

inline double subset_entropy(const Chain& c, unsigned mask) {
    double h = 0.0;
    for (std::size_t i = 0; i < c.h.size(); ++i) {
        if (!(mask >> i & 1u)) continue;
        h += c.h[i];
        if (i > 0 && (mask >> (i - 1) & 1u)) h -= c.mi[i];
    }
    return h;
}

inline double binomial(unsigned n, unsigned k) {
    double r = 1.0;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline double tse(const std::vector<double>& p, const std::vector<double>& q) {
    const unsigned n = static_cast<unsigned>(p.size());
    if (n <= 1) return 0.0;
    const Chain c = chain_of(p, q);
    const unsigned full = (1u << n) - 1;
    const double h_full = subset_entropy(c, full);
    double total = 0.0;
    for (unsigned k = 1; k < n; ++k) {
        double sum = 0.0;
        for (unsigned mask = 1; mask < full; ++mask)
            if (static_cast<unsigned>(__builtin_popcount(mask)) == k) sum += subset_entropy(c, mask);
        const double ck = n / (k * binomial(n, k)) * sum - h_full;
        total += static_cast<double>(k) / n * ck;
    }
    return total;
}

inline double ee(const std::vector<double>& p, const std::vector<double>& q) {
    const unsigned n = static_cast<unsigned>(p.size());
    if (n <= 1) return 0.0;
    const Chain c = chain_of(p, q);
    const unsigned full = (1u << n) - 1;
    double total = 0.0;
    for (unsigned v = 0; v < n; ++v) total += subset_entropy(c, full & ~(1u << v));
    return total - (n - 1) * subset_entropy(c, full);
}

/// Random sequence with q inside its Frechet bounds; extremes 0, 1/2, 1 are
/// drawn now and then so degenerate cells are covered.
struct RandomSeq {
    std::vector<double> p, q;
};

inline RandomSeq random_sequence(curriculum::Rng& rng, std::size_t n) {
    RandomSeq s;
    for (std::size_t i = 0; i < n; ++i) {
        const auto pick = rng.below(10);
        s.p.push_back(pick == 0 ? 1.0 : pick == 1 ? 0.5 : pick == 2 ? 1e-3 : rng.unit());
    }
    for (std::size_t i = 1; i < n; ++i) {
        const double lo = std::max(0.0, s.p[i - 1] + s.p[i] - 1.0);
        const double hi = std::min(s.p[i - 1], s.p[i]);
        const auto pick = rng.below(8);
        s.q.push_back(pick == 0 ? lo : pick == 1 ? hi : pick == 2 ? s.p[i - 1] * s.p[i] : lo + (hi - lo) * rng.unit());
    }
    return s;
}

}  // namespace oracle
