#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/metrics.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace curriculum {

/// A document as a chain of binary variables: position i is "a random corpus
/// text has this document's token at position i".
struct BernoulliSequence {
    std::vector<double> marg;     ///< p_i, length n
    std::vector<double> joint11;  ///< q_i for adjacent positions (i-1, i), length n-1

    [[nodiscard]] std::size_t size() const noexcept { return marg.size(); }

    /// Throws ConsistencyError on non-finite entries, mismatched lengths or a
    /// joint outside its Frechet bounds (beyond 1e-12).
    void validate() const;
};

/// Entropies in nats.
struct EntropyProfile {
    std::vector<double> h;       ///< H(X_i)
    std::vector<double> h_cond;  ///< H(X_i | X_{i-1}); h_cond[0] = h[0]
    std::vector<double> mi;      ///< I(X_{i-1}; X_i); mi[0] = 0

    [[nodiscard]] std::size_t size() const noexcept { return h.size(); }
};

inline constexpr double kJointTolerance = 1e-12;
inline constexpr std::size_t kBruteForceLimit = 20;

/// Binary entropy in nats with 0 ln 0 = 0.
double binary_entropy(double p) noexcept;

/// Reads the positional tables for `doc`. Positions beyond the tables
/// (documents longer than the stats cap) are truncated.
BernoulliSequence to_bernoulli(const Document& doc, const CorpusStats& stats);

EntropyProfile entropy_profile(const BernoulliSequence& seq);

/// Chain-approximated entropy of the variables at `positions` (sorted,
/// distinct). Only pairs adjacent in the original sequence interact.
double chain_entropy(const EntropyProfile& profile, std::span<const std::size_t> positions);

/// Sum of leave-one-out entropies minus (n-1) times the full entropy.
double excess_entropy(const BernoulliSequence& seq);
double excess_entropy(const EntropyProfile& profile);

/// TSE complexity via the expected subset entropy of uniform size-k subsets.
double tse_closed_form(const BernoulliSequence& seq);
double tse_closed_form(const EntropyProfile& profile);

/// TSE by enumerating every subset. Test oracle; n <= kBruteForceLimit.
double tse_bruteforce(const BernoulliSequence& seq);

enum class InfoMeasure { tse, ee };

ComplexityScores score_infotheoretic(const Corpus& corpus, const CorpusStats& stats, InfoMeasure which);

}  // namespace curriculum
