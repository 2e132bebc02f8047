#include "curriculum/infotheory.hpp"

#include "curriculum/error.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

namespace curriculum {

namespace {

double xlogx(double x) noexcept { return x > 0.0 ? x * std::log(x) : 0.0; }

double clamp_cell(double v, std::size_t pos) {
    if (v < -kJointTolerance)
        throw ConsistencyError("inconsistent joint at position " + std::to_string(pos) + ": cell " +
                               std::to_string(v));
    return v < 0.0 ? 0.0 : v;
}

}  // namespace

double binary_entropy(double p) noexcept { return -(xlogx(p) + xlogx(1.0 - p)); }

void BernoulliSequence::validate() const {
    if (marg.empty()) throw ConsistencyError("Bernoulli sequence must have at least one position");
    if (joint11.size() + 1 != marg.size())
        throw ConsistencyError("joint table must have n-1 entries");
    for (std::size_t i = 0; i < marg.size(); ++i)
        if (!std::isfinite(marg[i]) || marg[i] < -kJointTolerance || marg[i] > 1.0 + kJointTolerance)
            throw ConsistencyError("marginal out of range at position " + std::to_string(i));
    for (std::size_t i = 1; i < marg.size(); ++i) {
        const double q = joint11[i - 1];
        const double lo = std::max(0.0, marg[i - 1] + marg[i] - 1.0);
        const double hi = std::min(marg[i - 1], marg[i]);
        if (!std::isfinite(q) || q < lo - kJointTolerance || q > hi + kJointTolerance)
            throw ConsistencyError("joint outside Frechet bounds at position " + std::to_string(i));
    }
}

BernoulliSequence to_bernoulli(const Document& doc, const CorpusStats& stats) {
    const std::size_t n = std::min(doc.tokens.size(), stats.positions());
    if (n == 0) throw ConsistencyError("document " + std::to_string(doc.id) + " has no scorable positions");
    BernoulliSequence seq;
    seq.marg.resize(n);
    seq.joint11.resize(n - 1);
    std::vector<TokenId> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto id = stats.token_id(doc.tokens[i]);
        const double p = id ? stats.p(i, *id) : 0.0;
        if (p <= 0.0)
            throw ConsistencyError("token \"" + doc.tokens[i] + "\" at position " + std::to_string(i) +
                                   " of document " + std::to_string(doc.id) + " is absent from corpus stats");
        ids[i] = *id;
        seq.marg[i] = p;
        if (i > 0) seq.joint11[i - 1] = stats.q(i, ids[i - 1], ids[i]);
    }
    return seq;
}

EntropyProfile entropy_profile(const BernoulliSequence& seq) {
    seq.validate();
    const std::size_t n = seq.size();
    EntropyProfile prof;
    prof.h.resize(n);
    prof.h_cond.resize(n);
    prof.mi.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) prof.h[i] = binary_entropy(std::clamp(seq.marg[i], 0.0, 1.0));
    prof.h_cond[0] = prof.h[0];

    for (std::size_t i = 1; i < n; ++i) {
        const double a = seq.marg[i - 1];
        const double b = seq.marg[i];
        const double q = seq.joint11[i - 1];
        const std::array<double, 4> cells{clamp_cell(q, i), clamp_cell(a - q, i), clamp_cell(b - q, i),
                                          clamp_cell(1.0 - a - b + q, i)};
        double h_joint = 0.0;
        for (double c : cells) h_joint -= xlogx(c);
        const double h_cond = h_joint - prof.h[i - 1];
        const double mi = std::clamp(prof.h[i] - h_cond, 0.0, std::min(prof.h[i - 1], prof.h[i]));
        prof.mi[i] = mi;
        prof.h_cond[i] = prof.h[i] - mi;
    }
    return prof;
}

double chain_entropy(const EntropyProfile& profile, std::span<const std::size_t> positions) {
    double h = 0.0;
    for (std::size_t k = 0; k < positions.size(); ++k) {
        const std::size_t i = positions[k];
        if (i >= profile.size()) throw Error("chain_entropy: position out of range");
        if (k > 0 && positions[k - 1] >= i) throw Error("chain_entropy: positions must be sorted and distinct");
        h += profile.h[i];
        if (k > 0 && positions[k - 1] + 1 == i) h -= profile.mi[i];
    }
    return h;
}

double excess_entropy(const EntropyProfile& profile) {
    const std::size_t n = profile.size();
    if (n <= 1) return 0.0;
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double full = chain_entropy(profile, all);

    std::vector<std::size_t> rest;
    rest.reserve(n - 1);
    double leave_one_out = 0.0;
    for (std::size_t v = 0; v < n; ++v) {
        rest.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (i != v) rest.push_back(i);
        leave_one_out += chain_entropy(profile, rest);
    }
    return leave_one_out - static_cast<double>(n - 1) * full;
}

double excess_entropy(const BernoulliSequence& seq) { return excess_entropy(entropy_profile(seq)); }

double tse_closed_form(const EntropyProfile& profile) {
    const std::size_t n = profile.size();
    if (n <= 1) return 0.0;
    const double sum_h = std::accumulate(profile.h.begin(), profile.h.end(), 0.0);
    const double sum_mi = std::accumulate(profile.mi.begin() + 1, profile.mi.end(), 0.0);
    const double full = sum_h - sum_mi;
    const double nd = static_cast<double>(n);

    double tse = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double kd = static_cast<double>(k);
        // Each position is in a uniform size-k subset with probability k/n,
        // each adjacent pair with probability k(k-1)/(n(n-1)).
        const double avg = kd / nd * sum_h - kd * (kd - 1.0) / (nd * (nd - 1.0)) * sum_mi;
        const double c_k = nd / kd * avg - full;
        tse += kd / nd * c_k;
    }
    return tse;
}

double tse_closed_form(const BernoulliSequence& seq) { return tse_closed_form(entropy_profile(seq)); }

double tse_bruteforce(const BernoulliSequence& seq) {
    const std::size_t n = seq.size();
    if (n > kBruteForceLimit)
        throw Error("brute force disallowed for n=" + std::to_string(n) + " (limit " +
                    std::to_string(kBruteForceLimit) + ")");
    const auto profile = entropy_profile(seq);
    if (n <= 1) return 0.0;

    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    const double full = chain_entropy(profile, all);

    std::vector<double> sum_by_size(n + 1, 0.0);
    std::vector<std::size_t> subset;
    const std::uint32_t limit = (1u << n) - 1;  // excludes the full set
    for (std::uint32_t mask = 1; mask < limit; ++mask) {
        subset.clear();
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) subset.push_back(i);
        sum_by_size[subset.size()] += chain_entropy(profile, subset);
    }

    const double nd = static_cast<double>(n);
    double tse = 0.0;
    double binom = 1.0;  // C(n, k), updated incrementally
    for (std::size_t k = 1; k < n; ++k) {
        binom = binom * static_cast<double>(n - k + 1) / static_cast<double>(k);
        const double kd = static_cast<double>(k);
        const double c_k = nd / (kd * binom) * sum_by_size[k] - full;
        tse += kd / nd * c_k;
    }
    return tse;
}

ComplexityScores score_infotheoretic(const Corpus& corpus, const CorpusStats& stats, InfoMeasure which) {
    if (corpus.empty()) throw InputError("cannot score an empty corpus");
    if (stats.corpus_hash() != corpus.hash())
        throw ConsistencyError("corpus stats were built from a different corpus");
    ComplexityScores s;
    s.metric_id = std::string(which == InfoMeasure::tse ? metric::tse : metric::ee);
    s.corpus_hash = corpus.hash();
    s.scores.resize(corpus.size());
    for (const auto& d : corpus.documents()) {
        const auto profile = entropy_profile(to_bernoulli(d, stats));
        s.scores[d.id] = which == InfoMeasure::tse ? tse_closed_form(profile) : excess_entropy(profile);
    }
    return s;
}

}  // namespace curriculum
