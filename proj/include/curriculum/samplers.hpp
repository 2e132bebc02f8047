#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/metrics.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curriculum {

enum class SamplerKind { cb, db, hyp, ss, sm, random };

SamplerKind parse_sampler_kind(std::string_view name);
std::string_view to_string(SamplerKind kind);
/// The five curricula, in report column order.
const std::vector<SamplerKind>& curriculum_samplers();

struct SamplerConfig {
    SamplerKind kind = SamplerKind::random;
    std::uint32_t batch_size = 32;
    std::uint32_t total_steps = 1000;
    double c0 = 0.01;
    std::uint32_t num_buckets = 10;
    std::uint64_t seed = 0;
};

using Batch = std::vector<DocId>;

struct ScheduleMeta {
    SamplerKind sampler = SamplerKind::random;
    std::string metric_id;  // "none" for the random baseline
    std::uint32_t batch_size = 0;
    std::uint32_t total_steps = 0;
    std::uint64_t seed = 0;
    std::string corpus_hash;

    friend bool operator==(const ScheduleMeta&, const ScheduleMeta&) = default;
};

struct Schedule {
    ScheduleMeta meta;
    std::vector<Batch> batches;

    friend bool operator==(const Schedule&, const Schedule&) = default;
};

inline constexpr std::string_view kNoMetric = "none";

/// c(t) = min(1, sqrt(t (1 - c0^2) / T + c0^2)); exact at both endpoints.
double competence(double t, double total, double c0);

/// Hyperbolic bucket distribution for 1-based `epoch` over `buckets`,
/// weight(j) = (|j - i| + 1)^(-1/2), normalized.
std::vector<double> hyp_bucket_probs(std::uint32_t epoch, std::uint32_t buckets);

/// Contiguous split of `count` items into `parts` (remainder to the first parts).
/// Returns part boundaries, size parts + 1.
std::vector<std::size_t> split_even(std::size_t count, std::size_t parts);

/// Prefix size drawn from at step t by the competence-based sampler.
std::size_t cb_prefix_size(std::uint32_t step, const SamplerConfig& config, std::size_t n_docs);
/// Suffix size (hardest end) drawn from at step t by the difficulty-based sampler.
std::size_t db_suffix_size(std::uint32_t step, const SamplerConfig& config, std::size_t n_docs);
/// 1-based epoch of a step for the hyperbolic sampler (remainder steps go to the last epoch).
std::uint32_t hyp_epoch(std::uint32_t step, const SamplerConfig& config);

/// `order` is a complexity permutation from sort_by_complexity.
Schedule make_cb_schedule(std::span<const DocId> order, const SamplerConfig& config);
Schedule make_db_schedule(std::span<const DocId> order, const SamplerConfig& config);
Schedule make_hyp_schedule(std::span<const DocId> order, const SamplerConfig& config);
Schedule make_ss_schedule(const ComplexityScores& scores, const SamplerConfig& config);
Schedule make_sm_schedule(const ComplexityScores& scores, const Corpus& corpus, const SamplerConfig& config);
Schedule make_random_schedule(const Corpus& corpus, const SamplerConfig& config);

/// True when the metric cannot drive the sampler (length with ss or sm).
bool is_incompatible(SamplerKind kind, std::string_view metric_id);

/// Builds any schedule. `scores` may be null only for the random sampler.
Schedule make_schedule(const Corpus& corpus, const ComplexityScores* scores, const SamplerConfig& config);

}  // namespace curriculum
