#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/samplers.hpp"
#include "curriculum/trainer.hpp"

#include <optional>
#include <string>
#include <vector>

namespace curriculum {

inline constexpr std::string_view kBaselineMetric = "baseline";

struct MatrixConfig {
    std::vector<ComplexityScores> metrics;  ///< full-corpus scores, one per metric
    std::vector<SamplerKind> samplers;
    std::vector<std::uint64_t> seeds;
    std::vector<double> learning_rates;
    SamplerConfig sampler;  ///< template; kind and seed are set per run
    TrainerConfig trainer;  ///< template; learning_rate and seed are set per run
    double threshold_ratio = 0.9;
    std::size_t tail_window = 10;
    unsigned threads = 1;
};

enum class RunStatus { ok, unreached, incompatible, failed };

struct RunResult {
    std::string metric;  ///< "baseline" for the random arm
    SamplerKind sampler = SamplerKind::random;
    double learning_rate = 0.0;
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::ok;
    std::optional<std::size_t> steps;
    double threshold = 0.0;
    double final_accuracy = 0.0;
    double saturation = 0.0;
    std::string error;
    TrainingCurve curve;
};

struct CellSummary {
    std::string metric;
    SamplerKind sampler = SamplerKind::random;
    double learning_rate = 0.0;
    RunStatus status = RunStatus::ok;  ///< unreached when any seed never reached
    std::optional<double> mean_steps;
    std::optional<double> max_deviation;  ///< max - min over seeds
    double mean_threshold = 0.0;
    double mean_final_accuracy = 0.0;
    double mean_saturation = 0.0;
    std::size_t runs = 0;
};

struct MatrixResult {
    std::vector<RunResult> runs;
    std::vector<CellSummary> cells;

    [[nodiscard]] bool any_failed() const;
    [[nodiscard]] const CellSummary* cell(std::string_view metric, SamplerKind sampler, double lr) const;
};

/// Evaluates steps-to-threshold and saturation for a finished curve.
void summarize_curve(RunResult& run, double threshold_ratio, std::size_t tail_window);

/// Aggregates runs into cells (mean over seeds).
std::vector<CellSummary> aggregate_runs(const std::vector<RunResult>& runs);

/// Every (metric, sampler, seed, lr) plus one random baseline per (seed, lr).
/// Incompatible cells are recorded without training; per-run failures are
/// recorded and do not abort the matrix.
MatrixResult run_matrix(const Corpus& corpus, const MatrixConfig& config);

std::string_view to_string(RunStatus status);

}  // namespace curriculum
