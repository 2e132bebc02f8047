#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/samplers.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace curriculum {

struct TrainerConfig {
    std::uint32_t feature_dim = 1u << 18;
    double learning_rate = 0.1;
    double l2 = 1e-6;
    std::uint32_t eval_every = 50;
    double eval_fraction = 0.1;
    std::uint64_t seed = 0;
    /// Stop after this many schedule batches (all when unset).
    std::optional<std::size_t> max_steps;

    void validate() const;
};

/// Hashed token counts, sorted by index with duplicates merged.
struct SparseFeatures {
    std::vector<std::uint32_t> idx;
    std::vector<double> val;
};

SparseFeatures featurize(std::span<const std::string> tokens, std::uint32_t dim);

struct Example {
    const SparseFeatures* features = nullptr;
    double label = 0.0;  // 0 or 1
};

/// Binary logistic regression over hashed features plus an unregularized bias.
class LogisticModel {
public:
    explicit LogisticModel(std::uint32_t dim) : weights_(dim, 0.0) {}

    [[nodiscard]] double margin(const SparseFeatures& x) const;
    [[nodiscard]] double probability(const SparseFeatures& x) const;

    /// Mean log-loss over `batch` plus (l2 / 2) * ||w||^2.
    [[nodiscard]] double loss(std::span<const Example> batch, double l2) const;
    /// Dense gradient of loss(): weights first, bias last (size dim + 1).
    [[nodiscard]] std::vector<double> gradient(std::span<const Example> batch, double l2) const;

    /// One plain SGD step on the batch loss.
    void sgd_step(std::span<const Example> batch, double learning_rate, double l2);

    [[nodiscard]] std::span<double> weights() noexcept { return weights_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] double bias() const noexcept { return bias_; }
    void set_bias(double b) noexcept { bias_ = b; }

private:
    std::vector<double> weights_;
    double bias_ = 0.0;
};

/// Numerically stable log(1 + exp(-m)) style losses.
double logistic_loss(double margin, double label);
double sigmoid(double x);

struct CurvePoint {
    std::size_t step = 0;
    double accuracy = 0.0;

    friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};

struct TrainingCurve {
    std::vector<CurvePoint> points;
    std::string sampler;
    std::string metric;
    std::uint64_t seed = 0;
    double learning_rate = 0.0;
};

/// Number of documents in the training split: the held-out split is the
/// last eval_fraction of documents by id.
std::size_t training_split_size(std::size_t n_docs, double eval_fraction);

/// Holds featurized documents and the model for one run.
class Trainer {
public:
    Trainer(const Corpus& corpus, const TrainerConfig& config);

    void step(const Batch& batch);
    [[nodiscard]] double heldout_accuracy() const;
    /// Mean log-loss plus penalty over the given documents.
    [[nodiscard]] double loss_on(std::span<const DocId> docs) const;

    [[nodiscard]] std::size_t train_size() const noexcept { return train_size_; }
    [[nodiscard]] const LogisticModel& model() const noexcept { return model_; }

private:
    TrainerConfig config_;
    std::vector<SparseFeatures> features_;
    std::vector<double> labels_;
    std::size_t train_size_ = 0;
    LogisticModel model_;
    std::vector<Example> scratch_;
};

/// Trains on the schedule, evaluating at step 0, every eval_every steps and
/// after the last step.
TrainingCurve train(const Corpus& corpus, const Schedule& schedule, const TrainerConfig& config);

/// Schedule over the training split of `corpus`, labelled with the full
/// corpus hash so the trainer accepts it.
Schedule make_training_schedule(const Corpus& corpus, const ComplexityScores* scores, const SamplerConfig& config,
                                double eval_fraction);

/// Mean of the last `tail_window` evaluations.
double saturation_value(const TrainingCurve& curve, std::size_t tail_window = 10);

/// First evaluation step whose accuracy reaches ratio * saturation; nullopt
/// when never reached.
std::optional<std::size_t> steps_to_threshold(const TrainingCurve& curve, double ratio = 0.9,
                                              std::size_t tail_window = 10);

}  // namespace curriculum
