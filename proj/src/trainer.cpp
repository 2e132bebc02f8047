#include "curriculum/trainer.hpp"

#include "curriculum/error.hpp"
#include "curriculum/hashing.hpp"
#include "curriculum/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curriculum {

void TrainerConfig::validate() const {
    if (feature_dim == 0 || feature_dim > (1u << 30)) throw InputError("feature_dim must lie in [1, 2^30]");
    if (!(learning_rate > 0.0)) throw InputError("learning_rate must be positive");
    if (!(l2 >= 0.0)) throw InputError("l2 must be non-negative");
    if (eval_every == 0) throw InputError("eval_every must be positive");
    if (!(eval_fraction > 0.0 && eval_fraction <= 0.5)) throw InputError("eval_fraction must lie in (0, 0.5]");
}

SparseFeatures featurize(std::span<const std::string> tokens, std::uint32_t dim) {
    std::vector<std::uint32_t> raw;
    raw.reserve(tokens.size());
    for (const auto& t : tokens) raw.push_back(static_cast<std::uint32_t>(fnv1a(t) % dim));
    std::sort(raw.begin(), raw.end());
    SparseFeatures f;
    for (std::size_t i = 0; i < raw.size();) {
        std::size_t j = i;
        while (j < raw.size() && raw[j] == raw[i]) ++j;
        f.idx.push_back(raw[i]);
        f.val.push_back(static_cast<double>(j - i));
        i = j;
    }
    return f;
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double logistic_loss(double margin, double label) {
    // -[y log s(m) + (1-y) log(1-s(m))] = log(1 + e^m) - y m
    const double softplus = margin > 0.0 ? margin + std::log1p(std::exp(-margin)) : std::log1p(std::exp(margin));
    return softplus - label * margin;
}

double LogisticModel::margin(const SparseFeatures& x) const {
    return simd::dot_sparse(weights_, x.idx, x.val) + bias_;
}

double LogisticModel::probability(const SparseFeatures& x) const { return sigmoid(margin(x)); }

double LogisticModel::loss(std::span<const Example> batch, double l2) const {
    double total = 0.0;
    for (const auto& ex : batch) total += logistic_loss(margin(*ex.features), ex.label);
    const double mean = batch.empty() ? 0.0 : total / static_cast<double>(batch.size());
    return mean + 0.5 * l2 * simd::sum_squares(weights_);
}

std::vector<double> LogisticModel::gradient(std::span<const Example> batch, double l2) const {
    std::vector<double> g(weights_.size() + 1, 0.0);
    const double inv = batch.empty() ? 0.0 : 1.0 / static_cast<double>(batch.size());
    for (const auto& ex : batch) {
        const double r = (probability(*ex.features) - ex.label) * inv;
        for (std::size_t k = 0; k < ex.features->idx.size(); ++k) g[ex.features->idx[k]] += r * ex.features->val[k];
        g.back() += r;
    }
    for (std::size_t i = 0; i < weights_.size(); ++i) g[i] += l2 * weights_[i];
    return g;
}

void LogisticModel::sgd_step(std::span<const Example> batch, double learning_rate, double l2) {
    if (batch.empty()) return;
    std::vector<double> residual(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i)
        residual[i] = probability(*batch[i].features) - batch[i].label;

    if (l2 > 0.0) simd::scale(weights_, 1.0 - learning_rate * l2);
    const double step = learning_rate / static_cast<double>(batch.size());
    double bias_grad = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        simd::axpy_sparse(-step * residual[i], batch[i].features->idx, batch[i].features->val, weights_);
        bias_grad += residual[i];
    }
    bias_ -= step * bias_grad;
}

std::size_t training_split_size(std::size_t n_docs, double eval_fraction) {
    const auto held = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(eval_fraction * n_docs)));
    if (held >= n_docs) throw InputError("corpus too small for a held-out split");
    return n_docs - held;
}

Trainer::Trainer(const Corpus& corpus, const TrainerConfig& config) : config_(config), model_(config.feature_dim) {
    config_.validate();
    train_size_ = training_split_size(corpus.size(), config.eval_fraction);
    features_.reserve(corpus.size());
    labels_.reserve(corpus.size());
    for (const auto& d : corpus.documents()) {
        if (!d.label) throw InputError("document " + std::to_string(d.id) + " has no label");
        if (*d.label != 0 && *d.label != 1)
            throw InputError("document " + std::to_string(d.id) + " has non-binary label " + std::to_string(*d.label));
        features_.push_back(featurize(d.tokens, config.feature_dim));
        labels_.push_back(static_cast<double>(*d.label));
    }
}

void Trainer::step(const Batch& batch) {
    scratch_.clear();
    for (DocId id : batch) {
        if (id >= train_size_)
            throw ConsistencyError("schedule references document " + std::to_string(id) +
                                   " outside the training split of " + std::to_string(train_size_));
        scratch_.push_back({&features_[id], labels_[id]});
    }
    model_.sgd_step(scratch_, config_.learning_rate, config_.l2);
}

double Trainer::heldout_accuracy() const {
    std::size_t correct = 0;
    for (std::size_t i = train_size_; i < features_.size(); ++i) {
        const bool predicted = model_.margin(features_[i]) > 0.0;
        if (predicted == (labels_[i] > 0.5)) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(features_.size() - train_size_);
}

double Trainer::loss_on(std::span<const DocId> docs) const {
    std::vector<Example> batch;
    batch.reserve(docs.size());
    for (DocId id : docs) batch.push_back({&features_.at(id), labels_.at(id)});
    return model_.loss(batch, config_.l2);
}

TrainingCurve train(const Corpus& corpus, const Schedule& schedule, const TrainerConfig& config) {
    if (schedule.meta.corpus_hash != corpus.hash())
        throw ConsistencyError("schedule corpus hash " + schedule.meta.corpus_hash + " does not match corpus " +
                               corpus.hash());
    Trainer trainer(corpus, config);
    TrainingCurve curve;
    curve.sampler = std::string(to_string(schedule.meta.sampler));
    curve.metric = schedule.meta.metric_id;
    curve.seed = config.seed;
    curve.learning_rate = config.learning_rate;

    const std::size_t steps = std::min(schedule.batches.size(), config.max_steps.value_or(schedule.batches.size()));
    curve.points.push_back({0, trainer.heldout_accuracy()});
    for (std::size_t t = 0; t < steps; ++t) {
        trainer.step(schedule.batches[t]);
        const std::size_t done = t + 1;
        if (done % config.eval_every == 0 || done == steps) curve.points.push_back({done, trainer.heldout_accuracy()});
    }
    return curve;
}

Schedule make_training_schedule(const Corpus& corpus, const ComplexityScores* scores, const SamplerConfig& config,
                                double eval_fraction) {
    const std::size_t n_train = training_split_size(corpus.size(), eval_fraction);
    const Corpus train_part = corpus.prefix(n_train);
    std::optional<ComplexityScores> sliced;
    if (scores) {
        validate_scores(*scores, corpus.size());
        sliced = *scores;
        sliced->scores.resize(n_train);
        sliced->corpus_hash = train_part.hash();
    }
    auto schedule = make_schedule(train_part, sliced ? &*sliced : nullptr, config);
    schedule.meta.corpus_hash = corpus.hash();
    return schedule;
}

double saturation_value(const TrainingCurve& curve, std::size_t tail_window) {
    if (tail_window == 0) throw InputError("tail window must be positive");
    if (curve.points.size() < tail_window)
        throw InputError("curve has " + std::to_string(curve.points.size()) + " points, tail window needs " +
                         std::to_string(tail_window));
    double total = 0.0;
    for (std::size_t i = curve.points.size() - tail_window; i < curve.points.size(); ++i)
        total += curve.points[i].accuracy;
    return total / static_cast<double>(tail_window);
}

std::optional<std::size_t> steps_to_threshold(const TrainingCurve& curve, double ratio, std::size_t tail_window) {
    const double threshold = ratio * saturation_value(curve, tail_window);
    for (const auto& p : curve.points)
        if (p.accuracy >= threshold) return p.step;
    return std::nullopt;
}

}  // namespace curriculum
