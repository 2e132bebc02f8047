#include "curriculum/samplers.hpp"

#include "curriculum/error.hpp"
#include "curriculum/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace curriculum {

SamplerKind parse_sampler_kind(std::string_view name) {
    if (name == "cb") return SamplerKind::cb;
    if (name == "db") return SamplerKind::db;
    if (name == "hyp") return SamplerKind::hyp;
    if (name == "ss") return SamplerKind::ss;
    if (name == "sm") return SamplerKind::sm;
    if (name == "random") return SamplerKind::random;
    throw InputError("unknown sampler: " + std::string(name));
}

std::string_view to_string(SamplerKind kind) {
    switch (kind) {
        case SamplerKind::cb: return "cb";
        case SamplerKind::db: return "db";
        case SamplerKind::hyp: return "hyp";
        case SamplerKind::ss: return "ss";
        case SamplerKind::sm: return "sm";
        case SamplerKind::random: return "random";
    }
    return "?";
}

const std::vector<SamplerKind>& curriculum_samplers() {
    static const std::vector<SamplerKind> kinds{SamplerKind::cb, SamplerKind::db, SamplerKind::hyp, SamplerKind::ss,
                                                SamplerKind::sm};
    return kinds;
}

double competence(double t, double total, double c0) {
    if (!(total > 0.0)) throw InputError("competence: total steps must be positive");
    if (!(c0 > 0.0 && c0 < 1.0)) throw InputError("competence: c0 must lie in (0, 1)");
    if (!(t >= 0.0 && t <= total)) throw InputError("competence: step outside [0, T]");
    if (t == 0.0) return c0;
    if (t == total) return 1.0;
    return std::min(1.0, std::sqrt(t * (1.0 - c0 * c0) / total + c0 * c0));
}

std::vector<double> hyp_bucket_probs(std::uint32_t epoch, std::uint32_t buckets) {
    if (buckets == 0 || epoch < 1 || epoch > buckets) throw InputError("hyp_bucket_probs: epoch outside 1..N");
    std::vector<double> w(buckets);
    double total = 0.0;
    for (std::uint32_t j = 1; j <= buckets; ++j) {
        const double dist = std::abs(static_cast<double>(j) - static_cast<double>(epoch));
        w[j - 1] = 1.0 / std::sqrt(dist + 1.0);
        total += w[j - 1];
    }
    for (auto& x : w) x /= total;
    return w;
}

std::vector<std::size_t> split_even(std::size_t count, std::size_t parts) {
    if (parts == 0) throw InputError("split_even: zero parts");
    std::vector<std::size_t> bounds(parts + 1, 0);
    const std::size_t base = count / parts;
    const std::size_t extra = count % parts;
    for (std::size_t i = 0; i < parts; ++i) bounds[i + 1] = bounds[i] + base + (i < extra ? 1 : 0);
    return bounds;
}

namespace {

void validate_config(const SamplerConfig& config, std::size_t n_docs) {
    if (n_docs == 0) throw InputError("cannot schedule an empty corpus");
    if (config.batch_size == 0) throw InputError("batch_size must be positive");
    if (config.batch_size > n_docs)
        throw InputError("batch_size " + std::to_string(config.batch_size) + " exceeds corpus size " +
                         std::to_string(n_docs));
    if (config.total_steps == 0) throw InputError("total_steps must be positive");
    if (!(config.c0 > 0.0 && config.c0 < 1.0)) throw InputError("c0 must lie in (0, 1)");
    if (config.kind == SamplerKind::hyp) {
        if (config.num_buckets < 2) throw InputError("hyp needs at least 2 buckets");
        if (config.total_steps < config.num_buckets) throw InputError("hyp needs total_steps >= num_buckets");
        if (config.num_buckets > n_docs) throw InputError("hyp needs at least one document per bucket");
    }
}

void require_kind(const SamplerConfig& config, SamplerKind kind) {
    if (config.kind != kind)
        throw InputError("sampler config kind " + std::string(to_string(config.kind)) + " passed to " +
                         std::string(to_string(kind)) + " builder");
}

Schedule empty_schedule(const SamplerConfig& config) {
    Schedule s;
    s.meta.sampler = config.kind;
    s.meta.batch_size = config.batch_size;
    s.meta.total_steps = config.total_steps;
    s.meta.seed = config.seed;
    return s;
}

std::size_t lifted_size(double fraction, std::uint32_t batch_size, std::size_t n_docs) {
    const auto scaled = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n_docs)));
    return std::min(n_docs, std::max<std::size_t>(batch_size, scaled));
}

// Position of each document in the complexity order.
std::vector<std::uint32_t> complexity_ranks(const ComplexityScores& scores) {
    const auto order = sort_by_complexity(scores);
    std::vector<std::uint32_t> rank(order.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;
    return rank;
}

}  // namespace

std::size_t cb_prefix_size(std::uint32_t step, const SamplerConfig& config, std::size_t n_docs) {
    return lifted_size(competence(step, config.total_steps, config.c0), config.batch_size, n_docs);
}

std::size_t db_suffix_size(std::uint32_t step, const SamplerConfig& config, std::size_t n_docs) {
    const double s = std::max(config.c0, 1.0 - static_cast<double>(step) / config.total_steps);
    return lifted_size(s, config.batch_size, n_docs);
}

std::uint32_t hyp_epoch(std::uint32_t step, const SamplerConfig& config) {
    const std::uint32_t epoch_len = config.total_steps / config.num_buckets;
    return std::min(config.num_buckets, step / epoch_len + 1);
}

Schedule make_cb_schedule(std::span<const DocId> order, const SamplerConfig& config) {
    require_kind(config, SamplerKind::cb);
    validate_config(config, order.size());
    auto s = empty_schedule(config);
    Rng rng(config.seed);
    s.batches.reserve(config.total_steps);
    for (std::uint32_t t = 0; t < config.total_steps; ++t) {
        const auto prefix = static_cast<std::uint32_t>(cb_prefix_size(t, config, order.size()));
        Batch b;
        b.reserve(config.batch_size);
        for (auto idx : sample_distinct(rng, prefix, config.batch_size)) b.push_back(order[idx]);
        s.batches.push_back(std::move(b));
    }
    return s;
}

Schedule make_db_schedule(std::span<const DocId> order, const SamplerConfig& config) {
    require_kind(config, SamplerKind::db);
    validate_config(config, order.size());
    auto s = empty_schedule(config);
    Rng rng(config.seed);
    const std::size_t n = order.size();
    s.batches.reserve(config.total_steps);
    for (std::uint32_t t = 0; t < config.total_steps; ++t) {
        const auto suffix = static_cast<std::uint32_t>(db_suffix_size(t, config, n));
        Batch b;
        b.reserve(config.batch_size);
        for (auto idx : sample_distinct(rng, suffix, config.batch_size)) b.push_back(order[n - suffix + idx]);
        s.batches.push_back(std::move(b));
    }
    return s;
}

Schedule make_hyp_schedule(std::span<const DocId> order, const SamplerConfig& config) {
    require_kind(config, SamplerKind::hyp);
    validate_config(config, order.size());
    auto s = empty_schedule(config);
    Rng rng(config.seed);
    const auto bounds = split_even(order.size(), config.num_buckets);

    std::vector<std::vector<double>> cumulative(config.num_buckets);
    for (std::uint32_t e = 1; e <= config.num_buckets; ++e) {
        auto probs = hyp_bucket_probs(e, config.num_buckets);
        std::partial_sum(probs.begin(), probs.end(), probs.begin());
        cumulative[e - 1] = std::move(probs);
    }

    std::vector<std::size_t> used_in_bucket(config.num_buckets);
    std::vector<bool> used(order.size(), false);
    std::vector<std::size_t> taken;
    s.batches.reserve(config.total_steps);
    for (std::uint32_t t = 0; t < config.total_steps; ++t) {
        const auto& cum = cumulative[hyp_epoch(t, config) - 1];
        std::fill(used_in_bucket.begin(), used_in_bucket.end(), 0);
        taken.clear();
        Batch b;
        b.reserve(config.batch_size);
        while (b.size() < config.batch_size) {
            const std::size_t j = rng.pick(cum);
            const std::size_t lo = bounds[j];
            const std::size_t size = bounds[j + 1] - lo;
            // Collisions redraw within the bucket; an exhausted bucket redraws the bucket.
            if (used_in_bucket[j] == size) continue;
            std::size_t pos;
            do {
                pos = lo + static_cast<std::size_t>(rng.below(size));
            } while (used[pos]);
            used[pos] = true;
            taken.push_back(pos);
            ++used_in_bucket[j];
            b.push_back(order[pos]);
        }
        for (std::size_t pos : taken) used[pos] = false;
        s.batches.push_back(std::move(b));
    }
    return s;
}

Schedule make_ss_schedule(const ComplexityScores& scores, const SamplerConfig& config) {
    require_kind(config, SamplerKind::ss);
    if (is_incompatible(SamplerKind::ss, scores.metric_id))
        throw InputError("sampler ss is incompatible with metric " + scores.metric_id);
    validate_scores(scores, scores.size());
    validate_config(config, scores.size());
    auto s = empty_schedule(config);
    s.meta.metric_id = scores.metric_id;
    s.meta.corpus_hash = scores.corpus_hash;

    const auto rank = complexity_ranks(scores);
    std::vector<DocId> perm(scores.size());
    std::iota(perm.begin(), perm.end(), DocId{0});
    Rng rng(config.seed);
    rng.shuffle(perm);

    struct Keyed {
        double mean_rank;
        Batch batch;
    };
    std::vector<Keyed> keyed;
    for (std::size_t start = 0; start < perm.size(); start += config.batch_size) {
        const std::size_t end = std::min(perm.size(), start + config.batch_size);
        Keyed k{0.0, Batch(perm.begin() + static_cast<std::ptrdiff_t>(start),
                           perm.begin() + static_cast<std::ptrdiff_t>(end))};
        std::uint64_t total = 0;
        for (DocId id : k.batch) total += rank[id];
        k.mean_rank = static_cast<double>(total) / static_cast<double>(k.batch.size());
        keyed.push_back(std::move(k));
    }
    std::sort(keyed.begin(), keyed.end(), [](const Keyed& a, const Keyed& b) {
        if (a.mean_rank != b.mean_rank) return a.mean_rank < b.mean_rank;
        return a.batch.front() < b.batch.front();
    });
    s.batches.reserve(keyed.size());
    for (auto& k : keyed) s.batches.push_back(std::move(k.batch));
    return s;
}

Schedule make_sm_schedule(const ComplexityScores& scores, const Corpus& corpus, const SamplerConfig& config) {
    require_kind(config, SamplerKind::sm);
    if (is_incompatible(SamplerKind::sm, scores.metric_id))
        throw InputError("sampler sm is incompatible with metric " + scores.metric_id);
    validate_scores(scores, corpus.size());
    validate_config(config, corpus.size());
    auto s = empty_schedule(config);
    s.meta.metric_id = scores.metric_id;
    s.meta.corpus_hash = scores.corpus_hash;

    const auto rank = complexity_ranks(scores);
    std::vector<DocId> by_length(corpus.size());
    std::iota(by_length.begin(), by_length.end(), DocId{0});
    std::stable_sort(by_length.begin(), by_length.end(), [&](DocId a, DocId b) {
        return corpus[a].tokens.size() < corpus[b].tokens.size();
    });

    const auto bounds = split_even(by_length.size(), config.batch_size);
    std::vector<std::vector<DocId>> buckets(config.batch_size);
    std::size_t longest = 0;
    for (std::size_t j = 0; j < config.batch_size; ++j) {
        auto& bucket = buckets[j];
        bucket.assign(by_length.begin() + static_cast<std::ptrdiff_t>(bounds[j]),
                      by_length.begin() + static_cast<std::ptrdiff_t>(bounds[j + 1]));
        std::sort(bucket.begin(), bucket.end(), [&](DocId a, DocId b) { return rank[a] < rank[b]; });
        longest = std::max(longest, bucket.size());
    }
    s.batches.resize(longest);
    for (std::size_t i = 0; i < longest; ++i)
        for (const auto& bucket : buckets)
            if (i < bucket.size()) s.batches[i].push_back(bucket[i]);
    return s;
}

Schedule make_random_schedule(const Corpus& corpus, const SamplerConfig& config) {
    require_kind(config, SamplerKind::random);
    validate_config(config, corpus.size());
    auto s = empty_schedule(config);
    s.meta.metric_id = std::string(kNoMetric);
    s.meta.corpus_hash = corpus.hash();
    Rng rng(config.seed);
    const auto n = static_cast<std::uint32_t>(corpus.size());
    s.batches.reserve(config.total_steps);
    for (std::uint32_t t = 0; t < config.total_steps; ++t) s.batches.push_back(sample_distinct(rng, n, config.batch_size));
    return s;
}

bool is_incompatible(SamplerKind kind, std::string_view metric_id) {
    return (kind == SamplerKind::ss || kind == SamplerKind::sm) && metric_id == metric::length;
}

Schedule make_schedule(const Corpus& corpus, const ComplexityScores* scores, const SamplerConfig& config) {
    if (config.kind == SamplerKind::random) return make_random_schedule(corpus, config);
    if (scores == nullptr)
        throw InputError("sampler " + std::string(to_string(config.kind)) + " needs complexity scores");
    if (scores->size() != corpus.size())
        throw ConsistencyError("scores cover " + std::to_string(scores->size()) + " documents, corpus has " +
                               std::to_string(corpus.size()));
    if (is_incompatible(config.kind, scores->metric_id))
        throw InputError("incompatible: sampler " + std::string(to_string(config.kind)) +
                         " cannot be driven by metric " + scores->metric_id);

    Schedule s;
    switch (config.kind) {
        case SamplerKind::cb: s = make_cb_schedule(sort_by_complexity(*scores), config); break;
        case SamplerKind::db: s = make_db_schedule(sort_by_complexity(*scores), config); break;
        case SamplerKind::hyp: s = make_hyp_schedule(sort_by_complexity(*scores), config); break;
        case SamplerKind::ss: s = make_ss_schedule(*scores, config); break;
        case SamplerKind::sm: s = make_sm_schedule(*scores, corpus, config); break;
        case SamplerKind::random: break;
    }
    s.meta.metric_id = scores->metric_id;
    s.meta.corpus_hash = corpus.hash();
    return s;
}

}  // namespace curriculum
