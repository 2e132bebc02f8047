#include "curriculum/synthetic.hpp"

#include "curriculum/error.hpp"
#include "curriculum/random.hpp"
#include "curriculum/io_util.hpp"

#include <cmath>
#include <numeric>

namespace curriculum {

namespace {

std::vector<double> zipf_cumulative(std::size_t n, double exponent) {
    std::vector<double> w(n);
    for (std::size_t k = 0; k < n; ++k) w[k] = 1.0 / std::pow(static_cast<double>(k + 1), exponent);
    std::partial_sum(w.begin(), w.end(), w.begin());
    return w;
}

}  // namespace

Corpus make_synthetic_corpus(const SyntheticConfig& config) {
    if (config.docs == 0 || config.min_len == 0 || config.max_len < config.min_len || config.filler_vocab == 0 ||
        config.cue_vocab == 0)
        throw InputError("invalid synthetic corpus configuration");
    Rng rng(config.seed);
    const auto filler = zipf_cumulative(config.filler_vocab, 1.05);
    const auto cues = zipf_cumulative(config.cue_vocab, 1.0);

    Corpus corpus({}, TokenizerConfig{});
    for (std::size_t i = 0; i < config.docs; ++i) {
        const int label = static_cast<int>(rng.below(2));
        const std::size_t len = config.min_len + rng.below(config.max_len - config.min_len + 1);
        std::vector<std::string> tokens;
        tokens.reserve(len);
        std::size_t raw = 0;
        for (std::size_t k = 0; k < len; ++k) {
            std::string tok = rng.unit() < config.cue_rate
                                  ? (label ? "pos" : "neg") + std::to_string(rng.pick(cues))
                                  : "w" + std::to_string(rng.pick(filler));
            raw += tok.size() + (k > 0 ? 1 : 0);
            tokens.push_back(std::move(tok));
        }
        const bool flip = rng.unit() < config.label_noise;
        corpus.add(std::move(tokens), flip ? 1 - label : label, raw);
    }
    return corpus;
}

Corpus make_separable_corpus(std::size_t docs) {
    Corpus corpus({}, TokenizerConfig{});
    for (std::size_t i = 0; i < docs; ++i) {
        const int label = static_cast<int>(i % 2);
        corpus.add({label ? "good" : "bad"}, label, label ? 4 : 3);
    }
    return corpus;
}

void write_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path) {
    std::string out;
    for (const auto& d : corpus.documents()) {
        if (!d.label) throw InputError("write_corpus_tsv: document " + std::to_string(d.id) + " has no label");
        out += std::to_string(*d.label) + "\t";
        for (std::size_t k = 0; k < d.tokens.size(); ++k) {
            if (k) out += ' ';
            out += d.tokens[k];
        }
        out += "\n";
    }
    detail::write_file_atomic(path, out);
}

}  // namespace curriculum
