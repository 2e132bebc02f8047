#pragma once

#include "curriculum/corpus.hpp"

#include <cstdint>
#include <filesystem>

namespace curriculum {

/// Labelled sentiment-like corpus: class cue words mixed into Zipfian filler,
/// uniform lengths, balanced labels with a fraction flipped.
struct SyntheticConfig {
    std::size_t docs = 20000;
    std::uint64_t seed = 7;
    std::size_t filler_vocab = 3000;
    std::size_t cue_vocab = 200;  ///< per class
    std::size_t min_len = 4;
    std::size_t max_len = 48;
    double cue_rate = 0.12;
    double label_noise = 0.08;
};

Corpus make_synthetic_corpus(const SyntheticConfig& config);

/// Two-token vocabulary: "good" documents are label 1, "bad" label 0,
/// alternating by id.
Corpus make_separable_corpus(std::size_t docs);

/// Writes label<TAB>text lines, tokens joined by single spaces.
void write_corpus_tsv(const Corpus& corpus, const std::filesystem::path& path);

}  // namespace curriculum
