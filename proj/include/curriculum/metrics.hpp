#pragma once

#include "curriculum/corpus.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curriculum {

/// Per-document complexity for one metric. Higher = more complex.
struct ComplexityScores {
    std::string metric_id;
    std::vector<double> scores;  // indexed by document id
    std::string corpus_hash;

    [[nodiscard]] std::size_t size() const noexcept { return scores.size(); }
};

namespace metric {
inline constexpr std::string_view length = "length";
inline constexpr std::string_view max_word_rank = "max_word_rank";
inline constexpr std::string_view likelihood_nll = "likelihood_nll";
inline constexpr std::string_view tfidf = "tfidf";
inline constexpr std::string_view external = "external";
inline constexpr std::string_view tse = "tse";
inline constexpr std::string_view ee = "ee";
}  // namespace metric

/// The six internally computable metrics, in report order.
const std::vector<std::string>& builtin_metrics();
bool is_known_metric(std::string_view id);

ComplexityScores score_length(const Corpus& corpus);
ComplexityScores score_max_word_rank(const Corpus& corpus, const CorpusStats& stats);
ComplexityScores score_likelihood(const Corpus& corpus, const CorpusStats& stats);
ComplexityScores score_tfidf(const Corpus& corpus, const CorpusStats& stats);

/// Scores for a single document under the frequency-based metrics; these
/// accept tokens that are absent from `stats`.
double max_word_rank(std::span<const std::string> tokens, const CorpusStats& stats);
double negative_log_likelihood(std::span<const std::string> tokens, const CorpusStats& stats);
double tfidf_max(std::span<const std::string> tokens, const CorpusStats& stats);

/// Dispatches any builtin metric id, including tse and ee.
ComplexityScores score_metric(std::string_view metric_id, const Corpus& corpus, const CorpusStats& stats);

/// Reads {"id": int, "score": float} records. A leading header object with a
/// "metric" key (as written by write_scores) is accepted and skipped.
ComplexityScores load_external_scores(const std::filesystem::path& path, const Corpus& corpus);

/// Header {"metric", "corpus_hash"} followed by one {"id", "score"} per document.
void write_scores(const ComplexityScores& scores, const std::filesystem::path& path);
/// Reads a file produced by write_scores, keeping its metric id.
ComplexityScores read_scores(const std::filesystem::path& path);

/// Ascending by score; ties by ascending id.
std::vector<DocId> sort_by_complexity(const ComplexityScores& scores);

/// Throws unless every score is finite and the size matches `expected_size`.
void validate_scores(const ComplexityScores& scores, std::size_t expected_size);

}  // namespace curriculum
