#include "curriculum/metrics.hpp"

#include "curriculum/error.hpp"
#include "curriculum/infotheory.hpp"
#include "curriculum/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>

namespace curriculum {

const std::vector<std::string>& builtin_metrics() {
    static const std::vector<std::string> ids{
        std::string(metric::length), std::string(metric::max_word_rank), std::string(metric::likelihood_nll),
        std::string(metric::tfidf),  std::string(metric::tse),           std::string(metric::ee)};
    return ids;
}

bool is_known_metric(std::string_view id) {
    return id == metric::external ||
           std::find(builtin_metrics().begin(), builtin_metrics().end(), id) != builtin_metrics().end();
}

namespace {

ComplexityScores make_scores(std::string_view id, const Corpus& corpus) {
    ComplexityScores s;
    s.metric_id = std::string(id);
    s.corpus_hash = corpus.hash();
    s.scores.resize(corpus.size());
    return s;
}

void require_non_empty(const Corpus& corpus) {
    if (corpus.empty()) throw InputError("cannot score an empty corpus");
}

}  // namespace

ComplexityScores score_length(const Corpus& corpus) {
    require_non_empty(corpus);
    auto s = make_scores(metric::length, corpus);
    for (const auto& d : corpus.documents()) s.scores[d.id] = static_cast<double>(d.tokens.size());
    return s;
}

double max_word_rank(std::span<const std::string> tokens, const CorpusStats& stats) {
    const auto oov = static_cast<std::uint32_t>(stats.vocab_size() + 1);
    std::uint32_t best = 0;
    for (const auto& t : tokens) {
        const auto r = stats.rank(t);
        best = std::max(best, r == 0 ? oov : r);
    }
    return static_cast<double>(best);
}

double negative_log_likelihood(std::span<const std::string> tokens, const CorpusStats& stats) {
    const double oov_prob =
        1.0 / static_cast<double>(stats.total_tokens() + stats.vocab_size() + 1);
    double nll = 0.0;
    for (const auto& t : tokens) {
        const auto id = stats.token_id(t);
        nll -= std::log(id ? stats.unigram_prob(*id) : oov_prob);
    }
    return nll;
}

double tfidf_max(std::span<const std::string> tokens, const CorpusStats& stats) {
    if (tokens.empty()) return 0.0;
    std::map<std::string_view, std::size_t> tf;
    for (const auto& t : tokens) ++tf[t];
    const double n_docs = static_cast<double>(stats.total_docs());
    const double len = static_cast<double>(tokens.size());
    double best = 0.0;
    for (const auto& [tok, c] : tf) {
        const double df = static_cast<double>(stats.doc_freq(tok));
        const double idf = std::log((1.0 + n_docs) / (1.0 + df)) + 1.0;
        best = std::max(best, static_cast<double>(c) / len * idf);
    }
    return best;
}

ComplexityScores score_max_word_rank(const Corpus& corpus, const CorpusStats& stats) {
    require_non_empty(corpus);
    auto s = make_scores(metric::max_word_rank, corpus);
    for (const auto& d : corpus.documents()) s.scores[d.id] = max_word_rank(d.tokens, stats);
    return s;
}

ComplexityScores score_likelihood(const Corpus& corpus, const CorpusStats& stats) {
    require_non_empty(corpus);
    auto s = make_scores(metric::likelihood_nll, corpus);
    for (const auto& d : corpus.documents()) s.scores[d.id] = negative_log_likelihood(d.tokens, stats);
    return s;
}

ComplexityScores score_tfidf(const Corpus& corpus, const CorpusStats& stats) {
    require_non_empty(corpus);
    auto s = make_scores(metric::tfidf, corpus);
    for (const auto& d : corpus.documents()) s.scores[d.id] = tfidf_max(d.tokens, stats);
    return s;
}

ComplexityScores score_metric(std::string_view metric_id, const Corpus& corpus, const CorpusStats& stats) {
    if (metric_id == metric::length) return score_length(corpus);
    if (metric_id == metric::max_word_rank) return score_max_word_rank(corpus, stats);
    if (metric_id == metric::likelihood_nll) return score_likelihood(corpus, stats);
    if (metric_id == metric::tfidf) return score_tfidf(corpus, stats);
    if (metric_id == metric::tse) return score_infotheoretic(corpus, stats, InfoMeasure::tse);
    if (metric_id == metric::ee) return score_infotheoretic(corpus, stats, InfoMeasure::ee);
    if (metric_id == metric::external)
        throw InputError("metric \"external\" is loaded from a score file, not computed");
    throw InputError("unknown metric: " + std::string(metric_id));
}

void validate_scores(const ComplexityScores& scores, std::size_t expected_size) {
    if (scores.scores.size() != expected_size)
        throw ConsistencyError("score count " + std::to_string(scores.scores.size()) +
                               " does not match corpus size " + std::to_string(expected_size));
    for (std::size_t i = 0; i < scores.scores.size(); ++i)
        if (!std::isfinite(scores.scores[i]))
            throw ConsistencyError("non-finite score for document " + std::to_string(i));
}

namespace {

std::optional<double> parse_score_value(const nlohmann::json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto& s = v.get_ref<const std::string&>();
        char* end = nullptr;
        const double d = std::strtod(s.c_str(), &end);
        if (end != s.c_str() && *end == '\0') return d;
    }
    return std::nullopt;
}

struct ScoreFile {
    std::optional<std::string> metric;
    std::optional<std::string> corpus_hash;
    std::vector<std::optional<double>> values;
};

// Parses records; `expected` bounds ids when known.
ScoreFile parse_score_file(const std::filesystem::path& path, std::optional<std::size_t> expected) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open score file: " + path.string());
    ScoreFile out;
    if (expected) out.values.resize(*expected);
    std::string line;
    std::size_t lineno = 0;
    bool seen_record = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = path.string() + ":" + std::to_string(lineno);
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw InputError(where + ": invalid JSON record");
        }
        if (!rec.is_object()) throw InputError(where + ": record is not an object");
        if (rec.contains("metric")) {
            if (seen_record || out.metric) throw InputError(where + ": header must be the first record");
            out.metric = rec["metric"].get<std::string>();
            if (rec.contains("corpus_hash")) out.corpus_hash = rec["corpus_hash"].get<std::string>();
            continue;
        }
        seen_record = true;
        if (!rec.contains("id") || !rec["id"].is_number_integer())
            throw InputError(where + ": missing integer \"id\"");
        const auto id = rec["id"].get<long long>();
        if (id < 0) throw InputError(where + ": negative id " + std::to_string(id));
        if (expected && static_cast<std::size_t>(id) >= *expected)
            throw InputError(where + ": id " + std::to_string(id) + " is outside the corpus");
        if (!expected && static_cast<std::size_t>(id) >= out.values.size())
            out.values.resize(static_cast<std::size_t>(id) + 1);
        if (!rec.contains("score")) throw InputError(where + ": missing \"score\" for document " + std::to_string(id));
        const auto value = parse_score_value(rec["score"]);
        if (!value || !std::isfinite(*value))
            throw InputError(where + ": non-finite score for document " + std::to_string(id));
        auto& slot = out.values[static_cast<std::size_t>(id)];
        if (slot) throw InputError(where + ": duplicate score for document " + std::to_string(id));
        slot = *value;
    }
    for (std::size_t i = 0; i < out.values.size(); ++i)
        if (!out.values[i]) throw InputError("missing score for document " + std::to_string(i));
    return out;
}

}  // namespace

ComplexityScores load_external_scores(const std::filesystem::path& path, const Corpus& corpus) {
    auto file = parse_score_file(path, corpus.size());
    ComplexityScores s;
    s.metric_id = std::string(metric::external);
    s.corpus_hash = corpus.hash();
    s.scores.reserve(file.values.size());
    for (const auto& v : file.values) s.scores.push_back(*v);
    return s;
}

ComplexityScores read_scores(const std::filesystem::path& path) {
    auto file = parse_score_file(path, std::nullopt);
    if (!file.metric) throw InputError(path.string() + ": missing header record");
    ComplexityScores s;
    s.metric_id = *file.metric;
    s.corpus_hash = file.corpus_hash.value_or("");
    for (const auto& v : file.values) s.scores.push_back(*v);
    return s;
}

void write_scores(const ComplexityScores& scores, const std::filesystem::path& path) {
    validate_scores(scores, scores.size());
    std::string out;
    nlohmann::ordered_json header;
    header["metric"] = scores.metric_id;
    header["corpus_hash"] = scores.corpus_hash;
    out += header.dump() + "\n";
    for (std::size_t i = 0; i < scores.size(); ++i) {
        nlohmann::ordered_json rec;
        rec["id"] = i;
        rec["score"] = scores.scores[i];
        out += rec.dump() + "\n";
    }
    detail::write_file_atomic(path, out);
}

std::vector<DocId> sort_by_complexity(const ComplexityScores& scores) {
    std::vector<DocId> order(scores.size());
    std::iota(order.begin(), order.end(), DocId{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](DocId a, DocId b) { return scores.scores[a] < scores.scores[b]; });
    return order;
}

}  // namespace curriculum
