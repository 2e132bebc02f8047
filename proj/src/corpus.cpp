#include "curriculum/corpus.hpp"

#include "curriculum/error.hpp"
#include "curriculum/hashing.hpp"
#include "curriculum/io_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <system_error>
#include <unordered_set>

namespace curriculum {

namespace detail {

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot open for writing: " + tmp.string());
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("write failed: " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw Error("cannot rename into place: " + path.string());
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace detail

std::string Fnv1a::hex() const { return to_hex(state_); }

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

CorpusFormat parse_corpus_format(std::string_view name) {
    if (name == "lines") return CorpusFormat::lines;
    if (name == "tsv") return CorpusFormat::tsv;
    if (name == "jsonl") return CorpusFormat::jsonl;
    throw InputError("unknown corpus format: " + std::string(name));
}

std::string_view to_string(CorpusFormat format) {
    switch (format) {
        case CorpusFormat::lines: return "lines";
        case CorpusFormat::tsv: return "tsv";
        case CorpusFormat::jsonl: return "jsonl";
    }
    return "?";
}

namespace {

bool is_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

std::size_t utf8_length(std::string_view s) {
    return static_cast<std::size_t>(
        std::count_if(s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config) {
    std::vector<std::string> out;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            out.push_back(std::move(current));
            current.clear();
        }
    };
    for (char ch : text) {
        const auto c = static_cast<unsigned char>(ch);
        if (is_space(c)) {
            flush();
        } else if (is_punct(c)) {
            flush();
            out.emplace_back(1, ch);
        } else {
            current.push_back(config.lowercase && c < 0x80 ? static_cast<char>(std::tolower(c)) : ch);
        }
    }
    flush();
    if (config.max_tokens && out.size() > *config.max_tokens) out.resize(*config.max_tokens);
    return out;
}

Corpus::Corpus(std::vector<Document> docs, TokenizerConfig config)
    : docs_(std::move(docs)), config_(config) {
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        if (docs_[i].id != i) throw ConsistencyError("document ids must be dense 0..N-1");
        if (docs_[i].tokens.empty()) throw InputError("document " + std::to_string(i) + " has no tokens");
    }
}

DocId Corpus::add(std::vector<std::string> tokens, std::optional<int> label, std::size_t raw_len) {
    if (tokens.empty()) throw InputError("document has no tokens");
    Document d;
    d.id = static_cast<DocId>(docs_.size());
    d.tokens = std::move(tokens);
    d.label = label;
    d.raw_len = raw_len;
    docs_.push_back(std::move(d));
    return docs_.back().id;
}

std::string Corpus::hash() const {
    Fnv1a h;
    h.update(config_.lowercase ? "lc1" : "lc0");
    h.update_u64(config_.max_tokens.value_or(0));
    h.update_u64(docs_.size());
    for (const auto& d : docs_) {
        h.update(d.label ? "L" + std::to_string(*d.label) : std::string("U"));
        for (const auto& t : d.tokens) {
            h.update(t);
            h.update("\x1f");
        }
        h.update("\x1e");
    }
    return h.hex();
}

Corpus Corpus::prefix(std::size_t count) const {
    count = std::min(count, docs_.size());
    return Corpus(std::vector<Document>(docs_.begin(), docs_.begin() + static_cast<std::ptrdiff_t>(count)), config_);
}

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format, const TokenizerConfig& config) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file: " + path.string());

    LoadResult result;
    result.corpus = Corpus({}, config);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string_view text = line;
        std::optional<int> label;
        std::string json_text;

        if (format == CorpusFormat::tsv) {
            if (line.empty()) {
                ++result.skipped_empty;
                continue;
            }
            const auto tab = line.find('\t');
            if (tab == std::string::npos)
                throw InputError("line " + std::to_string(lineno) + ": expected label<TAB>text");
            int value = 0;
            const auto* first = line.data();
            const auto* last = line.data() + tab;
            auto [ptr, ec] = std::from_chars(first, last, value);
            if (ec != std::errc{} || ptr != last)
                throw InputError("line " + std::to_string(lineno) + ": label is not an integer");
            label = value;
            text = std::string_view(line).substr(tab + 1);
        } else if (format == CorpusFormat::jsonl) {
            if (line.find_first_not_of(" \t") == std::string::npos) {
                ++result.skipped_empty;
                continue;
            }
            nlohmann::json rec;
            try {
                rec = nlohmann::json::parse(line);
            } catch (const nlohmann::json::parse_error&) {
                throw InputError("line " + std::to_string(lineno) + ": invalid JSON");
            }
            if (!rec.is_object() || !rec.contains("text") || !rec["text"].is_string())
                throw InputError("line " + std::to_string(lineno) + ": missing string field \"text\"");
            if (rec.contains("label") && !rec["label"].is_null()) {
                if (!rec["label"].is_number_integer())
                    throw InputError("line " + std::to_string(lineno) + ": \"label\" must be an integer");
                label = rec["label"].get<int>();
            }
            json_text = rec["text"].get<std::string>();
            text = json_text;
        }

        auto tokens = tokenize(text, config);
        if (tokens.empty()) {
            ++result.skipped_empty;
            continue;
        }
        result.corpus.add(std::move(tokens), label, utf8_length(text));
    }
    return result;
}

// ---------------------------------------------------------------------------
// CorpusStats

std::optional<TokenId> CorpusStats::token_id(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::uint64_t CorpusStats::count(std::string_view token) const {
    auto id = token_id(token);
    return id ? count_[*id] : 0;
}

std::uint32_t CorpusStats::rank(std::string_view token) const {
    auto id = token_id(token);
    return id ? rank_[*id] : 0;
}

std::uint32_t CorpusStats::doc_freq(std::string_view token) const {
    auto id = token_id(token);
    return id ? doc_freq_[*id] : 0;
}

double CorpusStats::unigram_prob(TokenId id) const {
    return static_cast<double>(count_[id]) / static_cast<double>(total_tokens_);
}

double CorpusStats::unigram_prob(std::string_view token) const {
    auto id = token_id(token);
    return id ? unigram_prob(*id) : 0.0;
}

double CorpusStats::p(std::size_t pos, TokenId token) const {
    if (pos >= pos_count_.size()) return 0.0;
    const auto& m = pos_count_[pos];
    auto it = m.find(token);
    return it == m.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_docs_);
}

double CorpusStats::p(std::size_t pos, std::string_view token) const {
    auto id = token_id(token);
    return id ? p(pos, *id) : 0.0;
}

double CorpusStats::q(std::size_t pos, TokenId a, TokenId b) const {
    if (pos == 0 || pos >= pair_count_.size()) return 0.0;
    const auto& m = pair_count_[pos];
    auto it = m.find(pair_key(a, b));
    return it == m.end() ? 0.0 : static_cast<double>(it->second) / static_cast<double>(total_docs_);
}

double CorpusStats::q(std::size_t pos, std::string_view a, std::string_view b) const {
    auto ia = token_id(a);
    auto ib = token_id(b);
    return ia && ib ? q(pos, *ia, *ib) : 0.0;
}

std::vector<std::pair<TokenId, std::uint32_t>> CorpusStats::position_entries(std::size_t pos) const {
    std::vector<std::pair<TokenId, std::uint32_t>> out;
    if (pos >= pos_count_.size()) return out;
    out.assign(pos_count_[pos].begin(), pos_count_[pos].end());
    std::sort(out.begin(), out.end());
    return out;
}

CorpusStats build_stats(const Corpus& corpus, std::size_t max_positions) {
    if (corpus.empty()) throw InputError("cannot build stats for an empty corpus");

    CorpusStats s;
    s.total_docs_ = corpus.size();
    s.corpus_hash_ = corpus.hash();

    std::unordered_map<std::string, std::uint64_t> counts;
    std::size_t max_len = 0;
    for (const auto& d : corpus.documents()) {
        for (const auto& t : d.tokens) ++counts[t];
        max_len = std::max(max_len, d.tokens.size());
        s.total_tokens_ += d.tokens.size();
    }

    s.vocab_.reserve(counts.size());
    for (const auto& [tok, _] : counts) s.vocab_.push_back(tok);
    std::sort(s.vocab_.begin(), s.vocab_.end());
    s.index_.reserve(s.vocab_.size());
    s.count_.resize(s.vocab_.size());
    for (TokenId i = 0; i < s.vocab_.size(); ++i) {
        s.index_.emplace(s.vocab_[i], i);
        s.count_[i] = counts[s.vocab_[i]];
    }

    // Vocabulary ids already follow lexicographic order, so a stable sort on
    // count alone gives the lexicographic tie-break.
    std::vector<TokenId> by_freq(s.vocab_.size());
    std::iota(by_freq.begin(), by_freq.end(), 0);
    std::stable_sort(by_freq.begin(), by_freq.end(),
                     [&](TokenId a, TokenId b) { return s.count_[a] > s.count_[b]; });
    s.rank_.resize(s.vocab_.size());
    for (std::size_t r = 0; r < by_freq.size(); ++r) s.rank_[by_freq[r]] = static_cast<std::uint32_t>(r + 1);

    const std::size_t positions = max_positions == 0 ? max_len : std::min(max_len, max_positions);
    s.doc_freq_.assign(s.vocab_.size(), 0);
    s.pos_count_.resize(positions);
    s.pair_count_.resize(positions);

    std::vector<TokenId> ids;
    std::vector<TokenId> distinct;
    for (const auto& d : corpus.documents()) {
        ids.clear();
        for (const auto& t : d.tokens) ids.push_back(s.index_.at(t));
        distinct = ids;
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        for (TokenId t : distinct) ++s.doc_freq_[t];

        const std::size_t n = std::min(ids.size(), positions);
        for (std::size_t i = 0; i < n; ++i) {
            ++s.pos_count_[i][ids[i]];
            if (i > 0) ++s.pair_count_[i][CorpusStats::pair_key(ids[i - 1], ids[i])];
        }
    }
    return s;
}

bool operator==(const CorpusStats& a, const CorpusStats& b) {
    return a.total_docs_ == b.total_docs_ && a.total_tokens_ == b.total_tokens_ &&
           a.corpus_hash_ == b.corpus_hash_ && a.vocab_ == b.vocab_ && a.count_ == b.count_ &&
           a.rank_ == b.rank_ && a.doc_freq_ == b.doc_freq_ && a.pos_count_ == b.pos_count_ &&
           a.pair_count_ == b.pair_count_;
}

namespace {
constexpr int kStatsVersion = 1;
}

void save_stats(const CorpusStats& stats, const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["format"] = "curriculum-stats";
    j["version"] = kStatsVersion;
    j["corpus_hash"] = stats.corpus_hash();
    j["total_docs"] = stats.total_docs();
    j["total_tokens"] = stats.total_tokens();
    j["vocab"] = stats.vocabulary();
    auto& counts = j["count"] = nlohmann::ordered_json::array();
    auto& dfs = j["doc_freq"] = nlohmann::ordered_json::array();
    for (TokenId i = 0; i < stats.vocab_size(); ++i) {
        counts.push_back(stats.count(i));
        dfs.push_back(stats.doc_freq(i));
    }
    auto& positions = j["positions"] = nlohmann::ordered_json::array();
    auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
    for (std::size_t pos = 0; pos < stats.positions(); ++pos) {
        auto row = nlohmann::ordered_json::array();
        for (const auto& [tok, c] : stats.position_entries(pos)) row.push_back({tok, c});
        positions.push_back(std::move(row));
    }
    for (std::size_t pos = 0; pos < stats.positions(); ++pos) {
        auto row = nlohmann::ordered_json::array();
        if (pos > 0) {
            const auto& m = stats.pair_count_[pos];
            std::vector<std::pair<std::uint64_t, std::uint32_t>> sorted(m.begin(), m.end());
            std::sort(sorted.begin(), sorted.end());
            for (const auto& [key, c] : sorted)
                row.push_back({static_cast<TokenId>(key >> 32), static_cast<TokenId>(key & 0xffffffffu), c});
        }
        pairs.push_back(std::move(row));
    }
    detail::write_file_atomic(path, j.dump() + "\n");
}

CorpusStats load_stats(const std::filesystem::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(detail::read_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw InputError("invalid stats cache " + path.string() + ": " + e.what());
    }
    if (j.value("format", "") != "curriculum-stats" || j.value("version", 0) != kStatsVersion)
        throw InputError("unsupported stats cache version: " + path.string());
    try {
        CorpusStats s;
        s.corpus_hash_ = j.at("corpus_hash").get<std::string>();
        s.total_docs_ = j.at("total_docs").get<std::size_t>();
        s.total_tokens_ = j.at("total_tokens").get<std::uint64_t>();
        s.vocab_ = j.at("vocab").get<std::vector<std::string>>();
        s.count_ = j.at("count").get<std::vector<std::uint64_t>>();
        s.doc_freq_ = j.at("doc_freq").get<std::vector<std::uint32_t>>();
        if (s.count_.size() != s.vocab_.size() || s.doc_freq_.size() != s.vocab_.size())
            throw InputError("stats cache tables disagree in size: " + path.string());
        for (TokenId i = 0; i < s.vocab_.size(); ++i) s.index_.emplace(s.vocab_[i], i);

        std::vector<TokenId> by_freq(s.vocab_.size());
        std::iota(by_freq.begin(), by_freq.end(), 0);
        std::stable_sort(by_freq.begin(), by_freq.end(),
                         [&](TokenId a, TokenId b) { return s.count_[a] > s.count_[b]; });
        s.rank_.resize(s.vocab_.size());
        for (std::size_t r = 0; r < by_freq.size(); ++r) s.rank_[by_freq[r]] = static_cast<std::uint32_t>(r + 1);

        for (const auto& row : j.at("positions")) {
            auto& m = s.pos_count_.emplace_back();
            for (const auto& e : row) m.emplace(e.at(0).get<TokenId>(), e.at(1).get<std::uint32_t>());
        }
        for (const auto& row : j.at("pairs")) {
            auto& m = s.pair_count_.emplace_back();
            for (const auto& e : row)
                m.emplace(CorpusStats::pair_key(e.at(0).get<TokenId>(), e.at(1).get<TokenId>()),
                          e.at(2).get<std::uint32_t>());
        }
        if (s.pair_count_.size() != s.pos_count_.size())
            throw InputError("stats cache positional tables disagree in size: " + path.string());
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed stats cache " + path.string() + ": " + e.what());
    }
}

}  // namespace curriculum
