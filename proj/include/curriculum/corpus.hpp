#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace curriculum {

using DocId = std::uint32_t;
using TokenId = std::uint32_t;

struct TokenizerConfig {
    bool lowercase = true;
    std::optional<std::size_t> max_tokens;
};

struct Document {
    DocId id = 0;
    std::vector<std::string> tokens;
    std::optional<int> label;
    std::size_t raw_len = 0;
};

enum class CorpusFormat { lines, tsv, jsonl };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// Whitespace split with punctuation detached into single-character tokens.
/// Bytes >= 0x80 are treated as word characters, so UTF-8 sequences pass
/// through intact.
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& config = {});

class Corpus {
public:
    Corpus() = default;
    Corpus(std::vector<Document> docs, TokenizerConfig config);

    /// Appends a document, assigning the next dense id. Rejects empty
    /// token sequences.
    DocId add(std::vector<std::string> tokens, std::optional<int> label = std::nullopt,
              std::size_t raw_len = 0);

    [[nodiscard]] std::size_t size() const noexcept { return docs_.size(); }
    [[nodiscard]] bool empty() const noexcept { return docs_.empty(); }
    [[nodiscard]] const Document& operator[](std::size_t i) const { return docs_[i]; }
    [[nodiscard]] const std::vector<Document>& documents() const noexcept { return docs_; }
    [[nodiscard]] const TokenizerConfig& tokenizer() const noexcept { return config_; }

    /// Content hash over tokenizer config, tokens and labels (hex, 16 chars).
    [[nodiscard]] std::string hash() const;

    /// Documents [0, count) as a new corpus; ids are unchanged.
    [[nodiscard]] Corpus prefix(std::size_t count) const;

private:
    std::vector<Document> docs_;
    TokenizerConfig config_;
};

struct LoadResult {
    Corpus corpus;
    std::size_t skipped_empty = 0;
};

LoadResult load_corpus(const std::filesystem::path& path, CorpusFormat format,
                       const TokenizerConfig& config = {});

/// Corpus-level frequency and positional tables. Immutable after build.
class CorpusStats {
public:
    static constexpr std::size_t kDefaultMaxPositions = 128;

    [[nodiscard]] std::size_t total_docs() const noexcept { return total_docs_; }
    [[nodiscard]] std::size_t vocab_size() const noexcept { return vocab_.size(); }
    [[nodiscard]] std::uint64_t total_tokens() const noexcept { return total_tokens_; }
    /// Number of positions covered by the positional tables.
    [[nodiscard]] std::size_t positions() const noexcept { return pos_count_.size(); }

    [[nodiscard]] std::optional<TokenId> token_id(std::string_view token) const;
    [[nodiscard]] const std::string& token(TokenId id) const { return vocab_[id]; }

    [[nodiscard]] std::uint64_t count(std::string_view token) const;
    /// 1 = most frequent; 0 when the token is unknown.
    [[nodiscard]] std::uint32_t rank(std::string_view token) const;
    [[nodiscard]] std::uint32_t doc_freq(std::string_view token) const;
    [[nodiscard]] double unigram_prob(std::string_view token) const;

    [[nodiscard]] std::uint64_t count(TokenId id) const { return count_[id]; }
    [[nodiscard]] std::uint32_t rank(TokenId id) const { return rank_[id]; }
    [[nodiscard]] std::uint32_t doc_freq(TokenId id) const { return doc_freq_[id]; }
    [[nodiscard]] double unigram_prob(TokenId id) const;

    /// Fraction of all documents whose token at `pos` is `token`.
    [[nodiscard]] double p(std::size_t pos, std::string_view token) const;
    [[nodiscard]] double p(std::size_t pos, TokenId token) const;
    /// Fraction of all documents with `a` at pos-1 and `b` at pos (pos >= 1).
    [[nodiscard]] double q(std::size_t pos, std::string_view a, std::string_view b) const;
    [[nodiscard]] double q(std::size_t pos, TokenId a, TokenId b) const;

    /// Sparse positional entries at one position, sorted by token id.
    [[nodiscard]] std::vector<std::pair<TokenId, std::uint32_t>> position_entries(std::size_t pos) const;

    [[nodiscard]] const std::string& corpus_hash() const noexcept { return corpus_hash_; }
    [[nodiscard]] const std::vector<std::string>& vocabulary() const noexcept { return vocab_; }

    friend CorpusStats build_stats(const Corpus&, std::size_t);
    friend CorpusStats load_stats(const std::filesystem::path&);
    friend void save_stats(const CorpusStats&, const std::filesystem::path&);
    friend bool operator==(const CorpusStats&, const CorpusStats&);

private:
    static std::uint64_t pair_key(TokenId a, TokenId b) noexcept {
        return (static_cast<std::uint64_t>(a) << 32) | b;
    }

    std::size_t total_docs_ = 0;
    std::uint64_t total_tokens_ = 0;
    std::string corpus_hash_;
    std::vector<std::string> vocab_;  // lexicographically sorted; TokenId indexes it
    std::unordered_map<std::string, TokenId> index_;
    std::vector<std::uint64_t> count_;
    std::vector<std::uint32_t> rank_;
    std::vector<std::uint32_t> doc_freq_;
    std::vector<std::unordered_map<TokenId, std::uint32_t>> pos_count_;
    std::vector<std::unordered_map<std::uint64_t, std::uint32_t>> pair_count_;  // index = pos, pos >= 1
};

/// Builds frequency, rank and positional tables. Positional tables cover
/// positions [0, min(max_doc_len, max_positions)); pass 0 for no cap.
CorpusStats build_stats(const Corpus& corpus,
                        std::size_t max_positions = CorpusStats::kDefaultMaxPositions);

/// Versioned JSON cache. Written sorted so identical stats give identical bytes.
void save_stats(const CorpusStats& stats, const std::filesystem::path& path);
CorpusStats load_stats(const std::filesystem::path& path);

bool operator==(const CorpusStats& a, const CorpusStats& b);

}  // namespace curriculum
