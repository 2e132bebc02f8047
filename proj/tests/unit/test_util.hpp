#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/random.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace testutil {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("curriculum_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    [[nodiscard]] const std::filesystem::path& path() const { return path_; }
    std::filesystem::path write(const std::string& name, const std::string& contents) const {
        auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << contents;
        return p;
    }

private:
    std::filesystem::path path_;
};

inline curriculum::Corpus corpus_of(const std::vector<std::string>& texts) {
    curriculum::Corpus c({}, {});
    for (const auto& t : texts) c.add(curriculum::tokenize(t));
    return c;
}

inline curriculum::Corpus labelled_corpus_of(const std::vector<std::pair<int, std::string>>& rows) {
    curriculum::Corpus c({}, {});
    for (const auto& [label, t] : rows) c.add(curriculum::tokenize(t), label);
    return c;
}

// Random corpus over a small vocabulary so positional collisions are common.
inline curriculum::Corpus random_corpus(curriculum::Rng& rng, std::size_t docs, std::size_t vocab,
                                        std::size_t max_len) {
    curriculum::Corpus c({}, {});
    for (std::size_t i = 0; i < docs; ++i) {
        const std::size_t len = 1 + rng.below(max_len);
        std::vector<std::string> toks;
        for (std::size_t k = 0; k < len; ++k) toks.push_back("t" + std::to_string(rng.below(vocab)));
        c.add(std::move(toks), static_cast<int>(rng.below(2)));
    }
    return c;
}

}  // namespace testutil
