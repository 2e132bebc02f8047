#pragma once

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace curriculum::cli {

/// manifest.json at the root of a run directory. Records the corpus, every
/// produced file and the invocations that produced them.
class RunManifest {
public:
    explicit RunManifest(std::filesystem::path run_dir);

    [[nodiscard]] const std::filesystem::path& run_dir() const noexcept { return dir_; }

    /// Output paths are relative to the run directory unless absolute.
    [[nodiscard]] std::filesystem::path output(const std::filesystem::path& p) const;
    /// Input paths are tried as given, then relative to the run directory.
    [[nodiscard]] std::filesystem::path input(const std::filesystem::path& p) const;

    void set_corpus(const std::filesystem::path& path, const std::string& format, const std::string& hash,
                    bool lowercase, std::optional<std::size_t> max_tokens);
    [[nodiscard]] const nlohmann::ordered_json* corpus() const;

    void set_stats(const std::filesystem::path& path);
    [[nodiscard]] std::optional<std::filesystem::path> stats() const;

    void add_scores(const std::string& metric, const std::filesystem::path& path);
    [[nodiscard]] std::optional<std::filesystem::path> scores(const std::string& metric) const;

    void add_schedule(const std::filesystem::path& path);
    void add_run(const std::filesystem::path& path);
    void add_table(const std::filesystem::path& path);
    /// Resolved settings of the last run of `command`.
    void set_config(const std::string& command, nlohmann::ordered_json config);
    void add_invocation(const std::vector<std::string>& argv);

    /// Drops references to files that no longer exist, then writes atomically.
    void save(const std::string& version);

private:
    std::string rel(const std::filesystem::path& p) const;
    void add_unique(const char* key, const std::string& value);

    std::filesystem::path dir_;
    nlohmann::ordered_json doc_;
};

}  // namespace curriculum::cli
