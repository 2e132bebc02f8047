#include "run_manifest.hpp"

#include "curriculum/error.hpp"
#include "curriculum/io_util.hpp"

#include <ctime>

namespace fs = std::filesystem;

namespace curriculum::cli {

RunManifest::RunManifest(fs::path run_dir) : dir_(std::move(run_dir)) {
    const auto path = dir_ / "manifest.json";
    if (fs::exists(path)) {
        try {
            doc_ = nlohmann::ordered_json::parse(detail::read_file(path));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(path.string() + ": " + e.what());
        }
    }
    if (!doc_.is_object()) doc_ = nlohmann::ordered_json::object();
}

fs::path RunManifest::output(const fs::path& p) const { return p.is_absolute() ? p : dir_ / p; }

fs::path RunManifest::input(const fs::path& p) const {
    if (p.is_absolute() || fs::exists(p)) return p;
    if (fs::exists(dir_ / p)) return dir_ / p;
    return p;
}

std::string RunManifest::rel(const fs::path& p) const {
    const auto abs = fs::absolute(p).lexically_normal();
    const auto base = fs::absolute(dir_).lexically_normal();
    const auto r = abs.lexically_relative(base);
    if (!r.empty() && *r.begin() != "..") return r.generic_string();
    return abs.generic_string();
}

void RunManifest::set_corpus(const fs::path& path, const std::string& format, const std::string& hash,
                             bool lowercase, std::optional<std::size_t> max_tokens) {
    nlohmann::ordered_json c;
    c["path"] = rel(path);
    c["format"] = format;
    c["hash"] = hash;
    c["lowercase"] = lowercase;
    c["max_tokens"] = max_tokens ? nlohmann::ordered_json(*max_tokens) : nlohmann::ordered_json(nullptr);
    doc_["corpus"] = c;
}

const nlohmann::ordered_json* RunManifest::corpus() const {
    auto it = doc_.find("corpus");
    return it == doc_.end() ? nullptr : &*it;
}

void RunManifest::set_stats(const fs::path& path) { doc_["stats"] = rel(path); }

std::optional<fs::path> RunManifest::stats() const {
    if (!doc_.contains("stats")) return std::nullopt;
    return input(doc_["stats"].get<std::string>());
}

void RunManifest::add_scores(const std::string& metric, const fs::path& path) { doc_["scores"][metric] = rel(path); }

std::optional<fs::path> RunManifest::scores(const std::string& metric) const {
    if (!doc_.contains("scores") || !doc_["scores"].contains(metric)) return std::nullopt;
    return input(doc_["scores"][metric].get<std::string>());
}

void RunManifest::add_unique(const char* key, const std::string& value) {
    auto& arr = doc_[key];
    if (!arr.is_array()) arr = nlohmann::ordered_json::array();
    for (const auto& v : arr)
        if (v == value) return;
    arr.push_back(value);
}

void RunManifest::add_schedule(const fs::path& path) { add_unique("schedules", rel(path)); }
void RunManifest::add_run(const fs::path& path) { add_unique("runs", rel(path)); }
void RunManifest::add_table(const fs::path& path) { add_unique("tables", rel(path)); }

void RunManifest::set_config(const std::string& command, nlohmann::ordered_json config) {
    doc_["config"][command] = std::move(config);
}

void RunManifest::add_invocation(const std::vector<std::string>& argv) {
    auto& arr = doc_["invocations"];
    if (!arr.is_array()) arr = nlohmann::ordered_json::array();
    nlohmann::ordered_json entry;
    entry["cwd"] = fs::current_path().generic_string();
    entry["args"] = argv;
    for (const auto& v : arr)
        if (v == entry) return;
    arr.push_back(entry);
}

void RunManifest::save(const std::string& version) {
    auto exists = [&](const nlohmann::ordered_json& v) { return v.is_string() && fs::exists(input(v.get<std::string>())); };
    for (const char* key : {"schedules", "runs", "tables"}) {
        if (!doc_.contains(key)) continue;
        nlohmann::ordered_json kept = nlohmann::ordered_json::array();
        for (const auto& v : doc_[key])
            if (exists(v)) kept.push_back(v);
        doc_[key] = kept;
    }
    if (doc_.contains("scores")) {
        nlohmann::ordered_json kept = nlohmann::ordered_json::object();
        for (const auto& [k, v] : doc_["scores"].items())
            if (exists(v)) kept[k] = v;
        doc_["scores"] = kept;
    }
    if (doc_.contains("stats") && !exists(doc_["stats"])) doc_.erase("stats");
    if (doc_.contains("corpus") && !exists(doc_["corpus"]["path"])) doc_.erase("corpus");

    nlohmann::ordered_json out;
    out["tool"] = "curriculum";
    out["version"] = version;
    const std::time_t now = std::time(nullptr);
    std::tm utc{};
    gmtime_r(&now, &utc);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &utc);
    out["updated"] = stamp;
    for (const auto& [k, v] : doc_.items())
        if (k != "tool" && k != "version" && k != "updated") out[k] = v;
    doc_ = out;
    fs::create_directories(dir_);
    detail::write_file_atomic(dir_ / "manifest.json", doc_.dump(2) + "\n");
}

}  // namespace curriculum::cli
