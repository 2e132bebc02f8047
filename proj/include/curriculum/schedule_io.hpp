#pragma once

#include "curriculum/corpus.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/samplers.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace curriculum {

/// A corpus the loader can check ids against when hashes match.
struct KnownCorpus {
    std::string hash;
    std::size_t size = 0;
};

/// JSON Lines: header {"sampler","metric","batch_size","total_steps","seed",
/// "corpus_hash"} then {"step","ids"} per batch. Identical schedules give
/// identical bytes. Written via temp file + rename.
void write_schedule(const Schedule& schedule, const std::filesystem::path& path);
std::string serialize_schedule(const Schedule& schedule);

Schedule load_schedule(const std::filesystem::path& path, std::optional<KnownCorpus> known = std::nullopt);
Schedule parse_schedule(std::string_view text, std::optional<KnownCorpus> known = std::nullopt);

/// Re-checks the Schedule invariants; throws ConsistencyError naming the
/// offending step.
void validate_schedule(const Schedule& schedule, std::optional<std::size_t> corpus_size = std::nullopt);

struct ScheduleStatsRow {
    std::size_t step = 0;
    double mean_complexity = 0.0;
    double mean_rank = 0.0;  ///< mean position in the complexity order
    double mean_length = 0.0;
    std::size_t batch_count = 0;  ///< documents in the batch
};

std::vector<ScheduleStatsRow> schedule_stats(const Schedule& schedule, const ComplexityScores& scores,
                                             const Corpus& corpus);
std::string schedule_stats_csv(const std::vector<ScheduleStatsRow>& rows);

}  // namespace curriculum
