#pragma once

#include "curriculum/matrix.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace curriculum {

/// Cell rendering for never-reached thresholds and incompatible pairs.
inline constexpr std::string_view kUnreachedMark = "∞";
inline constexpr std::string_view kIncompatibleMark = "-";

std::string format_lr(double lr);

/// metric,sampler,lr,seed,steps_to_threshold,final_accuracy,saturation
std::string results_csv(const std::vector<RunResult>& runs);

/// One row per (lr, metric) with sampler columns; the baseline row fills the
/// baseline column. Cells hold the mean steps-to-threshold over seeds.
std::string table_csv(const std::vector<CellSummary>& cells);
/// Same shape as table_csv, cells hold max - min steps over seeds.
std::string deviation_csv(const std::vector<CellSummary>& cells);
/// Fixed-width console rendering of table_csv.
std::string table_text(const std::vector<CellSummary>& cells);

std::string curve_csv(const TrainingCurve& curve);
/// Accuracy-vs-step plot, one polyline per curve.
std::string curves_svg(const std::string& title, const std::vector<TrainingCurve>& curves);

nlohmann::ordered_json run_to_json(const RunResult& run);
RunResult run_from_json(const nlohmann::json& j);

/// Reads every *.run.json under `dir` (sorted by file name).
std::vector<RunResult> load_runs(const std::filesystem::path& dir);

struct ReportFiles {
    std::filesystem::path results;
    std::filesystem::path table;
    std::filesystem::path deviation;
    std::vector<std::filesystem::path> plots;
};

/// Writes results.csv, table.csv, deviation.csv and plots/*.svg under `out`.
ReportFiles write_report(const std::vector<RunResult>& runs, const std::filesystem::path& out);

}  // namespace curriculum
