#include "curriculum/report.hpp"

#include "curriculum/error.hpp"
#include "curriculum/io_util.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

namespace curriculum {

namespace {

std::string fmt(const char* pattern, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string steps_cell(const CellSummary& c) {
    switch (c.status) {
        case RunStatus::incompatible: return std::string(kIncompatibleMark);
        case RunStatus::unreached: return std::string(kUnreachedMark);
        case RunStatus::failed: return "failed";
        case RunStatus::ok: return fmt("%.1f", *c.mean_steps);
    }
    return "";
}

std::string deviation_cell(const CellSummary& c) {
    switch (c.status) {
        case RunStatus::incompatible: return std::string(kIncompatibleMark);
        case RunStatus::unreached: return std::string(kUnreachedMark);
        case RunStatus::failed: return "failed";
        case RunStatus::ok: return fmt("%.1f", *c.max_deviation);
    }
    return "";
}

struct TableRow {
    double lr;
    std::string metric;
    double threshold = 0.0;
    double accuracy = 0.0;
    std::size_t measured = 0;
    std::map<std::string, std::string> cells;  // column -> text
};

std::vector<std::string> table_columns() {
    std::vector<std::string> cols{"baseline"};
    for (auto k : curriculum_samplers()) cols.emplace_back(to_string(k));
    return cols;
}

// Rows ordered by lr (descending), baseline first, then metrics in first-seen order.
std::vector<TableRow> build_rows(const std::vector<CellSummary>& cells,
                                 std::string (*render)(const CellSummary&)) {
    std::vector<double> lrs;
    for (const auto& c : cells)
        if (std::find(lrs.begin(), lrs.end(), c.learning_rate) == lrs.end()) lrs.push_back(c.learning_rate);
    std::sort(lrs.begin(), lrs.end(), std::greater<>());

    std::vector<TableRow> rows;
    for (double lr : lrs) {
        std::vector<std::string> metrics{std::string(kBaselineMetric)};
        for (const auto& c : cells)
            if (c.learning_rate == lr && std::find(metrics.begin(), metrics.end(), c.metric) == metrics.end())
                metrics.push_back(c.metric);
        for (const auto& m : metrics) {
            TableRow row{lr, m, 0.0, 0.0, 0, {}};
            for (const auto& c : cells) {
                if (c.learning_rate != lr || c.metric != m) continue;
                const std::string col = m == kBaselineMetric ? "baseline" : std::string(to_string(c.sampler));
                row.cells[col] = render(c);
                if (c.status == RunStatus::ok || c.status == RunStatus::unreached) {
                    row.threshold += c.mean_threshold;
                    row.accuracy += c.mean_saturation;
                    ++row.measured;
                }
            }
            if (row.cells.empty()) continue;
            if (row.measured > 0) {
                row.threshold /= static_cast<double>(row.measured);
                row.accuracy /= static_cast<double>(row.measured);
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string rows_csv(const std::vector<TableRow>& rows) {
    const auto cols = table_columns();
    std::string out = "lr,metric,threshold,accuracy,aggregate";
    for (const auto& c : cols) out += "," + c;
    out += "\n";
    for (const auto& r : rows) {
        out += format_lr(r.lr) + "," + r.metric + ",";
        out += r.measured ? fmt("%.4f", r.threshold) + "," + fmt("%.4f", r.accuracy) : std::string(",");
        out += ",mean";
        for (const auto& c : cols) {
            out += ",";
            if (auto it = r.cells.find(c); it != r.cells.end()) out += it->second;
        }
        out += "\n";
    }
    return out;
}

std::string csv_steps(const std::optional<std::size_t>& s) {
    return s ? std::to_string(*s) : std::string(kUnreachedMark);
}

}  // namespace

std::string format_lr(double lr) { return fmt("%g", lr); }

std::string results_csv(const std::vector<RunResult>& runs) {
    std::string out = "metric,sampler,lr,seed,steps_to_threshold,final_accuracy,saturation\n";
    for (const auto& r : runs) {
        out += r.metric + "," + std::string(to_string(r.sampler)) + "," + format_lr(r.learning_rate) + "," +
               std::to_string(r.seed) + ",";
        switch (r.status) {
            case RunStatus::incompatible: out += "-,-,-"; break;
            case RunStatus::failed: out += "failed,,"; break;
            default:
                out += csv_steps(r.steps) + "," + fmt("%.6f", r.final_accuracy) + "," + fmt("%.6f", r.saturation);
        }
        out += "\n";
    }
    return out;
}

std::string table_csv(const std::vector<CellSummary>& cells) { return rows_csv(build_rows(cells, steps_cell)); }

std::string deviation_csv(const std::vector<CellSummary>& cells) {
    return rows_csv(build_rows(cells, deviation_cell));
}

std::string table_text(const std::vector<CellSummary>& cells) {
    const auto rows = build_rows(cells, steps_cell);
    const auto cols = table_columns();
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-8s %-16s %9s %9s", "lr", "metric", "threshold", "accuracy");
    out += buf;
    for (const auto& c : cols) {
        std::snprintf(buf, sizeof buf, " %10s", c.c_str());
        out += buf;
    }
    out += "\n";
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%-8s %-16s %9s %9s", format_lr(r.lr).c_str(), r.metric.c_str(),
                      r.measured ? fmt("%.4f", r.threshold).c_str() : "", r.measured ? fmt("%.4f", r.accuracy).c_str() : "");
        out += buf;
        for (const auto& c : cols) {
            auto it = r.cells.find(c);
            std::string cell = it == r.cells.end() ? "" : it->second;
            // "∞" is one column wide but three bytes.
            const int pad = 10 - static_cast<int>(cell == kUnreachedMark ? 1 : cell.size());
            out += " " + std::string(static_cast<std::size_t>(std::max(0, pad)), ' ') + cell;
        }
        out += "\n";
    }
    return out;
}

std::string curve_csv(const TrainingCurve& curve) {
    std::string out = "step,accuracy\n";
    for (const auto& p : curve.points) out += std::to_string(p.step) + "," + fmt("%.6f", p.accuracy) + "\n";
    return out;
}

std::string curves_svg(const std::string& title, const std::vector<TrainingCurve>& curves) {
    constexpr double W = 640, H = 400, left = 60, right = 150, top = 40, bottom = 50;
    static const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::size_t max_step = 1;
    for (const auto& c : curves)
        for (const auto& p : c.points) max_step = std::max(max_step, p.step);
    auto x = [&](double step) { return left + (W - left - right) * step / static_cast<double>(max_step); };
    auto y = [&](double acc) { return top + (H - top - bottom) * (1.0 - acc); };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
    out += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
    out += "<text x=\"" + fmt("%.1f", left) + "\" y=\"24\" font-family=\"sans-serif\" font-size=\"14\">" + title +
           "</text>\n";
    out += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", y(0)) + "\" x2=\"" + fmt("%.1f", x(max_step)) +
           "\" y2=\"" + fmt("%.1f", y(0)) + "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + fmt("%.1f", left) + "\" y1=\"" + fmt("%.1f", y(0)) + "\" x2=\"" + fmt("%.1f", left) +
           "\" y2=\"" + fmt("%.1f", y(1)) + "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double acc = i / 4.0;
        out += "<text x=\"" + fmt("%.1f", left - 8) + "\" y=\"" + fmt("%.1f", y(acc) + 4) +
               "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" + fmt("%.2f", acc) + "</text>\n";
    }
    out += "<text x=\"" + fmt("%.1f", x(max_step)) + "\" y=\"" + fmt("%.1f", y(0) + 16) +
           "\" font-family=\"sans-serif\" font-size=\"10\" text-anchor=\"end\">" + std::to_string(max_step) +
           " steps</text>\n";
    for (std::size_t i = 0; i < curves.size(); ++i) {
        const char* color = palette[i % std::size(palette)];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"";
        for (const auto& p : curves[i].points)
            out += fmt("%.2f", x(static_cast<double>(p.step))) + "," + fmt("%.2f", y(p.accuracy)) + " ";
        out += "\"/>\n";
        const double ly = top + 14.0 * static_cast<double>(i);
        out += "<text x=\"" + fmt("%.1f", W - right + 10) + "\" y=\"" + fmt("%.1f", ly + 4) +
               "\" font-family=\"sans-serif\" font-size=\"10\" fill=\"" + color + "\">" + curves[i].sampler + "/" +
               curves[i].metric + " s" + std::to_string(curves[i].seed) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

nlohmann::ordered_json run_to_json(const RunResult& run) {
    nlohmann::ordered_json j;
    j["metric"] = run.metric;
    j["sampler"] = std::string(to_string(run.sampler));
    j["lr"] = run.learning_rate;
    j["seed"] = run.seed;
    j["status"] = std::string(to_string(run.status));
    j["steps_to_threshold"] = run.steps ? nlohmann::ordered_json(*run.steps) : nlohmann::ordered_json(nullptr);
    j["threshold"] = run.threshold;
    j["final_accuracy"] = run.final_accuracy;
    j["saturation"] = run.saturation;
    if (!run.error.empty()) j["error"] = run.error;
    auto& pts = j["curve"] = nlohmann::ordered_json::array();
    for (const auto& p : run.curve.points) pts.push_back({p.step, p.accuracy});
    return j;
}

RunResult run_from_json(const nlohmann::json& j) {
    RunResult r;
    r.metric = j.at("metric").get<std::string>();
    r.sampler = parse_sampler_kind(j.at("sampler").get<std::string>());
    r.learning_rate = j.at("lr").get<double>();
    r.seed = j.at("seed").get<std::uint64_t>();
    const auto status = j.at("status").get<std::string>();
    if (status == "ok") r.status = RunStatus::ok;
    else if (status == "unreached") r.status = RunStatus::unreached;
    else if (status == "incompatible") r.status = RunStatus::incompatible;
    else if (status == "failed") r.status = RunStatus::failed;
    else throw InputError("unknown run status: " + status);
    if (!j.at("steps_to_threshold").is_null()) r.steps = j["steps_to_threshold"].get<std::size_t>();
    r.threshold = j.at("threshold").get<double>();
    r.final_accuracy = j.at("final_accuracy").get<double>();
    r.saturation = j.at("saturation").get<double>();
    r.error = j.value("error", "");
    r.curve.sampler = std::string(to_string(r.sampler));
    r.curve.metric = r.metric;
    r.curve.seed = r.seed;
    r.curve.learning_rate = r.learning_rate;
    for (const auto& p : j.at("curve")) r.curve.points.push_back({p.at(0).get<std::size_t>(), p.at(1).get<double>()});
    return r;
}

std::vector<RunResult> load_runs(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) throw InputError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && name.size() > 9 && name.ends_with(".run.json")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<RunResult> runs;
    for (const auto& f : files) {
        try {
            runs.push_back(run_from_json(nlohmann::json::parse(detail::read_file(f))));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(f.string() + ": " + e.what());
        }
    }
    if (runs.empty()) throw InputError("no *.run.json files under " + dir.string());
    return runs;
}

ReportFiles write_report(const std::vector<RunResult>& runs, const std::filesystem::path& out) {
    std::filesystem::create_directories(out / "plots");
    const auto cells = aggregate_runs(runs);
    ReportFiles files{out / "results.csv", out / "table.csv", out / "deviation.csv", {}};
    detail::write_file_atomic(files.results, results_csv(runs));
    detail::write_file_atomic(files.table, table_csv(cells));
    detail::write_file_atomic(files.deviation, deviation_csv(cells));

    // One plot per (lr, metric); the baseline curves are drawn on every plot.
    std::map<std::pair<double, std::string>, std::vector<TrainingCurve>> sets;
    std::map<double, std::vector<TrainingCurve>> baselines;
    for (const auto& r : runs) {
        if (r.status == RunStatus::incompatible || r.status == RunStatus::failed) continue;
        if (r.metric == kBaselineMetric) baselines[r.learning_rate].push_back(r.curve);
        else sets[{r.learning_rate, r.metric}].push_back(r.curve);
    }
    if (sets.empty())
        for (const auto& [lr, curves] : baselines) sets[{lr, std::string(kBaselineMetric)}];
    for (auto& [key, curves] : sets) {
        std::vector<TrainingCurve> all = baselines[key.first];
        if (key.second != kBaselineMetric) all.insert(all.end(), curves.begin(), curves.end());
        const auto name = "lr" + format_lr(key.first) + "_" + key.second + ".svg";
        const auto path = out / "plots" / name;
        detail::write_file_atomic(path, curves_svg(key.second + " (lr " + format_lr(key.first) + ")", all));
        files.plots.push_back(path);
    }
    return files;
}

}  // namespace curriculum
