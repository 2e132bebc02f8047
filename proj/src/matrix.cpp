#include "curriculum/matrix.hpp"

#include "curriculum/error.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <thread>

namespace curriculum {

std::string_view to_string(RunStatus status) {
    switch (status) {
        case RunStatus::ok: return "ok";
        case RunStatus::unreached: return "unreached";
        case RunStatus::incompatible: return "incompatible";
        case RunStatus::failed: return "failed";
    }
    return "?";
}

bool MatrixResult::any_failed() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunResult& r) { return r.status == RunStatus::failed; });
}

const CellSummary* MatrixResult::cell(std::string_view metric, SamplerKind sampler, double lr) const {
    for (const auto& c : cells)
        if (c.metric == metric && c.sampler == sampler && c.learning_rate == lr) return &c;
    return nullptr;
}

void summarize_curve(RunResult& run, double threshold_ratio, std::size_t tail_window) {
    run.saturation = saturation_value(run.curve, tail_window);
    run.threshold = threshold_ratio * run.saturation;
    run.final_accuracy = run.curve.points.back().accuracy;
    run.steps = steps_to_threshold(run.curve, threshold_ratio, tail_window);
    run.status = run.steps ? RunStatus::ok : RunStatus::unreached;
}

std::vector<CellSummary> aggregate_runs(const std::vector<RunResult>& runs) {
    std::vector<CellSummary> cells;
    std::map<std::tuple<std::string, int, double>, std::size_t> index;
    std::vector<std::vector<const RunResult*>> members;
    for (const auto& r : runs) {
        auto key = std::make_tuple(r.metric, static_cast<int>(r.sampler), r.learning_rate);
        auto [it, inserted] = index.emplace(key, cells.size());
        if (inserted) {
            CellSummary c;
            c.metric = r.metric;
            c.sampler = r.sampler;
            c.learning_rate = r.learning_rate;
            cells.push_back(c);
            members.emplace_back();
        }
        members[it->second].push_back(&r);
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        auto& c = cells[i];
        const auto& rs = members[i];
        c.runs = rs.size();
        if (std::any_of(rs.begin(), rs.end(), [](auto* r) { return r->status == RunStatus::incompatible; })) {
            c.status = RunStatus::incompatible;
            continue;
        }
        if (std::any_of(rs.begin(), rs.end(), [](auto* r) { return r->status == RunStatus::failed; })) {
            c.status = RunStatus::failed;
            continue;
        }
        double thr = 0.0, acc = 0.0, sat = 0.0;
        for (auto* r : rs) {
            thr += r->threshold;
            acc += r->final_accuracy;
            sat += r->saturation;
        }
        const double n = static_cast<double>(rs.size());
        c.mean_threshold = thr / n;
        c.mean_final_accuracy = acc / n;
        c.mean_saturation = sat / n;
        if (std::any_of(rs.begin(), rs.end(), [](auto* r) { return !r->steps; })) {
            c.status = RunStatus::unreached;
            continue;
        }
        double total = 0.0;
        double lo = static_cast<double>(*rs.front()->steps), hi = lo;
        for (auto* r : rs) {
            const auto s = static_cast<double>(*r->steps);
            total += s;
            lo = std::min(lo, s);
            hi = std::max(hi, s);
        }
        c.mean_steps = total / n;
        c.max_deviation = hi - lo;
        c.status = RunStatus::ok;
    }
    return cells;
}

MatrixResult run_matrix(const Corpus& corpus, const MatrixConfig& config) {
    if (config.samplers.empty() || config.seeds.empty() || config.learning_rates.empty())
        throw InputError("run_matrix: samplers, seeds and learning rates must be non-empty");

    struct Job {
        const ComplexityScores* scores;  // null for the baseline
        SamplerKind sampler;
        double lr;
        std::uint64_t seed;
    };
    std::vector<Job> jobs;
    for (double lr : config.learning_rates) {
        for (std::uint64_t seed : config.seeds) jobs.push_back({nullptr, SamplerKind::random, lr, seed});
        for (const auto& m : config.metrics)
            for (SamplerKind k : config.samplers)
                for (std::uint64_t seed : config.seeds) jobs.push_back({&m, k, lr, seed});
    }

    MatrixResult result;
    result.runs.resize(jobs.size());
    auto execute = [&](std::size_t i) {
        const Job& job = jobs[i];
        RunResult& run = result.runs[i];
        run.metric = job.scores ? job.scores->metric_id : std::string(kBaselineMetric);
        run.sampler = job.sampler;
        run.learning_rate = job.lr;
        run.seed = job.seed;
        if (job.scores && is_incompatible(job.sampler, job.scores->metric_id)) {
            run.status = RunStatus::incompatible;
            return;
        }
        try {
            SamplerConfig sc = config.sampler;
            sc.kind = job.sampler;
            sc.seed = job.seed;
            TrainerConfig tc = config.trainer;
            tc.learning_rate = job.lr;
            tc.seed = job.seed;
            const auto schedule = make_training_schedule(corpus, job.scores, sc, tc.eval_fraction);
            run.curve = train(corpus, schedule, tc);
            run.curve.metric = run.metric;
            summarize_curve(run, config.threshold_ratio, config.tail_window);
        } catch (const std::exception& e) {
            run.status = RunStatus::failed;
            run.error = e.what();
        }
    };

    const unsigned threads = std::max(1u, config.threads);
    if (threads == 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) execute(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) execute(i);
            });
    }
    result.cells = aggregate_runs(result.runs);
    return result;
}

}  // namespace curriculum
