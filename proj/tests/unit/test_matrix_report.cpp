#include "curriculum/error.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/report.hpp"
#include "curriculum/synthetic.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace curriculum;

namespace {

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

RunResult run_with(std::string metric, SamplerKind kind, double lr, std::uint64_t seed,
                   std::vector<std::pair<std::size_t, double>> pts) {
    RunResult r;
    r.metric = std::move(metric);
    r.sampler = kind;
    r.learning_rate = lr;
    r.seed = seed;
    for (auto [s, a] : pts) r.curve.points.push_back({s, a});
    summarize_curve(r, 0.9, 2);
    return r;
}

MatrixConfig small_matrix(const Corpus& corpus) {
    const auto stats = build_stats(corpus);
    MatrixConfig mc;
    mc.metrics = {score_metric(metric::length, corpus, stats), score_metric(metric::tfidf, corpus, stats)};
    mc.samplers = {SamplerKind::cb, SamplerKind::ss};
    mc.seeds = {1, 2, 3};
    mc.learning_rates = {0.5};
    mc.sampler.batch_size = 8;
    mc.sampler.total_steps = 60;
    mc.trainer.feature_dim = 1u << 10;
    mc.trainer.eval_every = 10;
    mc.tail_window = 3;
    return mc;
}

}  // namespace

TEST_CASE("summarize_curve") {
    const auto r = run_with("length", SamplerKind::cb, 0.1, 0, {{0, 0.5}, {10, 0.85}, {20, 0.9}, {30, 0.9}});
    CHECK(r.status == RunStatus::ok);
    CHECK(r.steps == std::optional<std::size_t>(10));
    CHECK(r.saturation == doctest::Approx(0.9));
    CHECK(r.threshold == doctest::Approx(0.81));
    CHECK(r.final_accuracy == 0.9);

    CHECK_THROWS_AS(run_with("length", SamplerKind::cb, 0.1, 0, {{0, 0.5}}), InputError);

    const auto never = run_with("length", SamplerKind::cb, 0.1, 0, {{0, 0.0}, {10, 0.0}});
    CHECK(never.steps == std::optional<std::size_t>(0));
}

TEST_CASE("aggregation over seeds") {
    std::vector<RunResult> runs = {
        run_with("tfidf", SamplerKind::cb, 0.1, 1, {{0, 0.5}, {10, 0.9}, {20, 0.9}}),
        run_with("tfidf", SamplerKind::cb, 0.1, 2, {{0, 0.5}, {10, 0.5}, {20, 0.9}, {30, 0.9}}),
        run_with("tfidf", SamplerKind::cb, 0.1, 3, {{0, 0.5}, {10, 0.5}, {20, 0.5}, {30, 0.9}, {40, 0.9}}),
    };
    auto cells = aggregate_runs(runs);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].runs == 3);
    CHECK(cells[0].status == RunStatus::ok);
    CHECK(*cells[0].mean_steps == doctest::Approx(20.0));
    CHECK(*cells[0].max_deviation == doctest::Approx(20.0));

    // One seed that never reaches its threshold makes the cell unreached.
    RunResult never = runs[0];
    never.seed = 4;
    never.steps.reset();
    never.status = RunStatus::unreached;
    runs.push_back(never);
    cells = aggregate_runs(runs);
    CHECK(cells[0].status == RunStatus::unreached);
    CHECK_FALSE(cells[0].mean_steps.has_value());
    const auto table = table_csv(cells);
    CHECK(table.find("∞") != std::string::npos);
}

TEST_CASE("matrix counting and table shape") {
    SyntheticConfig syn;
    syn.docs = 400;
    const auto corpus = make_synthetic_corpus(syn);
    const auto mc = small_matrix(corpus);
    const auto result = run_matrix(corpus, mc);

    // 2 metrics x 2 samplers x 3 seeds, plus one baseline per seed.
    CHECK(result.runs.size() == 12 + 3);
    const auto baseline = std::count_if(result.runs.begin(), result.runs.end(),
                                        [](const RunResult& r) { return r.metric == kBaselineMetric; });
    CHECK(baseline == 3);
    CHECK_FALSE(result.any_failed());

    const auto* inc = result.cell("length", SamplerKind::ss, 0.5);
    REQUIRE(inc);
    CHECK(inc->status == RunStatus::incompatible);
    for (const auto& r : result.runs)
        if (r.metric == "length" && r.sampler == SamplerKind::ss) CHECK(r.curve.points.empty());
    const auto* cb = result.cell("tfidf", SamplerKind::cb, 0.5);
    REQUIRE(cb);
    CHECK(cb->runs == 3);
    CHECK((cb->status == RunStatus::ok || cb->status == RunStatus::unreached));

    const auto table = lines_of(table_csv(result.cells));
    REQUIRE(table.size() == 4);
    CHECK(table[0] == "lr,metric,threshold,accuracy,aggregate,baseline,cb,db,hyp,ss,sm");
    CHECK(table[1].rfind("0.5,baseline,", 0) == 0);
    CHECK(table[2].rfind("0.5,length,", 0) == 0);
    CHECK(table[2].substr(table[2].size() - 3) == ",-,");
    CHECK(lines_of(deviation_csv(result.cells)).size() == 4);

    const auto results = lines_of(results_csv(result.runs));
    CHECK(results[0] == "metric,sampler,lr,seed,steps_to_threshold,final_accuracy,saturation");
    CHECK(results.size() == 16);

    CHECK(run_matrix(corpus, mc).runs.size() == result.runs.size());
    auto threaded = mc;
    threaded.threads = 3;
    const auto again = run_matrix(corpus, threaded);
    REQUIRE(again.runs.size() == result.runs.size());
    for (std::size_t i = 0; i < again.runs.size(); ++i) CHECK(again.runs[i].curve.points == result.runs[i].curve.points);
}

TEST_CASE("baseline row appears once per learning rate") {
    SyntheticConfig syn;
    syn.docs = 200;
    const auto corpus = make_synthetic_corpus(syn);
    auto mc = small_matrix(corpus);
    mc.seeds = {1};
    mc.learning_rates = {1.0, 0.1, 0.01};
    mc.sampler.total_steps = 20;
    const auto result = run_matrix(corpus, mc);
    const auto table = lines_of(table_csv(result.cells));
    for (double lr : mc.learning_rates) {
        const auto prefix = format_lr(lr) + ",baseline,";
        CHECK(std::count_if(table.begin(), table.end(), [&](const std::string& l) { return l.rfind(prefix, 0) == 0; }) == 1);
    }
}

TEST_CASE("failed cells are recorded without aborting") {
    SyntheticConfig syn;
    syn.docs = 200;
    const auto corpus = make_synthetic_corpus(syn);
    auto mc = small_matrix(corpus);
    mc.seeds = {1};
    mc.metrics[1].scores.pop_back();  // wrong length for this corpus
    const auto result = run_matrix(corpus, mc);
    CHECK(result.any_failed());
    const auto* bad = result.cell("tfidf", SamplerKind::cb, 0.5);
    REQUIRE(bad);
    CHECK(bad->status == RunStatus::failed);
    CHECK(result.cell("length", SamplerKind::cb, 0.5)->status != RunStatus::failed);
    for (const auto& r : result.runs)
        if (r.status == RunStatus::failed) CHECK_FALSE(r.error.empty());
}

TEST_CASE("run json round trip and report files") {
    testutil::TempDir dir;
    std::vector<RunResult> runs = {
        run_with("baseline", SamplerKind::random, 0.1, 1, {{0, 0.5}, {10, 0.9}, {20, 0.9}}),
        run_with("tfidf", SamplerKind::hyp, 0.1, 1, {{0, 0.5}, {10, 0.6}, {20, 0.95}}),
    };
    RunResult inc;
    inc.metric = "length";
    inc.sampler = SamplerKind::sm;
    inc.learning_rate = 0.1;
    inc.status = RunStatus::incompatible;
    runs.push_back(inc);

    std::filesystem::create_directories(dir.path() / "runs");
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const auto j = run_to_json(runs[i]);
        const auto back = run_from_json(j);
        CHECK(back.metric == runs[i].metric);
        CHECK(back.sampler == runs[i].sampler);
        CHECK(back.steps == runs[i].steps);
        CHECK(back.status == runs[i].status);
        CHECK(back.curve.points == runs[i].curve.points);
        std::ofstream(dir.path() / "runs" / ("r" + std::to_string(i) + ".run.json")) << j.dump();
    }
    std::ofstream(dir.path() / "runs" / "notes.txt") << "ignored";
    const auto loaded = load_runs(dir.path() / "runs");
    REQUIRE(loaded.size() == 3);

    const auto files = write_report(loaded, dir.path() / "report");
    CHECK(std::filesystem::exists(files.results));
    CHECK(std::filesystem::exists(files.table));
    CHECK(std::filesystem::exists(files.deviation));
    REQUIRE_FALSE(files.plots.empty());
    for (const auto& p : files.plots) {
        std::ifstream in(p);
        std::string head;
        std::getline(in, head);
        CHECK(head.rfind("<svg", 0) == 0);
    }
    CHECK_THROWS_AS(load_runs(dir.path() / "absent"), InputError);

    const auto text = table_text(aggregate_runs(loaded));
    CHECK(text.find("baseline") != std::string::npos);
    CHECK(curve_csv(loaded[0].curve).rfind("step,accuracy\n0,0.500000\n", 0) == 0);
}
