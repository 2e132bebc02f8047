#include "run_manifest.hpp"

#include "curriculum/corpus.hpp"
#include "curriculum/error.hpp"
#include "curriculum/io_util.hpp"
#include "curriculum/matrix.hpp"
#include "curriculum/metrics.hpp"
#include "curriculum/report.hpp"
#include "curriculum/samplers.hpp"
#include "curriculum/schedule_io.hpp"
#include "curriculum/synthetic.hpp"
#include "curriculum/trainer.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>
#include <thread>

namespace fs = std::filesystem;
using namespace curriculum;
using cli::RunManifest;

namespace {

std::uint64_t default_seed() {
    if (const char* env = std::getenv("CURRICULUM_SEED")) {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw InputError(std::string("CURRICULUM_SEED is not an integer: ") + env);
        }
    }
    return 0;
}

struct CorpusArgs {
    std::string input;
    std::string format;
    bool keep_case = false;
    std::optional<std::size_t> max_tokens;

    void add_to(CLI::App* app, bool required) {
        auto* opt = app->add_option("--input", input, "corpus file");
        if (required) opt->required();
        app->add_option("--format", format, "lines, tsv or jsonl (default: from extension)");
        app->add_flag("--keep-case", keep_case, "do not lowercase tokens");
        app->add_option("--max-tokens", max_tokens, "truncate documents to this many tokens");
    }
};

std::string format_from_extension(const fs::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".tsv") return "tsv";
    if (ext == ".jsonl") return "jsonl";
    return "lines";
}

struct LoadedCorpus {
    Corpus corpus;
    fs::path path;
    std::string format;
    std::size_t skipped = 0;
};

LoadedCorpus load_corpus_from(const CorpusArgs& args, const RunManifest& manifest) {
    LoadedCorpus out;
    TokenizerConfig tok;
    if (!args.input.empty()) {
        out.path = args.input;
        out.format = args.format.empty() ? format_from_extension(out.path) : args.format;
        tok.lowercase = !args.keep_case;
        tok.max_tokens = args.max_tokens;
    } else if (const auto* c = manifest.corpus()) {
        out.path = manifest.input(c->at("path").get<std::string>());
        out.format = c->at("format").get<std::string>();
        tok.lowercase = c->at("lowercase").get<bool>();
        if (!c->at("max_tokens").is_null()) tok.max_tokens = c->at("max_tokens").get<std::size_t>();
    } else {
        throw InputError("no corpus: pass --input or run ingest first");
    }
    if (!fs::exists(out.path)) throw InputError(out.path.string() + ": no such file");
    auto loaded = load_corpus(out.path, parse_corpus_format(out.format), tok);
    out.corpus = std::move(loaded.corpus);
    out.skipped = loaded.skipped_empty;
    return out;
}

void record_corpus(RunManifest& manifest, const LoadedCorpus& lc) {
    manifest.set_corpus(lc.path, lc.format, lc.corpus.hash(), lc.corpus.tokenizer().lowercase,
                        lc.corpus.tokenizer().max_tokens);
}

// Stats from the manifest cache when it matches, otherwise built fresh.
CorpusStats stats_for(const Corpus& corpus, const RunManifest& manifest, const std::string& explicit_path) {
    std::optional<fs::path> path;
    if (!explicit_path.empty()) path = manifest.input(explicit_path);
    else path = manifest.stats();
    if (path && fs::exists(*path)) {
        auto stats = load_stats(*path);
        if (stats.corpus_hash() == corpus.hash()) return stats;
        if (!explicit_path.empty())
            throw ConsistencyError(path->string() + ": stats cache does not match the corpus");
    } else if (!explicit_path.empty()) {
        throw InputError(explicit_path + ": no such file");
    }
    return build_stats(corpus);
}

// Scores for a metric: explicit file, then the manifest, then computed.
ComplexityScores scores_for(const std::string& metric_id, const std::string& scores_path, const Corpus& corpus,
                            const RunManifest& manifest, const std::string& stats_path) {
    std::optional<fs::path> path;
    if (!scores_path.empty()) {
        path = manifest.input(scores_path);
        if (!fs::exists(*path)) throw InputError(scores_path + ": no such file");
    } else {
        path = manifest.scores(metric_id);
    }
    if (path && fs::exists(*path)) {
        auto s = read_scores(*path);
        if (!metric_id.empty() && s.metric_id != metric_id)
            throw ConsistencyError(path->string() + ": holds metric " + s.metric_id + ", expected " + metric_id);
        if (s.corpus_hash != corpus.hash())
            throw ConsistencyError(path->string() + ": scores were computed for a different corpus");
        validate_scores(s, corpus.size());
        return s;
    }
    if (!is_known_metric(metric_id) || metric_id == metric::external)
        throw InputError("no scores for metric " + metric_id + ": pass --scores or run score first");
    return score_metric(metric_id, corpus, stats_for(corpus, manifest, stats_path));
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const auto end = s.find(',', start);
        auto item = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
        if (!item.empty()) out.push_back(item);
        if (end == std::string::npos) break;
        start = end + 1;
    }
    return out;
}

double parse_double(const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != s.size()) throw InputError("not a number: " + s);
    return v;
}

std::string steps_text(const RunResult& r) {
    switch (r.status) {
        case RunStatus::incompatible: return std::string(kIncompatibleMark);
        case RunStatus::failed: return "failed";
        default: return r.steps ? std::to_string(*r.steps) : std::string(kUnreachedMark);
    }
}

struct SamplerArgs {
    std::uint32_t batch_size = 32;
    std::uint32_t steps = 1000;
    double c0 = 0.01;
    std::uint32_t buckets = 10;

    void add_to(CLI::App* app) {
        app->add_option("--batch-size", batch_size, "documents per batch")->capture_default_str();
        app->add_option("--steps", steps, "total training steps")->capture_default_str();
        app->add_option("--c0", c0, "initial competence")->capture_default_str();
        app->add_option("--buckets", buckets, "buckets for the hyperbolic sampler")->capture_default_str();
    }
    [[nodiscard]] SamplerConfig config(SamplerKind kind, std::uint64_t seed) const {
        SamplerConfig c;
        c.kind = kind;
        c.batch_size = batch_size;
        c.total_steps = steps;
        c.c0 = c0;
        c.num_buckets = buckets;
        c.seed = seed;
        return c;
    }
};

struct TrainerArgs {
    std::uint32_t feature_dim = 1u << 18;
    double l2 = 1e-6;
    std::uint32_t eval_every = 50;
    double eval_fraction = 0.1;
    double threshold_ratio = 0.9;
    std::size_t tail_window = 10;

    void add_to(CLI::App* app) {
        app->add_option("--feature-dim", feature_dim, "hashed feature dimension")->capture_default_str();
        app->add_option("--l2", l2, "weight decay")->capture_default_str();
        app->add_option("--eval-every", eval_every, "steps between held-out evaluations")->capture_default_str();
        app->add_option("--eval-fraction", eval_fraction, "held-out fraction (last documents by id)")
            ->capture_default_str();
        app->add_option("--threshold-ratio", threshold_ratio, "threshold as a fraction of saturation")
            ->capture_default_str();
        app->add_option("--tail-window", tail_window, "evaluations averaged for saturation")->capture_default_str();
    }
    [[nodiscard]] TrainerConfig config(double lr, std::uint64_t seed) const {
        TrainerConfig c;
        c.feature_dim = feature_dim;
        c.learning_rate = lr;
        c.l2 = l2;
        c.eval_every = eval_every;
        c.eval_fraction = eval_fraction;
        c.seed = seed;
        return c;
    }
};

nlohmann::ordered_json to_json(const SamplerConfig& c) {
    nlohmann::ordered_json j;
    j["sampler"] = std::string(to_string(c.kind));
    j["batch_size"] = c.batch_size;
    j["total_steps"] = c.total_steps;
    j["c0"] = c.c0;
    j["num_buckets"] = c.num_buckets;
    j["seed"] = c.seed;
    return j;
}

nlohmann::ordered_json to_json(const TrainerArgs& t) {
    nlohmann::ordered_json j;
    j["feature_dim"] = t.feature_dim;
    j["l2"] = t.l2;
    j["eval_every"] = t.eval_every;
    j["eval_fraction"] = t.eval_fraction;
    j["threshold_ratio"] = t.threshold_ratio;
    j["tail_window"] = t.tail_window;
    return j;
}

std::vector<double> learning_rates(const std::string& sweep, double lr) {
    if (sweep.empty()) return {lr};
    std::vector<double> out;
    for (const auto& s : split_list(sweep)) out.push_back(parse_double(s));
    if (out.empty()) throw InputError("--sweep-lr needs at least one value");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Curriculum scheduling toolkit: score documents, build batch schedules, train and report."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(CURRICULUM_VERSION));
    std::string run_dir = "run";
    app.add_option("--run-dir", run_dir, "directory holding outputs and manifest.json")->capture_default_str();

    std::uint64_t seed = 0;
    int exit_code = 0;
    try {
        seed = default_seed();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    const std::string seed_help = "random seed (default: CURRICULUM_SEED or 0)";

    // synth
    auto* synth = app.add_subcommand("synth", "write a synthetic labelled corpus (tsv)");
    SyntheticConfig syn;
    bool separable = false;
    std::string synth_out = "corpus.tsv";
    synth->add_option("--docs", syn.docs, "number of documents")->capture_default_str();
    synth->add_option("--seed", seed, seed_help);
    synth->add_flag("--separable", separable, "two-word corpus with an exact linear separator");
    synth->add_option("--out", synth_out, "output path")->capture_default_str();

    // ingest
    auto* ingest = app.add_subcommand("ingest", "load a corpus and cache its statistics");
    CorpusArgs ingest_corpus;
    ingest_corpus.add_to(ingest, true);
    std::size_t max_positions = CorpusStats::kDefaultMaxPositions;
    std::string ingest_out = "stats.json";
    ingest->add_option("--max-positions", max_positions, "positional table depth, 0 for no cap")
        ->capture_default_str();
    ingest->add_option("--out", ingest_out, "stats cache path")->capture_default_str();

    // score
    auto* score = app.add_subcommand("score", "compute per-document complexity scores");
    CorpusArgs score_corpus;
    score_corpus.add_to(score, false);
    std::string score_metric_id, score_scores, score_stats, score_name = std::string(metric::external),
                                                            score_dir = "scores";
    score->add_option("--metric", score_metric_id, "metric id, all, or external")->required();
    score->add_option("--scores", score_scores, "external score file ({\"id\",\"score\"} lines)");
    score->add_option("--name", score_name, "metric id recorded for external scores")->capture_default_str();
    score->add_option("--stats", score_stats, "stats cache");
    score->add_option("--out-dir", score_dir, "output directory")->capture_default_str();

    // schedule
    auto* schedule = app.add_subcommand("schedule", "build a batch schedule");
    CorpusArgs sched_corpus;
    sched_corpus.add_to(schedule, false);
    SamplerArgs sched_sampler;
    sched_sampler.add_to(schedule);
    std::string sched_kind, sched_metric, sched_scores, sched_stats, sched_out;
    double sched_eval_fraction = 0.1;
    bool full_corpus = false;
    schedule->add_option("--sampler", sched_kind, "cb, db, hyp, ss, sm or random")->required();
    schedule->add_option("--metric", sched_metric, "complexity metric id");
    schedule->add_option("--scores", sched_scores, "score file (default: from score, else computed)");
    schedule->add_option("--stats", sched_stats, "stats cache");
    schedule->add_option("--seed", seed, seed_help);
    schedule->add_option("--eval-fraction", sched_eval_fraction, "held-out fraction excluded from the schedule")
        ->capture_default_str();
    schedule->add_flag("--full-corpus", full_corpus, "schedule over every document (no held-out split)");
    schedule->add_option("--out", sched_out, "output path (default: schedules/<sampler>_<metric>_s<seed>.jsonl)");

    // train
    auto* train_cmd = app.add_subcommand("train", "train on schedules and record curves");
    CorpusArgs train_corpus;
    train_corpus.add_to(train_cmd, false);
    TrainerArgs train_args;
    train_args.add_to(train_cmd);
    std::vector<std::string> train_schedules;
    double train_lr = 0.1;
    std::string train_sweep, train_dir = "runs";
    train_cmd->add_option("--schedule", train_schedules, "schedule file (repeatable)")->required();
    auto* lr_opt = train_cmd->add_option("--lr", train_lr, "learning rate")->capture_default_str();
    train_cmd->add_option("--sweep-lr", train_sweep, "comma-separated learning rates")->excludes(lr_opt);
    train_cmd->add_option("--out-dir", train_dir, "output directory")->capture_default_str();

    // report
    auto* report = app.add_subcommand("report", "aggregate run files into tables and plots");
    std::string report_runs = "runs", report_out = "report";
    report->add_option("--runs", report_runs, "directory of *.run.json files")->capture_default_str();
    report->add_option("--out", report_out, "output directory")->capture_default_str();

    // matrix
    auto* matrix = app.add_subcommand("matrix", "run every metric x sampler x seed x learning rate");
    CorpusArgs matrix_corpus;
    matrix_corpus.add_to(matrix, false);
    SamplerArgs matrix_sampler;
    matrix_sampler.add_to(matrix);
    TrainerArgs matrix_trainer;
    matrix_trainer.add_to(matrix);
    std::string matrix_metrics = "length,max_word_rank,likelihood_nll,tfidf,tse,ee";
    std::string matrix_samplers = "cb,db,hyp,ss,sm", matrix_seeds, matrix_lrs = "0.1", matrix_stats;
    std::string matrix_dir = "matrix";
    unsigned matrix_threads = std::max(1u, std::thread::hardware_concurrency());
    matrix->add_option("--metrics", matrix_metrics, "comma-separated metric ids")->capture_default_str();
    matrix->add_option("--samplers", matrix_samplers, "comma-separated curriculum samplers")->capture_default_str();
    matrix->add_option("--seeds", matrix_seeds, "comma-separated seeds (default: seed, seed+1, seed+2)");
    matrix->add_option("--seed", seed, seed_help);
    matrix->add_option("--lrs", matrix_lrs, "comma-separated learning rates")->capture_default_str();
    matrix->add_option("--stats", matrix_stats, "stats cache");
    matrix->add_option("--threads", matrix_threads, "worker threads")->capture_default_str();
    matrix->add_option("--out-dir", matrix_dir, "output directory")->capture_default_str();

    // stats
    auto* stats_cmd = app.add_subcommand("stats", "per-step complexity and length table of a schedule");
    CorpusArgs stats_corpus;
    stats_corpus.add_to(stats_cmd, false);
    std::string stats_schedule, stats_metric, stats_scores, stats_cache, stats_out;
    stats_cmd->add_option("--schedule", stats_schedule, "schedule file")->required();
    stats_cmd->add_option("--metric", stats_metric, "metric for the complexity column (default: the schedule's)");
    stats_cmd->add_option("--scores", stats_scores, "score file");
    stats_cmd->add_option("--stats", stats_cache, "stats cache");
    stats_cmd->add_option("--out", stats_out, "output CSV (default: stats/<schedule>.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        RunManifest manifest(run_dir);
        fs::create_directories(run_dir);
        const std::vector<std::string> invocation(argv + 1, argv + argc);

        if (*synth) {
            const Corpus corpus = separable ? make_separable_corpus(syn.docs) : [&] {
                syn.seed = seed;
                return make_synthetic_corpus(syn);
            }();
            const auto out = manifest.output(synth_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_corpus_tsv(corpus, out);
            manifest.set_corpus(out, "tsv", corpus.hash(), true, std::nullopt);
            manifest.set_config("synth", {{"docs", syn.docs}, {"seed", seed}, {"separable", separable}});
            std::cout << "docs=" << corpus.size() << " path=" << out.string() << "\n";
        } else if (*ingest) {
            const auto lc = load_corpus_from(ingest_corpus, manifest);
            const auto stats = build_stats(lc.corpus, max_positions);
            const auto out = manifest.output(ingest_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            save_stats(stats, out);
            record_corpus(manifest, lc);
            manifest.set_stats(out);
            manifest.set_config("ingest", {{"max_positions", max_positions}});
            if (lc.skipped) std::cerr << "skipped " << lc.skipped << " empty documents\n";
            std::cout << "docs=" << lc.corpus.size() << " vocab=" << stats.vocab_size() << "\n";
        } else if (*score) {
            const auto lc = load_corpus_from(score_corpus, manifest);
            std::vector<ComplexityScores> produced;
            if (score_metric_id == metric::external) {
                if (score_scores.empty()) throw InputError("--metric external needs --scores");
                const auto path = manifest.input(score_scores);
                if (!fs::exists(path)) throw InputError(score_scores + ": no such file");
                auto s = load_external_scores(path, lc.corpus);
                s.metric_id = score_name;
                produced.push_back(std::move(s));
            } else {
                std::vector<std::string> ids;
                if (score_metric_id == "all") ids = builtin_metrics();
                else if (is_known_metric(score_metric_id)) ids = {score_metric_id};
                else throw InputError("unknown metric: " + score_metric_id);
                const auto stats = stats_for(lc.corpus, manifest, score_stats);
                for (const auto& id : ids) produced.push_back(score_metric(id, lc.corpus, stats));
            }
            const auto dir = manifest.output(score_dir);
            fs::create_directories(dir);
            for (const auto& s : produced) {
                const auto path = dir / (s.metric_id + ".jsonl");
                write_scores(s, path);
                manifest.add_scores(s.metric_id, path);
                std::cout << path.string() << "\n";
            }
            if (!manifest.corpus()) record_corpus(manifest, lc);
        } else if (*schedule) {
            const auto kind = parse_sampler_kind(sched_kind);
            if (kind != SamplerKind::random && sched_metric.empty())
                throw InputError("sampler " + sched_kind + " needs --metric");
            if (is_incompatible(kind, sched_metric))
                throw InputError("sampler " + sched_kind + " is incompatible with metric " + sched_metric);
            const auto lc = load_corpus_from(sched_corpus, manifest);
            std::optional<ComplexityScores> scores;
            if (kind != SamplerKind::random)
                scores = scores_for(sched_metric, sched_scores, lc.corpus, manifest, sched_stats);
            const auto cfg = sched_sampler.config(kind, seed);
            const Schedule s = full_corpus
                                   ? make_schedule(lc.corpus, scores ? &*scores : nullptr, cfg)
                                   : make_training_schedule(lc.corpus, scores ? &*scores : nullptr, cfg,
                                                            sched_eval_fraction);
            const std::string metric_name = kind == SamplerKind::random ? std::string(kNoMetric) : sched_metric;
            const auto out = manifest.output(sched_out.empty() ? "schedules/" + sched_kind + "_" + metric_name + "_s" +
                                                                     std::to_string(seed) + ".jsonl"
                                                               : sched_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            write_schedule(s, out);
            manifest.add_schedule(out);
            auto snapshot = to_json(cfg);
            snapshot["metric"] = metric_name;
            snapshot["eval_fraction"] = full_corpus ? 0.0 : sched_eval_fraction;
            manifest.set_config("schedule", snapshot);
            std::cout << out.string() << " batches=" << s.batches.size() << "\n";
        } else if (*train_cmd) {
            const auto lc = load_corpus_from(train_corpus, manifest);
            const auto lrs = learning_rates(train_sweep, train_lr);
            const auto dir = manifest.output(train_dir);
            fs::create_directories(dir / "curves");
            fs::create_directories(dir / "plots");
            const KnownCorpus known{lc.corpus.hash(), lc.corpus.size()};
            std::vector<std::pair<std::string, Schedule>> schedules;
            for (const auto& p : train_schedules) {
                const auto path = manifest.input(p);
                if (!fs::exists(path)) throw InputError(p + ": no such file");
                schedules.emplace_back(path.stem().string(), load_schedule(path, known));
            }
            auto snapshot = to_json(train_args);
            snapshot["learning_rates"] = lrs;
            manifest.set_config("train", snapshot);
            for (double lr : lrs) {
                std::vector<TrainingCurve> curves;
                for (const auto& [stem, s] : schedules) {
                    RunResult r;
                    r.metric = s.meta.sampler == SamplerKind::random ? std::string(kBaselineMetric) : s.meta.metric_id;
                    r.sampler = s.meta.sampler;
                    r.learning_rate = lr;
                    r.seed = s.meta.seed;
                    try {
                        r.curve = train(lc.corpus, s, train_args.config(lr, s.meta.seed));
                        summarize_curve(r, train_args.threshold_ratio, train_args.tail_window);
                    } catch (const std::exception& e) {
                        r.status = RunStatus::failed;
                        r.error = e.what();
                        exit_code = 1;
                        std::cerr << "error: " << stem << " lr=" << format_lr(lr) << ": " << e.what() << "\n";
                    }
                    const std::string name = stem + "_lr" + format_lr(lr);
                    detail::write_file_atomic(dir / (name + ".run.json"), run_to_json(r).dump(2) + "\n");
                    manifest.add_run(dir / (name + ".run.json"));
                    if (!r.curve.points.empty()) {
                        detail::write_file_atomic(dir / "curves" / (name + ".csv"), curve_csv(r.curve));
                        curves.push_back(r.curve);
                    }
                    std::cout << name << " steps_to_threshold=" << steps_text(r) << " final_accuracy="
                              << (r.status == RunStatus::failed ? std::string("-") : std::to_string(r.final_accuracy))
                              << "\n";
                }
                if (!curves.empty()) {
                    const auto plot = dir / "plots" / ("lr" + format_lr(lr) + ".svg");
                    detail::write_file_atomic(plot, curves_svg("learning rate " + format_lr(lr), curves));
                    manifest.add_table(plot);
                }
            }
        } else if (*report) {
            const auto runs = load_runs(manifest.input(report_runs));
            if (runs.empty()) throw InputError(report_runs + ": no *.run.json files");
            const auto files = write_report(runs, manifest.output(report_out));
            for (const auto& p : {files.results, files.table, files.deviation}) manifest.add_table(p);
            for (const auto& p : files.plots) manifest.add_table(p);
            std::cout << table_text(aggregate_runs(runs));
            for (const auto& r : runs)
                if (r.status == RunStatus::failed) exit_code = 1;
        } else if (*matrix) {
            const auto lc = load_corpus_from(matrix_corpus, manifest);
            MatrixConfig mc;
            const auto stats = stats_for(lc.corpus, manifest, matrix_stats);
            for (const auto& id : split_list(matrix_metrics)) {
                if (id == metric::external || !is_known_metric(id)) {
                    const auto path = manifest.scores(id);
                    if (!path) throw InputError("unknown metric: " + id);
                    mc.metrics.push_back(scores_for(id, "", lc.corpus, manifest, matrix_stats));
                } else {
                    mc.metrics.push_back(score_metric(id, lc.corpus, stats));
                }
            }
            for (const auto& k : split_list(matrix_samplers)) {
                const auto kind = parse_sampler_kind(k);
                if (kind == SamplerKind::random)
                    throw InputError("the random baseline is always included; list curriculum samplers only");
                mc.samplers.push_back(kind);
            }
            if (matrix_seeds.empty()) mc.seeds = {seed, seed + 1, seed + 2};
            else
                for (const auto& s : split_list(matrix_seeds)) mc.seeds.push_back(std::stoull(s));
            for (const auto& s : split_list(matrix_lrs)) mc.learning_rates.push_back(parse_double(s));
            if (mc.metrics.empty() || mc.samplers.empty() || mc.seeds.empty() || mc.learning_rates.empty())
                throw InputError("metrics, samplers, seeds and learning rates must be non-empty");
            mc.sampler = matrix_sampler.config(SamplerKind::random, 0);
            mc.trainer = matrix_trainer.config(0.1, 0);
            mc.threshold_ratio = matrix_trainer.threshold_ratio;
            mc.tail_window = matrix_trainer.tail_window;
            mc.threads = std::max(1u, matrix_threads);

            nlohmann::ordered_json snapshot;
            snapshot["metrics"] = split_list(matrix_metrics);
            snapshot["samplers"] = split_list(matrix_samplers);
            snapshot["seeds"] = mc.seeds;
            snapshot["learning_rates"] = mc.learning_rates;
            snapshot["sampler"] = to_json(mc.sampler);
            snapshot["trainer"] = to_json(matrix_trainer);
            manifest.set_config("matrix", snapshot);

            const auto result = run_matrix(lc.corpus, mc);
            const auto dir = manifest.output(matrix_dir);
            fs::create_directories(dir / "runs");
            for (const auto& r : result.runs) {
                const auto path = dir / "runs" /
                                  (r.metric + "_" + std::string(to_string(r.sampler)) + "_lr" +
                                   format_lr(r.learning_rate) + "_s" + std::to_string(r.seed) + ".run.json");
                detail::write_file_atomic(path, run_to_json(r).dump(2) + "\n");
                manifest.add_run(path);
                if (r.status == RunStatus::failed)
                    std::cerr << "error: " << r.metric << "/" << to_string(r.sampler) << " seed " << r.seed << ": "
                              << r.error << "\n";
            }
            const auto files = write_report(result.runs, dir / "report");
            for (const auto& p : {files.results, files.table, files.deviation}) manifest.add_table(p);
            for (const auto& p : files.plots) manifest.add_table(p);
            std::cout << table_text(result.cells);
            if (result.any_failed()) exit_code = 1;
        } else if (*stats_cmd) {
            const auto lc = load_corpus_from(stats_corpus, manifest);
            const auto path = manifest.input(stats_schedule);
            if (!fs::exists(path)) throw InputError(stats_schedule + ": no such file");
            const auto s = load_schedule(path, KnownCorpus{lc.corpus.hash(), lc.corpus.size()});
            std::string metric_id = stats_metric;
            if (metric_id.empty()) metric_id = s.meta.metric_id == kNoMetric ? "" : s.meta.metric_id;
            if (metric_id.empty() && stats_scores.empty())
                throw InputError("schedule has no metric: pass --metric or --scores");
            const auto scores = scores_for(metric_id, stats_scores, lc.corpus, manifest, stats_cache);
            const auto csv = schedule_stats_csv(schedule_stats(s, scores, lc.corpus));
            const auto out = manifest.output(stats_out.empty() ? "stats/" + path.stem().string() + ".csv" : stats_out);
            if (out.has_parent_path()) fs::create_directories(out.parent_path());
            detail::write_file_atomic(out, csv);
            manifest.add_table(out);
            std::cout << out.string() << " rows=" << s.batches.size() << "\n";
        }

        manifest.add_invocation(invocation);
        manifest.save(CURRICULUM_VERSION);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return exit_code;
}
