#include "curriculum/schedule_io.hpp"

#include "curriculum/error.hpp"
#include "curriculum/io_util.hpp"

#include <json.hpp>

#include <cstdio>
#include <limits>
#include <sstream>
#include <unordered_set>

namespace curriculum {

void validate_schedule(const Schedule& schedule, std::optional<std::size_t> corpus_size) {
    if (schedule.batches.empty()) throw ConsistencyError("schedule has no batches");
    const auto kind = schedule.meta.sampler;
    const bool partition = kind == SamplerKind::ss || kind == SamplerKind::sm;
    if (!partition && schedule.batches.size() != schedule.meta.total_steps)
        throw ConsistencyError("schedule has " + std::to_string(schedule.batches.size()) + " batches, expected " +
                               std::to_string(schedule.meta.total_steps));
    std::unordered_set<DocId> seen;
    std::size_t max_id = 0;
    for (std::size_t step = 0; step < schedule.batches.size(); ++step) {
        const auto& b = schedule.batches[step];
        if (b.empty()) throw ConsistencyError("step " + std::to_string(step) + ": empty batch");
        for (DocId id : b) {
            if (corpus_size && id >= *corpus_size)
                throw ConsistencyError("step " + std::to_string(step) + ": id " + std::to_string(id) +
                                       " outside corpus of " + std::to_string(*corpus_size));
            if (partition && !seen.insert(id).second)
                throw ConsistencyError("step " + std::to_string(step) + ": document " + std::to_string(id) +
                                       " appears more than once");
            max_id = std::max<std::size_t>(max_id, id);
        }
    }
    if (partition) {
        const std::size_t expected = max_id + 1;
        if (seen.size() != expected)
            throw ConsistencyError("schedule covers " + std::to_string(seen.size()) + " of " +
                                   std::to_string(expected) + " documents");
    }
}

std::string serialize_schedule(const Schedule& schedule) {
    validate_schedule(schedule);
    nlohmann::ordered_json header;
    header["sampler"] = std::string(to_string(schedule.meta.sampler));
    header["metric"] = schedule.meta.metric_id;
    header["batch_size"] = schedule.meta.batch_size;
    header["total_steps"] = schedule.meta.total_steps;
    header["seed"] = schedule.meta.seed;
    header["corpus_hash"] = schedule.meta.corpus_hash;
    std::string out = header.dump() + "\n";
    for (std::size_t step = 0; step < schedule.batches.size(); ++step) {
        nlohmann::ordered_json rec;
        rec["step"] = step;
        rec["ids"] = schedule.batches[step];
        out += rec.dump() + "\n";
    }
    return out;
}

void write_schedule(const Schedule& schedule, const std::filesystem::path& path) {
    const auto text = serialize_schedule(schedule);
    try {
        detail::write_file_atomic(path, text);
    } catch (const Error& e) {
        throw Error("cannot write schedule " + path.string() + ": " + e.what());
    }
}

Schedule parse_schedule(std::string_view text, std::optional<KnownCorpus> known) {
    Schedule s;
    bool have_header = false;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "record " + std::to_string(lineno);
        nlohmann::json rec;
        try {
            rec = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error&) {
            throw InputError(where + ": invalid JSON");
        }
        if (!rec.is_object()) throw InputError(where + ": not an object");
        try {
            if (!have_header) {
                if (!rec.contains("sampler")) throw InputError(where + ": missing header");
                s.meta.sampler = parse_sampler_kind(rec.at("sampler").get<std::string>());
                s.meta.metric_id = rec.at("metric").get<std::string>();
                s.meta.batch_size = rec.at("batch_size").get<std::uint32_t>();
                s.meta.total_steps = rec.at("total_steps").get<std::uint32_t>();
                s.meta.seed = rec.at("seed").get<std::uint64_t>();
                s.meta.corpus_hash = rec.at("corpus_hash").get<std::string>();
                have_header = true;
                continue;
            }
            if (rec.contains("sampler")) throw InputError(where + ": duplicate header");
            const auto& step = rec.at("step");
            if (!step.is_number_integer()) throw InputError(where + ": step must be an integer");
            const auto step_value = step.get<long long>();
            if (step_value != static_cast<long long>(s.batches.size()))
                throw InputError(where + ": non-contiguous step " + std::to_string(step_value) + " (expected " +
                                 std::to_string(s.batches.size()) + ")");
            const auto& ids = rec.at("ids");
            if (!ids.is_array()) throw InputError(where + ": ids must be an array");
            Batch batch;
            batch.reserve(ids.size());
            for (const auto& v : ids) {
                if (!v.is_number_integer()) throw InputError(where + ": non-integer id");
                const auto id = v.get<long long>();
                if (id < 0) throw InputError(where + ": negative id " + std::to_string(id));
                if (id > static_cast<long long>(std::numeric_limits<DocId>::max()))
                    throw InputError(where + ": id " + std::to_string(id) + " out of range");
                if (known && known->hash == s.meta.corpus_hash && static_cast<std::size_t>(id) >= known->size)
                    throw InputError(where + ": id " + std::to_string(id) + " >= corpus size " +
                                     std::to_string(known->size));
                batch.push_back(static_cast<DocId>(id));
            }
            s.batches.push_back(std::move(batch));
        } catch (const nlohmann::json::exception& e) {
            throw InputError(where + ": " + e.what());
        }
    }
    if (!have_header) throw InputError("missing header record");
    std::optional<std::size_t> size;
    if (known && known->hash == s.meta.corpus_hash) size = known->size;
    try {
        validate_schedule(s, size);
    } catch (const ConsistencyError& e) {
        throw InputError(std::string("invalid schedule: ") + e.what());
    }
    return s;
}

Schedule load_schedule(const std::filesystem::path& path, std::optional<KnownCorpus> known) {
    const auto text = detail::read_file(path);
    try {
        return parse_schedule(text, known);
    } catch (const InputError& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

std::vector<ScheduleStatsRow> schedule_stats(const Schedule& schedule, const ComplexityScores& scores,
                                             const Corpus& corpus) {
    const auto hash = corpus.hash();
    if (schedule.meta.corpus_hash != hash)
        throw ConsistencyError("schedule corpus hash " + schedule.meta.corpus_hash + " does not match corpus " + hash);
    if (!scores.corpus_hash.empty() && scores.corpus_hash != hash)
        throw ConsistencyError("score corpus hash " + scores.corpus_hash + " does not match corpus " + hash);
    validate_scores(scores, corpus.size());
    validate_schedule(schedule, corpus.size());

    const auto order = sort_by_complexity(scores);
    std::vector<std::uint32_t> rank(order.size());
    for (std::uint32_t r = 0; r < order.size(); ++r) rank[order[r]] = r;

    std::vector<ScheduleStatsRow> rows;
    rows.reserve(schedule.batches.size());
    for (std::size_t step = 0; step < schedule.batches.size(); ++step) {
        const auto& b = schedule.batches[step];
        ScheduleStatsRow row;
        row.step = step;
        row.batch_count = b.size();
        for (DocId id : b) {
            row.mean_complexity += scores.scores[id];
            row.mean_rank += rank[id];
            row.mean_length += static_cast<double>(corpus[id].tokens.size());
        }
        const double n = static_cast<double>(b.size());
        row.mean_complexity /= n;
        row.mean_rank /= n;
        row.mean_length /= n;
        rows.push_back(row);
    }
    return rows;
}

std::string schedule_stats_csv(const std::vector<ScheduleStatsRow>& rows) {
    std::string out = "step,mean_complexity,mean_rank,mean_length,batch_count\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%zu\n", r.step, r.mean_complexity, r.mean_rank,
                      r.mean_length, r.batch_count);
        out += buf;
    }
    return out;
}

}  // namespace curriculum
