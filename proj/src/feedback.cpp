//------------------------------------------------------------------------------
// feedback.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/feedback.hpp"

#include "svacov/errors.hpp"
#include "svacov/json_io.hpp"
#include "svacov/log.hpp"
#include "svacov/structural.hpp"
#include "svacov/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <thread>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace svacov {

using nlohmann::json;

// --- coverage ingestion -----------------------------------------------------

std::pair<std::vector<CoiCoverage>, std::vector<FpvVerdict>>
ingest_coverage(const std::string& path, const std::set<std::string>& known_ids) {
    json root = load_json(path);
    if (!root.is_object() || !root.contains("coi") || !root.contains("fpv") ||
        !root["coi"].is_array() || !root["fpv"].is_array())
        throw SchemaError(path + ": expected {\"coi\": [...], \"fpv\": [...]}");

    std::vector<CoiCoverage> cois;
    std::size_t dropped = 0;
    for (const auto& rec : root["coi"]) {
        if (!rec.is_object() || !rec.contains("assertion_id") || !rec.contains("bfc") ||
            !rec.contains("sfc") || !rec.contains("tfc") || !rec["assertion_id"].is_string() ||
            !rec["bfc"].is_number() || !rec["sfc"].is_number() || !rec["tfc"].is_number())
            throw SchemaError(path + ": malformed coi record");
        CoiCoverage c;
        c.assertion_id = rec["assertion_id"].get<std::string>();
        c.bfc = rec["bfc"].get<double>();
        c.sfc = rec["sfc"].get<double>();
        c.tfc = rec["tfc"].get<double>();
        for (double x : {c.bfc, c.sfc, c.tfc})
            if (x < 0.0 || x > 1.0)
                throw RangeError(path + ": coverage for '" + c.assertion_id +
                                 "' is outside [0,1]");
        if (!known_ids.count(c.assertion_id)) {
            ++dropped;
            continue;
        }
        cois.push_back(std::move(c));
    }

    std::vector<FpvVerdict> verdicts;
    for (const auto& rec : root["fpv"]) {
        if (!rec.is_object() || !rec.contains("assertion_id") || !rec.contains("passed") ||
            !rec["assertion_id"].is_string() || !rec["passed"].is_boolean())
            throw SchemaError(path + ": malformed fpv record");
        FpvVerdict v;
        v.assertion_id = rec["assertion_id"].get<std::string>();
        v.fpv_passed = rec["passed"].get<bool>();
        if (!known_ids.count(v.assertion_id)) {
            ++dropped;
            continue;
        }
        verdicts.push_back(std::move(v));
    }
    if (dropped)
        log::warn(path + ": dropped " + std::to_string(dropped) +
                  " record(s) naming unknown assertions");
    return {std::move(cois), std::move(verdicts)};
}

RunMetrics compute_metrics(const std::vector<ParsedAssertion>& assertions,
                           const std::vector<FpvVerdict>& verdicts,
                           const std::vector<CoiCoverage>& coverages) {
    RunMetrics m;
    m.n_total = static_cast<int>(assertions.size());

    std::set<std::string> syntax_ok_ids;
    std::set<std::string> all_ids;
    for (const auto& pa : assertions) {
        all_ids.insert(pa.assertion_id);
        if (pa.syntax_ok) {
            ++m.n_syntax;
            syntax_ok_ids.insert(pa.assertion_id);
        }
    }
    for (const auto& v : verdicts)
        if (v.fpv_passed && syntax_ok_ids.count(v.assertion_id))
            ++m.n_fpv;

    double bfc = 0.0, sfc = 0.0, tfc = 0.0;
    int n = 0;
    for (const auto& c : coverages) {
        if (!all_ids.count(c.assertion_id))
            continue;
        bfc += c.bfc;
        sfc += c.sfc;
        tfc += c.tfc;
        ++n;
    }
    if (n > 0) {
        m.bfc = bfc / n;
        m.sfc = sfc / n;
        m.tfc = tfc / n;
    }
    return m;
}

std::string format_nsp(const RunMetrics& m) {
    return std::to_string(m.n_total) + "/" + std::to_string(m.n_syntax) + "/" +
           std::to_string(m.n_fpv);
}

// --- feedback payload -----------------------------------------------------------

namespace {

std::string excerpt_of(const SubSpec& sub) {
    std::string body = collapse_ws(sub.body);
    constexpr std::size_t kMax = 240;
    if (body.size() > kMax)
        body = body.substr(0, kMax) + "...";
    return sub.title + ": " + body;
}

} // namespace

FeedbackPayload build_feedback(const IterationState& state,
                               const std::vector<SubSpec>& subspecs,
                               const MappingResult& mapping) {
    if (state.converged)
        throw AlreadyConverged("every SubSpec is at or above theta=" +
                               std::to_string(state.theta));

    std::set<std::string> covered_points;
    for (const auto& a : mapping.point_alignments)
        if (a.accepted)
            covered_points.insert(a.point_id);

    std::map<std::string, double> ratio_by_id;
    for (const auto& row : mapping.coverage)
        ratio_by_id[row.subspec_id] = row.ratio;

    FeedbackPayload payload;
    payload.round = state.round;
    for (const auto& sub : subspecs) {
        double ratio = ratio_by_id.count(sub.subspec_id) ? ratio_by_id[sub.subspec_id] : 1.0;
        if (ratio >= state.theta)
            continue;
        FeedbackItem item;
        item.subspec_id = sub.subspec_id;
        item.subspec_excerpt = excerpt_of(sub);
        item.coverage_ratio = ratio;
        std::set<std::string> sig_union;
        for (const auto& p : sub.points) {
            if (covered_points.count(p.point_id)) {
                item.covered_statements.push_back(p.statement);
                continue;
            }
            item.uncovered.push_back({p.point_id, p.statement, p.signals});
            sig_union.insert(p.signals.begin(), p.signals.end());
        }
        item.signals.assign(sig_union.begin(), sig_union.end());
        payload.items.push_back(std::move(item));
    }
    std::stable_sort(payload.items.begin(), payload.items.end(),
                     [](const FeedbackItem& a, const FeedbackItem& b) {
                         if (a.coverage_ratio != b.coverage_ratio)
                             return a.coverage_ratio < b.coverage_ratio;
                         return a.subspec_id < b.subspec_id;
                     });
    return payload;
}

std::string render_feedback_prompt(const FeedbackPayload& payload,
                                   const std::string& prompts_dir) {
    PromptTemplate tmpl = PromptTemplate::from_file(prompts_dir + "/feedback.txt");
    std::string items;
    for (const auto& item : payload.items) {
        items += "SUBSPEC " + item.subspec_id + " (coverage " +
                 std::to_string(item.coverage_ratio) + "): " + item.subspec_excerpt + "\n";
        items += "  uncovered:\n";
        for (const auto& u : item.uncovered)
            items += "    - [" + u.point_id + "] " + u.statement + " (signals: " +
                     join(u.signals, ", ") + ")\n";
        if (!item.covered_statements.empty()) {
            items += "  already covered:\n";
            for (const auto& s : item.covered_statements)
                items += "    - " + s + "\n";
        }
    }
    return tmpl.render({{"ROUND", std::to_string(payload.round)}, {"ITEMS", items}});
}

// --- external command generator ------------------------------------------------

ExternalCommandGenerator::ExternalCommandGenerator(std::string command, long timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {
    if (command_.empty())
        throw ArgumentError("generator command must not be empty");
}

namespace {

/// Drains an fd into `out`; returns false when the fd would block.
void drain(int fd, std::string& out) {
    char buf[4096];
    for (;;) {
        ssize_t n = read(fd, buf, sizeof(buf));
        if (n > 0) {
            out.append(buf, static_cast<std::size_t>(n));
            continue;
        }
        if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK))
            return;
        return; // EOF or hard error; caller decides via waitpid
    }
}

void set_nonblocking(int fd) {
    int flags = fcntl(fd, F_GETFL, 0);
    fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

} // namespace

std::vector<GeneratedAssertion>
ExternalCommandGenerator::generate(const FeedbackPayload& payload) {
    std::string input = feedback_to_json(payload).dump();

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (pipe(in_pipe) != 0 || pipe(out_pipe) != 0 || pipe(err_pipe) != 0)
        throw GeneratorError("cannot create pipes: " + std::string(std::strerror(errno)));

    pid_t pid = fork();
    if (pid < 0)
        throw GeneratorError("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(in_pipe[0], STDIN_FILENO);
        dup2(out_pipe[1], STDOUT_FILENO);
        dup2(err_pipe[1], STDERR_FILENO);
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1], err_pipe[0],
                       err_pipe[1]})
            close(fd);
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }

    close(in_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[1]);
    set_nonblocking(out_pipe[0]);
    set_nonblocking(err_pipe[0]);

    // feed stdin; a generator that never reads would deadlock a blocking write,
    // so write in chunks while draining the output pipes
    set_nonblocking(in_pipe[1]);
    std::size_t written = 0;
    std::string out_text, err_text;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms_);

    bool timed_out = false;
    int status = 0;
    for (;;) {
        if (written < input.size()) {
            ssize_t n = write(in_pipe[1], input.data() + written, input.size() - written);
            if (n > 0)
                written += static_cast<std::size_t>(n);
            else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK)
                written = input.size(); // broken pipe: generator closed stdin early
            if (written >= input.size())
                close(in_pipe[1]);
        }
        drain(out_pipe[0], out_text);
        drain(err_pipe[0], err_text);

        pid_t done = waitpid(pid, &status, WNOHANG);
        if (done == pid)
            break;
        if (std::chrono::steady_clock::now() > deadline) {
            kill(pid, SIGKILL);
            waitpid(pid, &status, 0);
            timed_out = true;
            break;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
    if (written < input.size())
        close(in_pipe[1]);
    drain(out_pipe[0], out_text);
    drain(err_pipe[0], err_text);
    close(out_pipe[0]);
    close(err_pipe[0]);

    if (timed_out)
        throw GeneratorError("generator '" + command_ + "' exceeded " +
                             std::to_string(timeout_ms_) + " ms");
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0)
        throw GeneratorError("generator '" + command_ + "' failed (" +
                             (WIFEXITED(status)
                                  ? "exit " + std::to_string(WEXITSTATUS(status))
                                  : "killed") +
                             "): " + trim(err_text));

    json arr = json::parse(out_text, nullptr, false);
    if (arr.is_discarded() || !arr.is_array())
        throw GeneratorError("generator output is not a JSON array");
    std::vector<GeneratedAssertion> out;
    for (const auto& rec : arr) {
        if (!rec.is_object() || !rec.contains("id") || !rec.contains("sva") ||
            !rec["id"].is_string() || !rec["sva"].is_string())
            throw GeneratorError("generator entries must be {id, sva}");
        out.push_back({rec["id"].get<std::string>(), rec["sva"].get<std::string>()});
    }
    return out;
}

// --- synthetic generators ---------------------------------------------------------

std::vector<GeneratedAssertion> synthetic_generate(const FeedbackPayload& payload,
                                                   SyntheticMode mode) {
    std::vector<GeneratedAssertion> out;
    if (mode == SyntheticMode::none)
        return out;
    int n = 0;
    for (const auto& item : payload.items) {
        for (const auto& point : item.uncovered) {
            GeneratedAssertion g;
            g.id = "g" + std::to_string(payload.round) + "_" + std::to_string(++n);
            g.sva = "assert property (" + join(point.signals, " && ") + ");";
            out.push_back(std::move(g));
            if (mode == SyntheticMode::one_point)
                return out;
        }
        if (mode == SyntheticMode::one_point && !out.empty())
            return out;
    }
    return out;
}

std::string SyntheticGenerator::name() const {
    switch (mode_) {
    case SyntheticMode::perfect:
        return "synthetic:perfect";
    case SyntheticMode::one_point:
        return "synthetic:one";
    default:
        return "synthetic:none";
    }
}

// --- the loop ----------------------------------------------------------------

namespace {

namespace fs = std::filesystem;

struct LoopWorkspace {
    // id -> artifacts, kept across rounds so only new assertions hit the gateway
    std::map<std::string, ParsedAssertion> parsed;
    std::map<std::string, SemanticRecord> sems;
    std::map<std::string, std::pair<std::vector<int>, double>> unpadded; // path, avg_lca
    std::set<std::string> normalized_texts; // duplicate detection
};

/// All alive assertions in id order, re-padded as one batch.
std::vector<StructuralVector> padded_vectors(const LoopWorkspace& ws,
                                             const std::set<std::string>& alive) {
    std::vector<UnpaddedVector> batch;
    for (const auto& id : alive) {
        const auto& [path, avg] = ws.unpadded.at(id);
        batch.push_back({id, path, avg});
    }
    return pad_batch(batch);
}

void write_round(const fs::path& dir, const std::vector<ParsedAssertion>& all_parsed,
                 const std::vector<SemanticRecord>& sems,
                 const std::vector<StructuralVector>& vecs,
                 const StructuralDistanceMatrix& dist, const ClusteringResult& clusters,
                 const std::vector<std::string>& ids, const MappingResult& mapping,
                 const RunMetrics& metrics) {
    fs::create_directories(dir);
    save_json(parsed_to_json(all_parsed), (dir / "parsed.json").string());
    save_json(sem_to_json(sems), (dir / "sem.json").string());
    save_json(struct_to_json(vecs, dist), (dir / "struct.json").string());
    save_json(groups_to_json(clusters, ids), (dir / "groups.json").string());
    save_json(mapping_to_json(mapping), (dir / "mapping.json").string());
    save_json(metrics_to_json(metrics), (dir / "metrics.json").string());
}

} // namespace

LoopResult run_loop(const Config& cfg, const LoopInputs& inputs, Gateway& gw, Generator& gen) {
    if (inputs.subspecs.empty())
        throw ArgumentError("run_loop requires at least one SubSpec");
    if (inputs.seed.empty())
        throw ArgumentError("run_loop requires at least one seed assertion");

    PromptTemplate intent_template =
        PromptTemplate::from_file(cfg.prompts_dir + "/intent.txt");

    LoopWorkspace ws;
    LoopResult result;
    result.state.theta = cfg.loop.theta;
    result.state.max_rounds = cfg.loop.max_rounds;

    for (const auto& pa : inputs.seed) {
        if (ws.parsed.count(pa.assertion_id))
            throw ArgumentError("duplicate seed assertion id '" + pa.assertion_id + "'");
        ws.parsed.emplace(pa.assertion_id, pa);
        ws.normalized_texts.insert(collapse_ws(pa.raw_text));
        if (pa.syntax_ok)
            result.state.alive_assertions.insert(pa.assertion_id);
    }
    if (result.state.alive_assertions.empty())
        throw ArgumentError("no seed assertion parses; the loop has nothing to map");

    int total_points = 0;
    for (const auto& sub : inputs.subspecs)
        total_points += static_cast<int>(sub.points.size());

    for (int round = 0;; ++round) {
        result.state.round = round;

        // features for assertions not seen before
        for (const auto& id : result.state.alive_assertions) {
            const ParsedAssertion& pa = ws.parsed.at(id);
            if (!ws.sems.count(id)) {
                SemanticRecord rec;
                rec.assertion_id = id;
                rec.intent_text = extract_intent(pa, gw, intent_template);
                rec.embedding = embed_intent(rec.intent_text, gw);
                rec.backend_tag = gw.backend_tag();
                ws.sems.emplace(id, std::move(rec));
            }
            if (!ws.unpadded.count(id))
                ws.unpadded.emplace(id, build_structural_vector(pa));
        }

        // cluster the alive set
        std::vector<std::string> ids(result.state.alive_assertions.begin(),
                                     result.state.alive_assertions.end());
        std::vector<SemanticRecord> sems;
        std::vector<ParsedAssertion> alive_parsed;
        for (const auto& id : ids) {
            sems.push_back(ws.sems.at(id));
            alive_parsed.push_back(ws.parsed.at(id));
        }
        std::vector<StructuralVector> vecs = padded_vectors(ws, result.state.alive_assertions);
        StructuralWeights weights{cfg.clustering.struct_path_weight,
                                  cfg.clustering.struct_lca_weight};
        StructuralDistanceMatrix dist = distance_matrix(vecs, weights);
        ClusteringResult clusters = cluster_assertions(sems, vecs, dist, cfg.clustering);

        MappingResult mapping =
            map_all(clusters.groups, inputs.subspecs, sems, alive_parsed, cfg.mapping);

        result.state.coverage_by_subspec.clear();
        result.state.uncovered_points.clear();
        std::set<std::string> covered;
        for (const auto& a : mapping.point_alignments)
            if (a.accepted)
                covered.insert(a.point_id);
        int covered_total = 0;
        result.state.converged = true;
        for (const auto& row : mapping.coverage) {
            result.state.coverage_by_subspec[row.subspec_id] = row.ratio;
            covered_total += row.covered;
            if (row.ratio < cfg.loop.theta)
                result.state.converged = false;
        }
        for (const auto& sub : inputs.subspecs)
            for (const auto& p : sub.points)
                if (!covered.count(p.point_id))
                    result.state.uncovered_points.push_back(p.point_id);

        // metrics over everything seen so far, with optional external verdicts
        std::vector<ParsedAssertion> all_parsed;
        for (const auto& [id, pa] : ws.parsed)
            all_parsed.push_back(pa);
        std::vector<CoiCoverage> cois;
        std::vector<FpvVerdict> verdicts;
        if (!inputs.coverage_dir.empty()) {
            fs::path report =
                fs::path(inputs.coverage_dir) / ("round" + std::to_string(round) + ".json");
            if (fs::exists(report)) {
                std::set<std::string> known;
                for (const auto& [id, pa] : ws.parsed)
                    known.insert(id);
                std::tie(cois, verdicts) = ingest_coverage(report.string(), known);
            }
        }
        RunMetrics metrics = compute_metrics(all_parsed, verdicts, cois);

        RoundRecord record;
        record.round = round;
        record.metrics = metrics;
        record.coverage = mapping.coverage;
        record.aggregate_ratio =
            total_points == 0 ? 1.0
                              : static_cast<double>(covered_total) / total_points;

        fs::path round_dir;
        if (!inputs.run_dir.empty()) {
            round_dir = fs::path(inputs.run_dir) / ("round" + std::to_string(round));
            write_round(round_dir, all_parsed, sems, vecs, dist, clusters, ids, mapping,
                        metrics);
        }

        if (result.state.converged || round >= cfg.loop.max_rounds) {
            result.rounds.push_back(std::move(record));
            result.assertions = std::move(all_parsed);
            return result;
        }

        FeedbackPayload payload = build_feedback(result.state, inputs.subspecs, mapping);
        record.feedback_emitted = true;
        if (!inputs.run_dir.empty())
            save_json(feedback_to_json(payload), (round_dir / "feedback.json").string());

        std::vector<GeneratedAssertion> generated;
        try {
            generated = gen.generate(payload);
        } catch (const GeneratorError& e) {
            throw GeneratorError("round " + std::to_string(round) + ": " + e.what());
        }

        for (const auto& g : generated) {
            if (g.id.empty() || ws.parsed.count(g.id)) {
                log::warn("generator returned a stale or empty id ('" + g.id +
                          "'); dropping it");
                continue;
            }
            std::string norm = collapse_ws(g.sva);
            if (!ws.normalized_texts.insert(norm).second) {
                log::warn("generator repeated an existing assertion text for id '" + g.id +
                          "'; dropping it");
                continue;
            }
            ParsedAssertion pa = parse_assertion(g.id, g.sva);
            if (pa.syntax_ok) {
                ws.unpadded.emplace(g.id, build_structural_vector(pa));
                result.state.alive_assertions.insert(g.id);
            } else {
                log::warn("generated assertion '" + g.id + "' failed to parse: " +
                          pa.diagnostic);
            }
            ws.parsed.emplace(g.id, std::move(pa));
            ++record.generated;
        }
        result.rounds.push_back(std::move(record));
    }
}

} // namespace svacov
