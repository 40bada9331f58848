//------------------------------------------------------------------------------
// main.cpp
// svacov command-line driver: parse, semantics, features, cluster, spec,
// map, iterate, report
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/clustering.hpp"
#include "svacov/config.hpp"
#include "svacov/errors.hpp"
#include "svacov/feedback.hpp"
#include "svacov/gateway.hpp"
#include "svacov/json_io.hpp"
#include "svacov/log.hpp"
#include "svacov/mapping.hpp"
#include "svacov/semantic.hpp"
#include "svacov/spec_pipeline.hpp"
#include "svacov/structural.hpp"
#include "svacov/sva_ast.hpp"
#include "svacov/util.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace svacov;

namespace {

constexpr const char* kVersion = "svacov 1.0.0";

void require_input(const std::string& path, const std::string& what) {
    if (path.empty())
        throw ArgumentError(what + " is required");
    if (!file_exists(path))
        throw ArgumentError(what + " '" + path + "' does not exist");
}

Config load_config_opt(const std::string& path) {
    if (path.empty())
        return Config{};
    require_input(path, "config file");
    return load_config(path);
}

BackendKind backend_from_flag(const std::string& flag, BackendKind fallback) {
    if (flag.empty())
        return fallback;
    if (flag == "stub")
        return BackendKind::stub;
    if (flag == "http")
        return BackendKind::http;
    throw ArgumentError("--backend must be 'stub' or 'http', got '" + flag + "'");
}

void emit_status(const json& status) {
    std::cout << status.dump() << "\n";
}

std::string iso_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string pct(const std::optional<double>& v) {
    if (!v)
        return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << (*v * 100.0) << "%";
    return os.str();
}

std::string two_dec(double v) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(2) << v;
    return os.str();
}

// --- subcommand bodies -----------------------------------------------------

int cmd_parse(const std::string& in, const std::string& out) {
    require_input(in, "assertions file");
    auto parsed = parse_assertions_file(in);
    int ok = 0;
    for (const auto& pa : parsed)
        if (pa.syntax_ok)
            ++ok;
    save_json(parsed_to_json(parsed), out);
    std::cerr << "parsed " << parsed.size() << " assertion(s), " << ok << " syntax-ok -> "
              << out << "\n";
    emit_status({{"ok", true}, {"out", out}, {"total", parsed.size()}, {"syntax_ok", ok}});
    return 0;
}

int cmd_semantics(const std::string& in, const std::string& backend_flag,
                  const std::string& config_path, const std::string& out) {
    require_input(in, "parsed assertions file");
    Config cfg = load_config_opt(config_path);
    cfg.gateway.backend = backend_from_flag(backend_flag, cfg.gateway.backend);

    auto parsed = parsed_from_json(load_json(in));
    Gateway gw(cfg.gateway);
    PromptTemplate tmpl = PromptTemplate::from_file(cfg.prompts_dir + "/intent.txt");
    auto records = extract_semantics(parsed, gw, tmpl);
    save_json(sem_to_json(records), out);
    std::cerr << "extracted " << records.size() << " intent(s) via " << gw.backend_tag()
              << " -> " << out << "\n";
    emit_status({{"ok", true}, {"out", out}, {"records", records.size()}});
    return 0;
}

int cmd_features(const std::string& in, const std::string& config_path,
                 const std::string& out) {
    require_input(in, "parsed assertions file");
    Config cfg = load_config_opt(config_path);
    auto parsed = parsed_from_json(load_json(in));

    std::vector<UnpaddedVector> batch;
    int skipped = 0;
    for (const auto& pa : parsed) {
        if (!pa.syntax_ok) {
            log::warn("skipping '" + pa.assertion_id + "': no AST (syntax_ok=false)");
            ++skipped;
            continue;
        }
        auto [path, avg] = build_structural_vector(pa);
        batch.push_back({pa.assertion_id, std::move(path), avg});
    }
    auto vectors = pad_batch(batch);
    StructuralWeights w{cfg.clustering.struct_path_weight, cfg.clustering.struct_lca_weight};
    auto dist = distance_matrix(vectors, w);
    save_json(struct_to_json(vectors, dist), out);
    std::cerr << "built " << vectors.size() << " structural vector(s) (pad length "
              << (vectors.empty() ? 0 : vectors.front().path_vector.size()) << ", " << skipped
              << " skipped) -> " << out << "\n";
    emit_status({{"ok", true}, {"out", out}, {"vectors", vectors.size()}, {"skipped", skipped}});
    return 0;
}

int cmd_cluster(const std::string& sem_path, const std::string& struct_path,
                const std::string& config_path, const std::string& out) {
    require_input(sem_path, "semantic records file");
    require_input(struct_path, "structural features file");
    Config cfg = load_config_opt(config_path);

    auto records = sem_from_json(load_json(sem_path));
    auto [vectors, dist] = struct_from_json(load_json(struct_path));

    // align records and vectors to the matrix id order
    std::map<std::string, const SemanticRecord*> sem_by_id;
    for (const auto& r : records)
        sem_by_id[r.assertion_id] = &r;
    std::map<std::string, const StructuralVector*> vec_by_id;
    for (const auto& v : vectors)
        vec_by_id[v.assertion_id] = &v;
    std::vector<SemanticRecord> recs;
    std::vector<StructuralVector> vecs;
    for (const auto& id : dist.ids) {
        auto s = sem_by_id.find(id);
        auto v = vec_by_id.find(id);
        if (s == sem_by_id.end())
            throw ValidationError("no semantic record for assertion '" + id + "'");
        if (v == vec_by_id.end())
            throw ValidationError("no structural vector for assertion '" + id + "'");
        recs.push_back(*s->second);
        vecs.push_back(*v->second);
    }

    ClusteringResult result = cluster_assertions(recs, vecs, dist, cfg.clustering);
    save_json(groups_to_json(result, dist.ids), out);
    std::cerr << "clustered " << recs.size() << " assertion(s) into " << result.groups.size()
              << " group(s) (delta_struct " << result.resolved_delta_struct << ") -> " << out
              << "\n";
    emit_status({{"ok", true}, {"out", out}, {"groups", result.groups.size()}});
    return 0;
}

int cmd_spec(const std::string& in, const std::string& backend_flag,
             const std::string& glossary_path, const std::string& config_path,
             const std::string& out) {
    require_input(in, "spec file");
    if (!glossary_path.empty())
        require_input(glossary_path, "glossary file");
    Config cfg = load_config_opt(config_path);
    cfg.gateway.backend = backend_from_flag(backend_flag, cfg.gateway.backend);

    std::vector<std::string> glossary;
    if (!glossary_path.empty())
        glossary = load_glossary(glossary_path);

    Gateway gw(cfg.gateway);
    auto subs = run_spec_pipeline(read_file(in), gw, glossary, cfg.prompts_dir);
    save_subspecs(subs, out);
    std::size_t points = 0;
    for (const auto& s : subs)
        points += s.points.size();
    std::cerr << "split into " << subs.size() << " SubSpec(s), " << points
              << " functional point(s) -> " << out << "\n";
    emit_status({{"ok", true}, {"out", out}, {"subspecs", subs.size()}, {"points", points}});
    return 0;
}

int cmd_map(const std::string& groups_path, const std::string& subspecs_path,
            const std::string& sem_path, const std::string& parsed_path,
            const std::string& config_path, const std::string& out) {
    require_input(groups_path, "groups file");
    require_input(subspecs_path, "subspecs file");
    require_input(sem_path, "semantic records file");
    require_input(parsed_path, "parsed assertions file");
    Config cfg = load_config_opt(config_path);

    auto groups = groups_from_json(load_json(groups_path));
    auto subspecs = load_fixture(subspecs_path);
    auto sems = sem_from_json(load_json(sem_path));
    auto parsed = parsed_from_json(load_json(parsed_path));

    MappingResult result = map_all(groups, subspecs, sems, parsed, cfg.mapping);
    save_json(mapping_to_json(result), out);
    int covered = 0, total = 0;
    for (const auto& row : result.coverage) {
        covered += row.covered;
        total += row.total;
    }
    std::cerr << "mapped " << groups.size() << " group(s); covered " << covered << "/" << total
              << " point(s) -> " << out << "\n";
    emit_status({{"ok", true}, {"out", out}, {"covered", covered}, {"total", total}});
    return 0;
}

int cmd_iterate(const std::string& spec_path, const std::string& subspecs_path,
                const std::string& assertions_path, const std::string& glossary_path,
                const std::string& generator_cmd, const std::string& synthetic_mode,
                const std::string& coverage_dir, const std::string& config_path,
                const std::string& backend_flag, std::uint64_t seed, bool seed_set,
                const std::string& out_dir) {
    // validate every input before touching the run directory
    if (spec_path.empty() && subspecs_path.empty())
        throw ArgumentError("either --spec or --subspecs is required");
    if (!spec_path.empty())
        require_input(spec_path, "spec file");
    if (!subspecs_path.empty())
        require_input(subspecs_path, "subspecs fixture");
    require_input(assertions_path, "assertions file");
    if (!glossary_path.empty())
        require_input(glossary_path, "glossary file");
    if (generator_cmd.empty() && synthetic_mode.empty())
        throw ArgumentError("either --generator-cmd or --synthetic is required");
    if (!generator_cmd.empty() && !synthetic_mode.empty())
        throw ArgumentError("--generator-cmd and --synthetic are mutually exclusive");
    if (!coverage_dir.empty() && !fs::is_directory(coverage_dir))
        throw ArgumentError("coverage dir '" + coverage_dir + "' does not exist");
    if (out_dir.empty())
        throw ArgumentError("--out run directory is required");
    Config cfg = load_config_opt(config_path);
    cfg.gateway.backend = backend_from_flag(backend_flag, cfg.gateway.backend);
    if (seed_set)
        cfg.clustering.seed = seed;
    if (fs::exists(out_dir) && !fs::is_empty(out_dir))
        throw ArgumentError("run directory '" + out_dir + "' already exists and is not empty");

    Gateway gw(cfg.gateway);
    std::vector<std::string> glossary;
    if (!glossary_path.empty())
        glossary = load_glossary(glossary_path);

    LoopInputs inputs;
    inputs.subspecs = subspecs_path.empty()
                          ? run_spec_pipeline(read_file(spec_path), gw, glossary,
                                              cfg.prompts_dir)
                          : load_fixture(subspecs_path);
    inputs.seed = parse_assertions_file(assertions_path);
    inputs.run_dir = out_dir;
    inputs.coverage_dir = coverage_dir;

    std::unique_ptr<Generator> gen;
    if (!generator_cmd.empty()) {
        gen = std::make_unique<ExternalCommandGenerator>(generator_cmd,
                                                         cfg.loop.generator_timeout_ms);
    } else if (synthetic_mode == "perfect") {
        gen = std::make_unique<SyntheticGenerator>(SyntheticMode::perfect);
    } else if (synthetic_mode == "one") {
        gen = std::make_unique<SyntheticGenerator>(SyntheticMode::one_point);
    } else if (synthetic_mode == "none") {
        gen = std::make_unique<SyntheticGenerator>(SyntheticMode::none);
    } else {
        throw ArgumentError("--synthetic must be perfect|one|none, got '" + synthetic_mode +
                            "'");
    }

    fs::create_directories(out_dir);
    save_subspecs(inputs.subspecs, (fs::path(out_dir) / "subspecs.json").string());

    LoopResult result = run_loop(cfg, inputs, gw, *gen);

    json manifest;
    manifest["created_at"] = iso_utc_now();
    manifest["version"] = kVersion;
    manifest["seed"] = cfg.clustering.seed;
    manifest["generator"] = gen->name();
    manifest["config"] = config_to_json(cfg);
    json hashes;
    for (const auto& p : {spec_path, subspecs_path, assertions_path, glossary_path,
                          config_path})
        if (!p.empty())
            hashes[p] = hex64(fnv1a64(read_file(p)));
    manifest["inputs"] = std::move(hashes);
    manifest["rounds"] = result.state.round + 1;
    manifest["converged"] = result.state.converged;
    save_json(manifest, (fs::path(out_dir) / "manifest.json").string());

    std::ostringstream cov;
    for (const auto& [id, ratio] : result.state.coverage_by_subspec)
        cov << " " << id << "=" << two_dec(ratio);
    std::cerr << (result.state.converged ? "converged" : "stopped") << " at round "
              << result.state.round << "; coverage:" << cov.str() << "; N/S/P "
              << format_nsp(result.rounds.back().metrics) << " -> " << out_dir << "\n";
    emit_status({{"ok", true},
                 {"out", out_dir},
                 {"rounds", result.state.round + 1},
                 {"converged", result.state.converged}});
    return 0;
}

int cmd_report(const std::string& run_dir, const std::string& format) {
    if (run_dir.empty() || !fs::is_directory(run_dir))
        throw ArgumentError("run directory '" + run_dir + "' does not exist");
    if (format != "table" && format != "json")
        throw ArgumentError("--format must be 'table' or 'json'");

    json rounds = json::array();
    for (int k = 0;; ++k) {
        fs::path dir = fs::path(run_dir) / ("round" + std::to_string(k));
        if (!fs::is_directory(dir))
            break;
        RunMetrics metrics = metrics_from_json(load_json((dir / "metrics.json").string()));
        MappingResult mapping = mapping_from_json(load_json((dir / "mapping.json").string()));
        int covered = 0, total = 0;
        json cov = json::object();
        for (const auto& row : mapping.coverage) {
            covered += row.covered;
            total += row.total;
            cov[row.subspec_id] = row.ratio;
        }
        json r;
        r["round"] = k;
        r["n_total"] = metrics.n_total;
        r["n_syntax"] = metrics.n_syntax;
        r["n_fpv"] = metrics.n_fpv;
        r["nsp"] = format_nsp(metrics);
        r["bfc"] = metrics.bfc ? json(*metrics.bfc) : json(nullptr);
        r["sfc"] = metrics.sfc ? json(*metrics.sfc) : json(nullptr);
        r["tfc"] = metrics.tfc ? json(*metrics.tfc) : json(nullptr);
        r["coverage"] = std::move(cov);
        r["aggregate_ratio"] = total == 0 ? 1.0 : static_cast<double>(covered) / total;
        r["feedback"] = fs::exists(dir / "feedback.json");
        rounds.push_back(std::move(r));
    }
    if (rounds.empty())
        throw SchemaError("no round directories under '" + run_dir + "'");

    if (format == "json") {
        json root;
        root["run"] = run_dir;
        root["rounds"] = rounds;
        std::cout << root.dump(2) << "\n";
        std::cerr << "rendered " << rounds.size() << " round(s)\n";
        return 0;
    }

    std::ostringstream table;
    table << std::left << std::setw(7) << "round" << std::setw(14) << "N/S/P" << std::setw(10)
          << "BFC" << std::setw(10) << "SFC" << std::setw(10) << "TFC"
          << "coverage\n";
    table << std::string(76, '-') << "\n";
    for (const auto& r : rounds) {
        std::ostringstream cov;
        for (auto it = r["coverage"].begin(); it != r["coverage"].end(); ++it)
            cov << it.key() << "=" << two_dec(it.value().get<double>()) << " ";
        cov << "| overall " << two_dec(r["aggregate_ratio"].get<double>());
        auto opt = [&](const char* key) -> std::optional<double> {
            return r[key].is_null() ? std::nullopt
                                    : std::optional<double>(r[key].get<double>());
        };
        table << std::left << std::setw(7) << r["round"].get<int>() << std::setw(14)
              << r["nsp"].get<std::string>() << std::setw(10) << pct(opt("bfc"))
              << std::setw(10) << pct(opt("sfc")) << std::setw(10) << pct(opt("tfc"))
              << cov.str() << "\n";
    }
    std::cout << table.str();
    std::cerr << "rendered " << rounds.size() << " round(s)\n";
    return 0;
}

int dispatch(int argc, char** argv) {
    CLI::App app{"assertion-to-specification coverage pipeline"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string log_level = "warn";
    app.add_option("--log-level", log_level, "debug|info|warn|error|off")
        ->capture_default_str();
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "override clustering seed");

    // parse
    auto* parse_cmd = app.add_subcommand("parse", "parse assertions into ASTs");
    std::string parse_in, parse_out = "parsed.json";
    parse_cmd->add_option("--in", parse_in, ".jsonl of {id, sva} or a .sv file")->required();
    parse_cmd->add_option("--out", parse_out, "output file")->capture_default_str();

    // semantics
    auto* sem_cmd = app.add_subcommand("semantics", "extract intents and embeddings");
    std::string sem_in, sem_backend, sem_config, sem_out = "sem.json";
    sem_cmd->add_option("--in", sem_in, "parsed.json")->required();
    sem_cmd->add_option("--backend", sem_backend, "stub|http");
    sem_cmd->add_option("--config", sem_config, "cfg.toml");
    sem_cmd->add_option("--out", sem_out, "output file")->capture_default_str();

    // features
    auto* feat_cmd = app.add_subcommand("features", "structural vectors and distances");
    std::string feat_in, feat_config, feat_out = "struct.json";
    feat_cmd->add_option("--in", feat_in, "parsed.json")->required();
    feat_cmd->add_option("--config", feat_config, "cfg.toml");
    feat_cmd->add_option("--out", feat_out, "output file")->capture_default_str();

    // cluster
    auto* clus_cmd = app.add_subcommand("cluster", "group assertions");
    std::string clus_sem, clus_struct, clus_config, clus_out = "groups.json";
    clus_cmd->add_option("--sem", clus_sem, "sem.json")->required();
    clus_cmd->add_option("--struct", clus_struct, "struct.json")->required();
    clus_cmd->add_option("--config", clus_config, "cfg.toml");
    clus_cmd->add_option("--out", clus_out, "output file")->capture_default_str();

    // spec
    auto* spec_cmd = app.add_subcommand("spec", "split a spec into SubSpecs and points");
    std::string spec_in, spec_backend, spec_glossary, spec_config,
        spec_out = "subspecs.json";
    spec_cmd->add_option("--in", spec_in, "spec text/markdown file")->required();
    spec_cmd->add_option("--backend", spec_backend, "stub|http");
    spec_cmd->add_option("--glossary", spec_glossary, "known signals, one per line");
    spec_cmd->add_option("--config", spec_config, "cfg.toml");
    spec_cmd->add_option("--out", spec_out, "output file")->capture_default_str();

    // map
    auto* map_cmd = app.add_subcommand("map", "map groups to SubSpecs and points");
    std::string map_groups_path, map_subspecs, map_sem, map_parsed, map_config,
        map_out = "mapping.json";
    map_cmd->add_option("--groups", map_groups_path, "groups.json")->required();
    map_cmd->add_option("--subspecs", map_subspecs, "subspecs.json")->required();
    map_cmd->add_option("--sem", map_sem, "sem.json")->required();
    map_cmd->add_option("--parsed", map_parsed, "parsed.json (for signal sets)")->required();
    map_cmd->add_option("--config", map_config, "cfg.toml");
    map_cmd->add_option("--out", map_out, "output file")->capture_default_str();

    // iterate
    auto* iter_cmd = app.add_subcommand("iterate", "run the coverage feedback loop");
    std::string it_spec, it_subspecs, it_assertions, it_glossary, it_gen, it_synth,
        it_coverage, it_config, it_backend, it_out;
    iter_cmd->add_option("--spec", it_spec, "spec file (split via the gateway)");
    iter_cmd->add_option("--subspecs", it_subspecs, "pre-extracted subspecs.json fixture");
    iter_cmd->add_option("--assertions", it_assertions, "seed assertions (.jsonl or .sv)")
        ->required();
    iter_cmd->add_option("--glossary", it_glossary, "known signals, one per line");
    iter_cmd->add_option("--generator-cmd", it_gen,
                         "external generator; feedback JSON on stdin, {id, sva} array out");
    iter_cmd->add_option("--synthetic", it_synth, "bundled generator: perfect|one|none");
    iter_cmd->add_option("--coverage-dir", it_coverage, "per-round coverage reports");
    iter_cmd->add_option("--config", it_config, "cfg.toml");
    iter_cmd->add_option("--backend", it_backend, "stub|http");
    iter_cmd->add_option("--out", it_out, "run directory")->required();

    // report
    auto* rep_cmd = app.add_subcommand("report", "render a finished run");
    std::string rep_run, rep_format = "table";
    rep_cmd->add_option("--run", rep_run, "run directory")->required();
    rep_cmd->add_option("--format", rep_format, "table|json")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e); // prints help/usage or the parse error
        return code == 0 ? 0 : 3;
    }
    log::set_level(log_level);

    if (parse_cmd->parsed())
        return cmd_parse(parse_in, parse_out);
    if (sem_cmd->parsed())
        return cmd_semantics(sem_in, sem_backend, sem_config, sem_out);
    if (feat_cmd->parsed())
        return cmd_features(feat_in, feat_config, feat_out);
    if (clus_cmd->parsed())
        return cmd_cluster(clus_sem, clus_struct, clus_config, clus_out);
    if (spec_cmd->parsed())
        return cmd_spec(spec_in, spec_backend, spec_glossary, spec_config, spec_out);
    if (map_cmd->parsed())
        return cmd_map(map_groups_path, map_subspecs, map_sem, map_parsed, map_config,
                       map_out);
    if (iter_cmd->parsed())
        return cmd_iterate(it_spec, it_subspecs, it_assertions, it_glossary, it_gen, it_synth,
                           it_coverage, it_config, it_backend, seed, seed_opt->count() > 0,
                           it_out);
    if (rep_cmd->parsed())
        return cmd_report(rep_run, rep_format);
    return 3; // unreachable: require_subcommand enforces one
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const ArgumentError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const AuthError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const BackendError& e) {
        std::cerr << "backend error: " << e.what() << "\n";
        return 2;
    } catch (const GeneratorError& e) {
        std::cerr << "generator error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
