//------------------------------------------------------------------------------
// json_io.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/json_io.hpp"

#include "svacov/errors.hpp"
#include "svacov/util.hpp"

#include <algorithm>

namespace svacov {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* field, const std::string& what) {
    if (!j.is_object() || !j.contains(field))
        throw SchemaError(what + ": missing field '" + field + "'");
    return j[field];
}

template <typename T>
T get_as(const json& j, const char* field, const std::string& what) {
    try {
        return require(j, field, what).get<T>();
    } catch (const json::exception& e) {
        throw SchemaError(what + ": field '" + field + "' has the wrong type");
    }
}

bool ends_with(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace

std::vector<ParsedAssertion> parse_assertions_file(const std::string& path) {
    std::vector<ParsedAssertion> out;
    std::string content = read_file(path);
    if (ends_with(path, ".sv")) {
        auto statements = extract_sv_assertions(content);
        for (std::size_t i = 0; i < statements.size(); ++i)
            out.push_back(parse_assertion("a" + std::to_string(i + 1), statements[i]));
        return out;
    }
    std::size_t line_no = 0;
    for (const auto& line : split_lines(content)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded())
            throw SchemaError(path + ":" + std::to_string(line_no) + ": not valid JSON");
        const std::string where = path + ":" + std::to_string(line_no);
        out.push_back(parse_assertion(get_as<std::string>(rec, "id", where),
                                      get_as<std::string>(rec, "sva", where)));
    }
    return out;
}

// --- parsed.json ---------------------------------------------------------------

json parsed_to_json(const std::vector<ParsedAssertion>& pas) {
    json arr = json::array();
    for (const auto& pa : pas) {
        json j;
        j["assertion_id"] = pa.assertion_id;
        j["raw_text"] = pa.raw_text;
        j["syntax_ok"] = pa.syntax_ok;
        j["signals"] = pa.signals;
        if (!pa.diagnostic.empty())
            j["diagnostic"] = pa.diagnostic;
        if (pa.ast) {
            json nodes = json::array();
            for (int id = 0; id < static_cast<int>(pa.ast->size()); ++id) {
                const AstNode& n = pa.ast->node(id);
                json nj;
                nj["id"] = n.id;
                nj["kind"] = node_kind_name(n.kind);
                nj["code"] = node_kind_code(n.kind);
                nj["text"] = n.text;
                nj["children"] = n.children;
                nj["span"] = {n.span.begin, n.span.end};
                nodes.push_back(std::move(nj));
            }
            j["ast"] = {{"root", pa.ast->root()}, {"nodes", std::move(nodes)}};
        }
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<ParsedAssertion> parsed_from_json(const json& j) {
    if (!j.is_array())
        throw SchemaError("parsed assertions: top level must be an array");
    std::vector<ParsedAssertion> out;
    for (const auto& rec : j) {
        const std::string where = "parsed assertion " + std::to_string(out.size() + 1);
        ParsedAssertion pa =
            parse_assertion(get_as<std::string>(rec, "assertion_id", where),
                            get_as<std::string>(rec, "raw_text", where));
        if (pa.syntax_ok != get_as<bool>(rec, "syntax_ok", where))
            throw SchemaError(where + ": stored syntax_ok disagrees with re-parse");
        out.push_back(std::move(pa));
    }
    return out;
}

// --- sem.json ---------------------------------------------------------------

json sem_to_json(const std::vector<SemanticRecord>& recs) {
    json arr = json::array();
    for (const auto& r : recs) {
        json j;
        j["assertion_id"] = r.assertion_id;
        j["intent_text"] = r.intent_text;
        j["embedding"] = r.embedding;
        j["backend_tag"] = r.backend_tag;
        arr.push_back(std::move(j));
    }
    return arr;
}

std::vector<SemanticRecord> sem_from_json(const json& j) {
    if (!j.is_array())
        throw SchemaError("semantic records: top level must be an array");
    std::vector<SemanticRecord> out;
    for (const auto& rec : j) {
        const std::string where = "semantic record " + std::to_string(out.size() + 1);
        SemanticRecord r;
        r.assertion_id = get_as<std::string>(rec, "assertion_id", where);
        r.intent_text = get_as<std::string>(rec, "intent_text", where);
        r.embedding = get_as<std::vector<double>>(rec, "embedding", where);
        r.backend_tag = get_as<std::string>(rec, "backend_tag", where);
        out.push_back(std::move(r));
    }
    return out;
}

// --- struct.json ---------------------------------------------------------------

json struct_to_json(const std::vector<StructuralVector>& vecs,
                    const StructuralDistanceMatrix& dist) {
    json arr = json::array();
    for (const auto& v : vecs) {
        json j;
        j["assertion_id"] = v.assertion_id;
        j["path_vector"] = v.path_vector;
        j["avg_lca_distance"] = v.avg_lca_distance;
        j["raw_length"] = v.raw_length;
        arr.push_back(std::move(j));
    }
    json root;
    root["vectors"] = std::move(arr);
    root["matrix"] = {{"ids", dist.ids}, {"values", dist.values}};
    return root;
}

std::pair<std::vector<StructuralVector>, StructuralDistanceMatrix>
struct_from_json(const json& j) {
    std::vector<StructuralVector> vecs;
    const json& arr = require(j, "vectors", "structural file");
    if (!arr.is_array())
        throw SchemaError("structural file: 'vectors' must be an array");
    for (const auto& rec : arr) {
        const std::string where = "structural vector " + std::to_string(vecs.size() + 1);
        StructuralVector v;
        v.assertion_id = get_as<std::string>(rec, "assertion_id", where);
        v.path_vector = get_as<std::vector<int>>(rec, "path_vector", where);
        v.avg_lca_distance = get_as<double>(rec, "avg_lca_distance", where);
        v.raw_length = get_as<int>(rec, "raw_length", where);
        vecs.push_back(std::move(v));
    }
    const json& m = require(j, "matrix", "structural file");
    StructuralDistanceMatrix dist;
    dist.ids = get_as<std::vector<std::string>>(m, "ids", "distance matrix");
    dist.values = get_as<std::vector<double>>(m, "values", "distance matrix");
    if (dist.values.size() != dist.ids.size() * dist.ids.size())
        throw SchemaError("distance matrix: values length is not ids^2");
    return {std::move(vecs), std::move(dist)};
}

// --- groups.json ---------------------------------------------------------------

json groups_to_json(const ClusteringResult& result, const std::vector<std::string>& ids) {
    json root;
    root["resolved_delta_struct"] = result.resolved_delta_struct;
    if (result.pca.k > 0) {
        root["pca"] = {{"k", result.pca.k},
                       {"mean", result.pca.mean},
                       {"components", result.pca.components},
                       {"explained_variance", result.pca.explained_variance}};
    } else {
        root["pca"] = nullptr;
    }
    json assertions = json::array();
    for (std::size_t i = 0; i < ids.size(); ++i) {
        json a;
        a["assertion_id"] = ids[i];
        a["semantic_label"] = result.semantic_labels[i];
        a["fused"] = result.fused[i];
        assertions.push_back(std::move(a));
    }
    root["assertions"] = std::move(assertions);
    json groups = json::array();
    for (const auto& g : result.groups) {
        json gj;
        gj["group_id"] = g.group_id;
        gj["member_ids"] = g.member_ids;
        gj["semantic_label"] = g.semantic_label;
        gj["fused_centroid"] = g.fused_centroid;
        groups.push_back(std::move(gj));
    }
    root["groups"] = std::move(groups);
    return root;
}

std::vector<AssertionGroup> groups_from_json(const json& j) {
    const json& arr = require(j, "groups", "groups file");
    if (!arr.is_array())
        throw SchemaError("groups file: 'groups' must be an array");
    std::vector<AssertionGroup> out;
    for (const auto& rec : arr) {
        const std::string where = "group " + std::to_string(out.size());
        AssertionGroup g;
        g.group_id = get_as<int>(rec, "group_id", where);
        g.member_ids = get_as<std::vector<std::string>>(rec, "member_ids", where);
        g.semantic_label = get_as<int>(rec, "semantic_label", where);
        g.fused_centroid = get_as<std::vector<double>>(rec, "fused_centroid", where);
        if (g.member_ids.empty())
            throw SchemaError(where + ": member_ids is empty");
        out.push_back(std::move(g));
    }
    return out;
}

// --- mapping.json ---------------------------------------------------------------

json mapping_to_json(const MappingResult& m) {
    json root;
    json gms = json::array();
    for (const auto& gm : m.group_mappings)
        gms.push_back({{"group_id", gm.group_id},
                       {"subspec_id", gm.subspec_id},
                       {"score", gm.score}});
    root["group_mappings"] = std::move(gms);
    json pas = json::array();
    for (const auto& a : m.point_alignments)
        pas.push_back({{"assertion_id", a.assertion_id},
                       {"point_id", a.point_id},
                       {"signal_jaccard", a.signal_jaccard},
                       {"semantic_sim", a.semantic_sim},
                       {"combined", a.combined},
                       {"accepted", a.accepted}});
    root["point_alignments"] = std::move(pas);
    json rows = json::array();
    for (const auto& r : m.coverage)
        rows.push_back({{"subspec_id", r.subspec_id},
                        {"covered", r.covered},
                        {"total", r.total},
                        {"ratio", r.ratio}});
    root["coverage_table"] = std::move(rows);
    return root;
}

MappingResult mapping_from_json(const json& j) {
    MappingResult m;
    for (const auto& rec : require(j, "group_mappings", "mapping file")) {
        GroupMapping gm;
        gm.group_id = get_as<int>(rec, "group_id", "group mapping");
        gm.subspec_id = get_as<std::string>(rec, "subspec_id", "group mapping");
        gm.score = get_as<double>(rec, "score", "group mapping");
        m.group_mappings.push_back(std::move(gm));
    }
    for (const auto& rec : require(j, "point_alignments", "mapping file")) {
        PointAlignment a;
        a.assertion_id = get_as<std::string>(rec, "assertion_id", "point alignment");
        a.point_id = get_as<std::string>(rec, "point_id", "point alignment");
        a.signal_jaccard = get_as<double>(rec, "signal_jaccard", "point alignment");
        a.semantic_sim = get_as<double>(rec, "semantic_sim", "point alignment");
        a.combined = get_as<double>(rec, "combined", "point alignment");
        a.accepted = get_as<bool>(rec, "accepted", "point alignment");
        m.point_alignments.push_back(std::move(a));
    }
    for (const auto& rec : require(j, "coverage_table", "mapping file")) {
        CoverageRow r;
        r.subspec_id = get_as<std::string>(rec, "subspec_id", "coverage row");
        r.covered = get_as<int>(rec, "covered", "coverage row");
        r.total = get_as<int>(rec, "total", "coverage row");
        r.ratio = get_as<double>(rec, "ratio", "coverage row");
        m.coverage.push_back(std::move(r));
    }
    return m;
}

// --- feedback.json ---------------------------------------------------------------

json feedback_to_json(const FeedbackPayload& p) {
    json root;
    root["round"] = p.round;
    json items = json::array();
    for (const auto& item : p.items) {
        json ij;
        ij["subspec_id"] = item.subspec_id;
        ij["subspec_excerpt"] = item.subspec_excerpt;
        ij["coverage_ratio"] = item.coverage_ratio;
        json unc = json::array();
        for (const auto& u : item.uncovered)
            unc.push_back({{"point_id", u.point_id},
                           {"statement", u.statement},
                           {"signals", u.signals}});
        ij["uncovered"] = std::move(unc);
        ij["covered_statements"] = item.covered_statements;
        ij["signals"] = item.signals;
        items.push_back(std::move(ij));
    }
    root["items"] = std::move(items);
    return root;
}

FeedbackPayload feedback_from_json(const json& j) {
    FeedbackPayload p;
    p.round = get_as<int>(j, "round", "feedback payload");
    for (const auto& rec : require(j, "items", "feedback payload")) {
        FeedbackItem item;
        item.subspec_id = get_as<std::string>(rec, "subspec_id", "feedback item");
        item.subspec_excerpt = get_as<std::string>(rec, "subspec_excerpt", "feedback item");
        item.coverage_ratio = get_as<double>(rec, "coverage_ratio", "feedback item");
        for (const auto& u : require(rec, "uncovered", "feedback item")) {
            UncoveredPoint up;
            up.point_id = get_as<std::string>(u, "point_id", "uncovered point");
            up.statement = get_as<std::string>(u, "statement", "uncovered point");
            up.signals = get_as<std::vector<std::string>>(u, "signals", "uncovered point");
            item.uncovered.push_back(std::move(up));
        }
        item.covered_statements =
            get_as<std::vector<std::string>>(rec, "covered_statements", "feedback item");
        item.signals = get_as<std::vector<std::string>>(rec, "signals", "feedback item");
        p.items.push_back(std::move(item));
    }
    return p;
}

// --- metrics.json ---------------------------------------------------------------

json metrics_to_json(const RunMetrics& m) {
    json j;
    j["n_total"] = m.n_total;
    j["n_syntax"] = m.n_syntax;
    j["n_fpv"] = m.n_fpv;
    j["bfc"] = m.bfc ? json(*m.bfc) : json(nullptr);
    j["sfc"] = m.sfc ? json(*m.sfc) : json(nullptr);
    j["tfc"] = m.tfc ? json(*m.tfc) : json(nullptr);
    return j;
}

RunMetrics metrics_from_json(const json& j) {
    RunMetrics m;
    m.n_total = get_as<int>(j, "n_total", "metrics");
    m.n_syntax = get_as<int>(j, "n_syntax", "metrics");
    m.n_fpv = get_as<int>(j, "n_fpv", "metrics");
    auto opt = [&](const char* field) -> std::optional<double> {
        const json& v = require(j, field, "metrics");
        if (v.is_null())
            return std::nullopt;
        if (!v.is_number())
            throw SchemaError(std::string("metrics: '") + field + "' must be numeric or null");
        return v.get<double>();
    };
    m.bfc = opt("bfc");
    m.sfc = opt("sfc");
    m.tfc = opt("tfc");
    return m;
}

// --- config snapshot --------------------------------------------------------------

json config_to_json(const Config& cfg) {
    json j;
    j["prompts_dir"] = cfg.prompts_dir;
    j["clustering"] = {
        {"tau_sem", cfg.clustering.tau_sem},
        {"delta_struct",
         cfg.clustering.delta_struct ? json(*cfg.clustering.delta_struct) : json(nullptr)},
        {"pca_variance_target", cfg.clustering.pca_variance_target},
        {"pca_max_k", cfg.clustering.pca_max_k},
        {"alpha", cfg.clustering.alpha},
        {"tau_fuse", cfg.clustering.tau_fuse},
        {"seed", cfg.clustering.seed},
        {"struct_path_weight", cfg.clustering.struct_path_weight},
        {"struct_lca_weight", cfg.clustering.struct_lca_weight}};
    j["mapping"] = {{"w_sig", cfg.mapping.w_sig},
                    {"w_sem", cfg.mapping.w_sem},
                    {"tau_map", cfg.mapping.tau_map}};
    j["loop"] = {{"theta", cfg.loop.theta},
                 {"max_rounds", cfg.loop.max_rounds},
                 {"generator_timeout_ms", cfg.loop.generator_timeout_ms}};
    j["gateway"] = {{"backend", cfg.gateway.backend == BackendKind::http ? "http" : "stub"},
                    {"endpoint", cfg.gateway.endpoint},
                    {"api_key_env", cfg.gateway.api_key_env},
                    {"chat_model", cfg.gateway.chat_model},
                    {"embed_model", cfg.gateway.embed_model},
                    {"d_sem", cfg.gateway.d_sem},
                    {"max_retries", cfg.gateway.max_retries},
                    {"backoff_initial_ms", cfg.gateway.backoff_initial_ms},
                    {"backoff_multiplier", cfg.gateway.backoff_multiplier},
                    {"timeout_ms", cfg.gateway.timeout_ms},
                    {"max_in_flight", cfg.gateway.max_in_flight},
                    {"cache_path", cfg.gateway.cache_path}};
    return j;
}

// --- file helpers -----------------------------------------------------------------

json load_json(const std::string& path) {
    json j = json::parse(read_file(path), nullptr, false);
    if (j.is_discarded())
        throw SchemaError(path + ": not valid JSON");
    return j;
}

void save_json(const json& j, const std::string& path) {
    write_file(path, j.dump(2) + "\n");
}

} // namespace svacov
