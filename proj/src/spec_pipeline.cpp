//------------------------------------------------------------------------------
// spec_pipeline.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/spec_pipeline.hpp"

#include "svacov/errors.hpp"
#include "svacov/log.hpp"
#include "svacov/semantic.hpp"
#include "svacov/util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <set>

namespace svacov {

using nlohmann::json;

namespace {

/// Whitespace-collapsed text plus a map from collapsed index back to the
/// original byte offset, so matches can be pulled out of the source verbatim.
struct NormalizedText {
    std::string norm;
    std::vector<std::size_t> offset; // norm index -> original index
};

NormalizedText normalize_with_map(const std::string& s) {
    NormalizedText out;
    bool pending_ws = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (std::isspace(static_cast<unsigned char>(s[i]))) {
            pending_ws = true;
            continue;
        }
        if (pending_ws && !out.norm.empty()) {
            out.norm.push_back(' ');
            out.offset.push_back(i);
        }
        pending_ws = false;
        out.norm.push_back(s[i]);
        out.offset.push_back(i);
    }
    return out;
}

/// Re-asks the backend with a repair line inserted after the task marker.
std::string with_repair(const std::string& prompt, const std::string& message) {
    auto nl = prompt.find('\n');
    if (nl == std::string::npos)
        return prompt + "\nREPAIR: " + message;
    return prompt.substr(0, nl + 1) + "REPAIR: " + message + "\n" + prompt.substr(nl + 1);
}

json parse_json_array(const std::string& reply) {
    json parsed = json::parse(reply, nullptr, false);
    if (parsed.is_discarded())
        throw ValidationError("reply is not valid JSON");
    if (!parsed.is_array())
        throw ValidationError("reply is not a JSON array");
    return parsed;
}

std::vector<std::string> string_array(const json& j, const std::string& what) {
    if (!j.is_array())
        throw ValidationError(what + " is not an array");
    std::vector<std::string> out;
    for (const auto& x : j) {
        if (!x.is_string())
            throw ValidationError(what + " contains a non-string entry");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::vector<std::string> sorted_unique(std::vector<std::string> v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
}

/// True when the text contains no sentence terminator followed by more text.
bool single_sentence(const std::string& s) {
    std::string t = trim(s);
    for (std::size_t i = 0; i + 1 < t.size(); ++i) {
        char c = t[i];
        if ((c != '.' && c != '!' && c != '?') ||
            !std::isspace(static_cast<unsigned char>(t[i + 1])))
            continue;
        for (std::size_t j = i + 1; j < t.size(); ++j)
            if (!std::isspace(static_cast<unsigned char>(t[j])))
                return false;
    }
    return true;
}

void check_unit_norm(const std::vector<double>& v, const std::string& what) {
    double n2 = 0.0;
    for (double x : v)
        n2 += x * x;
    if (v.empty() || std::abs(std::sqrt(n2) - 1.0) > 1e-6)
        throw SchemaError(what + ": embedding is not unit-norm");
}

} // namespace

std::vector<std::string> load_glossary(const std::string& path) {
    std::vector<std::string> out;
    for (const auto& line : split_lines(read_file(path))) {
        std::string t = trim(line);
        if (t.empty() || t.front() == '#')
            continue;
        out.push_back(t);
    }
    return sorted_unique(std::move(out));
}

std::vector<SubSpec> split_spec(const std::string& spec_text, Gateway& gw,
                                const std::vector<std::string>& glossary,
                                const std::string& prompts_dir) {
    if (trim(spec_text).empty())
        throw ArgumentError("spec text must not be empty");

    PromptTemplate tmpl = PromptTemplate::from_file(prompts_dir + "/split.txt");
    std::string prompt = tmpl.render({{"GLOSSARY", join(glossary, ", ")},
                                      {"SPEC", spec_text}});

    NormalizedText spec_norm = normalize_with_map(spec_text);

    std::string current = prompt;
    for (int attempt = 0;; ++attempt) {
        std::string reply = gw.chat(current);
        try {
            json arr = parse_json_array(reply);
            if (arr.empty())
                throw ValidationError("reply contains no sections");

            std::vector<SubSpec> subs;
            std::size_t cursor = 0;     // search position in normalized spec
            std::size_t prev_start = 0;
            for (const auto& item : arr) {
                if (!item.is_object() || !item.contains("title") || !item.contains("body") ||
                    !item.contains("signals") || !item["title"].is_string() ||
                    !item["body"].is_string())
                    throw ValidationError("section entries must be {title, body, signals}");

                NormalizedText body_norm =
                    normalize_with_map(item["body"].get<std::string>());
                if (body_norm.norm.empty())
                    throw ValidationError("section body is empty");

                std::size_t pos = spec_norm.norm.find(body_norm.norm, cursor);
                if (pos == std::string::npos) {
                    std::size_t anywhere = spec_norm.norm.find(body_norm.norm);
                    if (anywhere == std::string::npos)
                        throw ValidationError("verbatim: body of section " +
                                              std::to_string(subs.size() + 1) +
                                              " is not a substring of the spec");
                    if (anywhere < prev_start)
                        throw ValidationError("order: section " +
                                              std::to_string(subs.size() + 1) +
                                              " appears before its predecessor");
                    throw ValidationError("overlap: section " +
                                          std::to_string(subs.size() + 1) +
                                          " overlaps its predecessor");
                }

                // canonicalize to the exact source slice
                std::size_t begin = spec_norm.offset[pos];
                std::size_t end = spec_norm.offset[pos + body_norm.norm.size() - 1] + 1;

                SubSpec sub;
                sub.subspec_id = "s" + std::to_string(subs.size() + 1);
                sub.title = trim(item["title"].get<std::string>());
                sub.body = spec_text.substr(begin, end - begin);
                sub.signals_mentioned = sorted_unique(string_array(item["signals"], "signals"));
                subs.push_back(std::move(sub));

                prev_start = pos;
                cursor = pos + body_norm.norm.size();
            }

            for (auto& sub : subs)
                sub.embedding = embed_unit(sub.title + "\n" + sub.body, gw);
            return subs;
        } catch (const ValidationError& e) {
            if (attempt >= gw.config().max_retries)
                throw;
            log::warn(std::string("split reply rejected (") + e.what() + "); re-asking");
            current = with_repair(prompt, e.what());
        }
    }
}

std::vector<FunctionalPoint> extract_points(const SubSpec& sub, Gateway& gw,
                                            const std::vector<std::string>& glossary,
                                            const std::string& prompts_dir) {
    if (trim(sub.body).empty())
        throw ArgumentError("SubSpec body must not be empty");

    // the stub needs a signal list to anchor on; fall back to the split's own
    const std::vector<std::string>& known =
        glossary.empty() ? sub.signals_mentioned : glossary;

    PromptTemplate tmpl = PromptTemplate::from_file(prompts_dir + "/points.txt");
    std::string prompt = tmpl.render({{"GLOSSARY", join(known, ", ")},
                                      {"TITLE", sub.title},
                                      {"BODY", sub.body}});

    std::set<std::string> allowed = token_set(sub.body);
    for (const auto& g : glossary)
        allowed.insert(to_lower(g));

    std::string current = prompt;
    for (int attempt = 0;; ++attempt) {
        std::string reply = gw.chat(current);
        try {
            json arr = parse_json_array(reply);
            std::vector<FunctionalPoint> points;
            for (const auto& item : arr) {
                if (!item.is_object() || !item.contains("statement") ||
                    !item.contains("signals") || !item["statement"].is_string())
                    throw ValidationError("point entries must be {statement, signals}");
                FunctionalPoint p;
                p.statement = trim(item["statement"].get<std::string>());
                if (p.statement.empty())
                    throw ValidationError("point statement is empty");
                if (!single_sentence(p.statement))
                    throw ValidationError("statement is not a single sentence: \"" +
                                          p.statement + "\"");
                p.signals = sorted_unique(string_array(item["signals"], "signals"));
                for (const auto& s : p.signals)
                    if (!allowed.count(to_lower(s)))
                        throw ValidationError("unknown signal '" + s +
                                              "': not in body or glossary");
                p.subspec_id = sub.subspec_id;
                p.point_id = sub.subspec_id + ".p" + std::to_string(points.size() + 1);
                points.push_back(std::move(p));
            }
            if (points.empty())
                log::warn("SubSpec " + sub.subspec_id + " (" + sub.title +
                          ") yielded no functional points");
            for (auto& p : points)
                p.embedding = embed_unit(p.statement, gw);
            return points;
        } catch (const ValidationError& e) {
            if (attempt >= gw.config().max_retries)
                throw;
            log::warn(std::string("points reply rejected (") + e.what() + "); re-asking");
            current = with_repair(prompt, e.what());
        }
    }
}

std::vector<SubSpec> run_spec_pipeline(const std::string& spec_text, Gateway& gw,
                                       const std::vector<std::string>& glossary,
                                       const std::string& prompts_dir) {
    std::vector<SubSpec> subs = split_spec(spec_text, gw, glossary, prompts_dir);
    for (auto& sub : subs)
        sub.points = extract_points(sub, gw, glossary, prompts_dir);
    return subs;
}

// --- fixture I/O -------------------------------------------------------------

namespace {

std::vector<double> double_array(const json& j, const std::string& what) {
    if (!j.is_array())
        throw SchemaError(what + " is not an array");
    std::vector<double> out;
    for (const auto& x : j) {
        if (!x.is_number())
            throw SchemaError(what + " contains a non-numeric entry");
        out.push_back(x.get<double>());
    }
    return out;
}

const json& require(const json& j, const char* field, const std::string& what) {
    if (!j.is_object() || !j.contains(field))
        throw SchemaError(what + ": missing field '" + field + "'");
    return j[field];
}

FunctionalPoint point_from_json(const json& j, const std::string& where) {
    FunctionalPoint p;
    p.point_id = require(j, "point_id", where).get<std::string>();
    p.subspec_id = require(j, "subspec_id", where).get<std::string>();
    p.statement = require(j, "statement", where).get<std::string>();
    try {
        p.signals = string_array(require(j, "signals", where), where + ".signals");
    } catch (const ValidationError& e) {
        throw SchemaError(e.what());
    }
    std::sort(p.signals.begin(), p.signals.end());
    p.embedding = double_array(require(j, "embedding", where), where + ".embedding");
    return p;
}

} // namespace

std::vector<SubSpec> load_fixture(const std::string& path) {
    json root = json::parse(read_file(path), nullptr, false);
    if (root.is_discarded())
        throw SchemaError(path + ": not valid JSON");
    if (!root.is_array())
        throw SchemaError(path + ": top level must be an array of SubSpecs");

    std::vector<SubSpec> subs;
    std::set<std::string> seen_ids;
    for (const auto& j : root) {
        SubSpec sub;
        const std::string where = "SubSpec " + std::to_string(subs.size() + 1);
        sub.subspec_id = require(j, "subspec_id", where).get<std::string>();
        sub.title = require(j, "title", where).get<std::string>();
        sub.body = require(j, "body", where).get<std::string>();
        try {
            sub.signals_mentioned = string_array(require(j, "signals_mentioned", where),
                                                 where + ".signals_mentioned");
        } catch (const ValidationError& e) {
            throw SchemaError(e.what());
        }
        std::sort(sub.signals_mentioned.begin(), sub.signals_mentioned.end());
        sub.embedding = double_array(require(j, "embedding", where), where + ".embedding");
        check_unit_norm(sub.embedding, sub.subspec_id);

        if (!seen_ids.insert(sub.subspec_id).second)
            throw SchemaError("duplicate subspec_id '" + sub.subspec_id + "'");

        const json& pts = require(j, "points", where);
        if (!pts.is_array())
            throw SchemaError(where + ".points is not an array");
        std::set<std::string> point_ids;
        for (const auto& pj : pts) {
            FunctionalPoint p = point_from_json(pj, sub.subspec_id + " point");
            if (p.subspec_id != sub.subspec_id)
                throw SchemaError("point " + p.point_id + " claims subspec '" +
                                  p.subspec_id + "' inside '" + sub.subspec_id + "'");
            if (!point_ids.insert(p.point_id).second)
                throw SchemaError("duplicate point_id '" + p.point_id + "'");
            if (!single_sentence(p.statement))
                throw SchemaError("point " + p.point_id + ": statement is not a single sentence");
            check_unit_norm(p.embedding, p.point_id);
            sub.points.push_back(std::move(p));
        }
        subs.push_back(std::move(sub));
    }
    return subs;
}

void save_subspecs(const std::vector<SubSpec>& subs, const std::string& path) {
    json root = json::array();
    for (const auto& sub : subs) {
        json j;
        j["subspec_id"] = sub.subspec_id;
        j["title"] = sub.title;
        j["body"] = sub.body;
        j["signals_mentioned"] = sub.signals_mentioned;
        j["embedding"] = sub.embedding;
        json pts = json::array();
        for (const auto& p : sub.points) {
            json pj;
            pj["point_id"] = p.point_id;
            pj["subspec_id"] = p.subspec_id;
            pj["statement"] = p.statement;
            pj["signals"] = p.signals;
            pj["embedding"] = p.embedding;
            pts.push_back(std::move(pj));
        }
        j["points"] = std::move(pts);
        root.push_back(std::move(j));
    }
    write_file(path, root.dump(2) + "\n");
}

} // namespace svacov
