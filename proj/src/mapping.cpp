//------------------------------------------------------------------------------
// mapping.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/mapping.hpp"

#include "svacov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace svacov {

namespace {

/// Cosine for the group score; a zero mean embedding contributes 0 instead
/// of raising, so a degenerate group still maps somewhere.
double score_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu < 1e-24 || nv < 1e-24)
        return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

} // namespace

double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::set<std::string> sa(a.begin(), a.end());
    std::set<std::string> sb(b.begin(), b.end());
    if (sa.empty() && sb.empty())
        return 0.0;
    std::size_t inter = 0;
    for (const auto& x : sa)
        inter += sb.count(x);
    std::size_t uni = sa.size() + sb.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<GroupMapping>
map_groups(const std::vector<AssertionGroup>& groups, const std::vector<SubSpec>& subspecs,
           const std::vector<SemanticRecord>& sems,
           const std::map<std::string, std::vector<std::string>>& signals_by_id) {
    if (groups.empty() || subspecs.empty())
        throw ArgumentError("map_groups requires non-empty groups and subspecs");

    std::map<std::string, const SemanticRecord*> sem_by_id;
    for (const auto& s : sems)
        sem_by_id[s.assertion_id] = &s;

    std::vector<GroupMapping> out;
    out.reserve(groups.size());
    for (const auto& g : groups) {
        // mean member embedding
        std::vector<double> mean;
        for (const auto& id : g.member_ids) {
            auto it = sem_by_id.find(id);
            if (it == sem_by_id.end())
                throw ArgumentError("no semantic record for assertion '" + id + "'");
            const auto& e = it->second->embedding;
            if (mean.empty())
                mean.assign(e.size(), 0.0);
            if (e.size() != mean.size())
                throw DimensionMismatch("embedding dimensions differ within group " +
                                        std::to_string(g.group_id));
            for (std::size_t i = 0; i < e.size(); ++i)
                mean[i] += e[i];
        }
        for (double& x : mean)
            x /= static_cast<double>(g.member_ids.size());

        // union of member signal sets
        std::set<std::string> sig_union;
        for (const auto& id : g.member_ids) {
            auto it = signals_by_id.find(id);
            if (it != signals_by_id.end())
                sig_union.insert(it->second.begin(), it->second.end());
        }
        std::vector<std::string> group_signals(sig_union.begin(), sig_union.end());

        GroupMapping best;
        best.group_id = g.group_id;
        bool first = true;
        for (const auto& sub : subspecs) {
            double score = score_cosine(mean, sub.embedding) +
                           jaccard(group_signals, sub.signals_mentioned);
            bool wins = first || score > best.score ||
                        (score == best.score && sub.subspec_id < best.subspec_id);
            if (wins) {
                best.subspec_id = sub.subspec_id;
                best.score = score;
                first = false;
            }
        }
        out.push_back(best);
    }
    return out;
}

std::vector<PointAlignment> align_points(const ParsedAssertion& pa, const SemanticRecord& sem,
                                         const SubSpec& sub, const MappingConfig& cfg) {
    if (cfg.w_sig < 0.0 || cfg.w_sem < 0.0 || cfg.w_sig + cfg.w_sem <= 0.0)
        throw ArgumentError("mapping weights must be non-negative with positive sum");

    std::vector<PointAlignment> out;
    out.reserve(sub.points.size());
    for (const auto& p : sub.points) {
        PointAlignment a;
        a.assertion_id = pa.assertion_id;
        a.point_id = p.point_id;
        a.signal_jaccard = jaccard(pa.signals, p.signals);
        a.semantic_sim = cosine_similarity(sem.embedding, p.embedding);
        a.combined = (cfg.w_sig * a.signal_jaccard + cfg.w_sem * ((a.semantic_sim + 1.0) / 2.0)) /
                     (cfg.w_sig + cfg.w_sem);
        a.accepted = a.combined >= cfg.tau_map;
        out.push_back(a);
    }
    return out;
}

std::vector<CoverageRow> coverage_table(const std::vector<SubSpec>& subspecs,
                                        const std::vector<PointAlignment>& alignments) {
    std::set<std::string> covered_points;
    for (const auto& a : alignments)
        if (a.accepted)
            covered_points.insert(a.point_id);

    std::vector<CoverageRow> out;
    out.reserve(subspecs.size());
    for (const auto& sub : subspecs) {
        CoverageRow row;
        row.subspec_id = sub.subspec_id;
        row.total = static_cast<int>(sub.points.size());
        for (const auto& p : sub.points)
            if (covered_points.count(p.point_id))
                ++row.covered;
        row.ratio = row.total == 0 ? 1.0
                                   : static_cast<double>(row.covered) /
                                         static_cast<double>(row.total);
        out.push_back(row);
    }
    return out;
}

MappingResult map_all(const std::vector<AssertionGroup>& groups,
                      const std::vector<SubSpec>& subspecs,
                      const std::vector<SemanticRecord>& sems,
                      const std::vector<ParsedAssertion>& parsed, const MappingConfig& cfg) {
    std::map<std::string, std::vector<std::string>> signals_by_id;
    std::map<std::string, const ParsedAssertion*> parsed_by_id;
    for (const auto& pa : parsed) {
        signals_by_id[pa.assertion_id] = pa.signals;
        parsed_by_id[pa.assertion_id] = &pa;
    }
    std::map<std::string, const SemanticRecord*> sem_by_id;
    for (const auto& s : sems)
        sem_by_id[s.assertion_id] = &s;
    std::map<std::string, const SubSpec*> sub_by_id;
    for (const auto& s : subspecs)
        sub_by_id[s.subspec_id] = &s;

    MappingResult result;
    result.group_mappings = map_groups(groups, subspecs, sems, signals_by_id);

    std::map<int, const SubSpec*> target_by_group;
    for (const auto& gm : result.group_mappings)
        target_by_group[gm.group_id] = sub_by_id.at(gm.subspec_id);

    // assertion -> mapped SubSpec, in assertion_id order
    std::map<std::string, const SubSpec*> target_by_assertion;
    for (const auto& g : groups)
        for (const auto& id : g.member_ids)
            target_by_assertion[id] = target_by_group.at(g.group_id);

    for (const auto& [id, sub] : target_by_assertion) {
        auto pa = parsed_by_id.find(id);
        auto sem = sem_by_id.find(id);
        if (pa == parsed_by_id.end())
            throw ArgumentError("no parsed assertion for '" + id + "'");
        if (sem == sem_by_id.end())
            throw ArgumentError("no semantic record for '" + id + "'");
        auto aligned = align_points(*pa->second, *sem->second, *sub, cfg);
        result.point_alignments.insert(result.point_alignments.end(), aligned.begin(),
                                       aligned.end());
    }

    result.coverage = coverage_table(subspecs, result.point_alignments);
    return result;
}

} // namespace svacov
