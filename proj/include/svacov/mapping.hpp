//------------------------------------------------------------------------------
// mapping.hpp
// Matches assertion groups to their most relevant Sub-SPEC, aligns individual
// assertions to functional points via signal overlap and description
// similarity, and tabulates per-Sub-SPEC coverage
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/clustering.hpp"
#include "svacov/config.hpp"
#include "svacov/semantic.hpp"
#include "svacov/spec_pipeline.hpp"
#include "svacov/sva_ast.hpp"

#include <map>
#include <string>
#include <vector>

namespace svacov {

struct GroupMapping {
    int group_id = 0;
    std::string subspec_id;
    double score = 0.0; // cosine + jaccard, in [-1, 2]
};

struct PointAlignment {
    std::string assertion_id;
    std::string point_id;
    double signal_jaccard = 0.0;
    double semantic_sim = 0.0;
    double combined = 0.0;      // in [0, 1]
    bool accepted = false;      // combined >= tau_map
};

struct CoverageRow {
    std::string subspec_id;
    int covered = 0;
    int total = 0;
    double ratio = 1.0; // covered/total; 1.0 for a zero-point SubSpec
};

/// |a ∩ b| / |a ∪ b| over sorted, deduplicated name lists; 0 when both empty.
double jaccard(const std::vector<std::string>& a, const std::vector<std::string>& b);

/// For each group: score(subspec) = cosine(mean member embedding, subspec
/// embedding) + jaccard(union of member signal sets, subspec
/// signals_mentioned); the argmax wins, ties to the lexicographically
/// smallest subspec_id. signals_by_id supplies each member's signal set.
std::vector<GroupMapping>
map_groups(const std::vector<AssertionGroup>& groups, const std::vector<SubSpec>& subspecs,
           const std::vector<SemanticRecord>& sems,
           const std::map<std::string, std::vector<std::string>>& signals_by_id);

/// One alignment per point of `sub` (accepted and not):
/// combined = (w_sig*jaccard + w_sem*((sim+1)/2)) / (w_sig + w_sem).
std::vector<PointAlignment> align_points(const ParsedAssertion& pa, const SemanticRecord& sem,
                                         const SubSpec& sub, const MappingConfig& cfg);

/// A point is covered iff at least one accepted alignment targets it.
/// Rows follow subspec input order.
std::vector<CoverageRow> coverage_table(const std::vector<SubSpec>& subspecs,
                                        const std::vector<PointAlignment>& alignments);

struct MappingResult {
    std::vector<GroupMapping> group_mappings;
    std::vector<PointAlignment> point_alignments; // assertion_id asc, then point order
    std::vector<CoverageRow> coverage;
};

/// map_groups, then aligns every assertion against the points of its group's
/// mapped SubSpec, then tabulates coverage.
MappingResult map_all(const std::vector<AssertionGroup>& groups,
                      const std::vector<SubSpec>& subspecs,
                      const std::vector<SemanticRecord>& sems,
                      const std::vector<ParsedAssertion>& parsed, const MappingConfig& cfg);

} // namespace svacov
