//------------------------------------------------------------------------------
// json_io.hpp
// JSON (de)serialization for every pipeline artifact: parsed assertions,
// semantic and structural records, groups, mapping output, feedback
// payloads, metrics, and the run manifest
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/clustering.hpp"
#include "svacov/config.hpp"
#include "svacov/feedback.hpp"
#include "svacov/mapping.hpp"
#include "svacov/semantic.hpp"
#include "svacov/spec_pipeline.hpp"
#include "svacov/structural.hpp"
#include "svacov/sva_ast.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace svacov {

// Assertion inputs: JSON Lines of {"id", "sva"}, or a .sv file where each
// `assert property ...;` statement becomes one assertion with id "a<n>".
std::vector<ParsedAssertion> parse_assertions_file(const std::string& path);

// parsed.json — includes a node dump of each AST; loading re-parses raw_text.
nlohmann::json parsed_to_json(const std::vector<ParsedAssertion>& pas);
std::vector<ParsedAssertion> parsed_from_json(const nlohmann::json& j);

nlohmann::json sem_to_json(const std::vector<SemanticRecord>& recs);
std::vector<SemanticRecord> sem_from_json(const nlohmann::json& j);

// struct.json — vectors plus the full distance matrix.
nlohmann::json struct_to_json(const std::vector<StructuralVector>& vecs,
                              const StructuralDistanceMatrix& dist);
std::pair<std::vector<StructuralVector>, StructuralDistanceMatrix>
struct_from_json(const nlohmann::json& j);

nlohmann::json groups_to_json(const ClusteringResult& result,
                              const std::vector<std::string>& ids);
std::vector<AssertionGroup> groups_from_json(const nlohmann::json& j);

nlohmann::json mapping_to_json(const MappingResult& m);
MappingResult mapping_from_json(const nlohmann::json& j);

nlohmann::json feedback_to_json(const FeedbackPayload& p);
FeedbackPayload feedback_from_json(const nlohmann::json& j);

nlohmann::json metrics_to_json(const RunMetrics& m);
RunMetrics metrics_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const Config& cfg);

// File helpers: read_file/parse with SchemaError on malformed JSON; writes
// end with a newline and use 2-space indentation (stable key order).
nlohmann::json load_json(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);

} // namespace svacov
