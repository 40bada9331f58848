//------------------------------------------------------------------------------
// spec_pipeline.hpp
// Splits a natural-language hardware spec into Sub-SPECs by functional
// module and extracts atomic functional points from each, via the gateway;
// also loads pre-extracted fixtures from file
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/gateway.hpp"

#include <string>
#include <vector>

namespace svacov {

struct FunctionalPoint {
    std::string point_id;              // "<subspec_id>.p<ordinal>"
    std::string subspec_id;
    std::string statement;             // one atomic sentence
    std::vector<std::string> signals;  // sorted, deduplicated
    std::vector<double> embedding;     // unit L2 norm
};

struct SubSpec {
    std::string subspec_id;            // "s1", "s2", ... in document order
    std::string title;
    std::string body;                  // verbatim slice of the spec text
    std::vector<std::string> signals_mentioned; // sorted, deduplicated
    std::vector<double> embedding;     // unit L2 norm, of title+body
    std::vector<FunctionalPoint> points;
};

/// One name per line; '#' comments and blank lines skipped.
std::vector<std::string> load_glossary(const std::string& path);

/// Asks the chat backend (template prompts/split.txt) for a JSON array of
/// {title, body, signals} and validates it: bodies must be verbatim
/// substrings of spec_text (whitespace-normalized), non-overlapping, and in
/// document order. Invalid output is retried with a repair instruction up
/// to the gateway retry budget. Bodies are canonicalized to the exact
/// matching slice of spec_text. Points are left empty; embeddings are
/// computed over title+body.
std::vector<SubSpec> split_spec(const std::string& spec_text, Gateway& gw,
                                const std::vector<std::string>& glossary,
                                const std::string& prompts_dir);

/// Asks the chat backend (template prompts/points.txt) for a JSON array of
/// {statement, signals}. Statements must be single sentences; every listed
/// signal must appear as a token of sub.body (case-insensitive) or in the
/// glossary. Ids are "<subspec_id>.p<n>", 1-based. A body without signal
/// tokens yields an empty list with a warning.
std::vector<FunctionalPoint> extract_points(const SubSpec& sub, Gateway& gw,
                                            const std::vector<std::string>& glossary,
                                            const std::string& prompts_dir);

/// split_spec + extract_points over every SubSpec, document order.
std::vector<SubSpec> run_spec_pipeline(const std::string& spec_text, Gateway& gw,
                                       const std::vector<std::string>& glossary,
                                       const std::string& prompts_dir);

/// Loads subspecs.json and re-validates every invariant (unique ids,
/// unit-norm embeddings, single-sentence statements, point id prefixes).
std::vector<SubSpec> load_fixture(const std::string& path);

/// Writes subspecs.json (deterministic key order).
void save_subspecs(const std::vector<SubSpec>& subs, const std::string& path);

} // namespace svacov
