//------------------------------------------------------------------------------
// semantic.hpp
// Per-assertion intent text and unit-norm semantic embedding, produced
// through the gateway
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/gateway.hpp"
#include "svacov/sva_ast.hpp"

#include <string>
#include <vector>

namespace svacov {

struct SemanticRecord {
    std::string assertion_id;
    std::string intent_text;
    std::vector<double> embedding; // unit L2 norm
    std::string backend_tag;
};

/// Renders the intent prompt for one assertion and returns the chat
/// response, re-asking (cache bypassed) while the response is empty or
/// longer than 1000 characters, up to the gateway retry budget.
std::string extract_intent(const ParsedAssertion& pa, Gateway& gw,
                           const PromptTemplate& intent_template);

/// Embeds `intent` and re-normalizes to unit L2 norm.
std::vector<double> embed_intent(const std::string& intent, Gateway& gw);

/// Embeds arbitrary text to a unit vector (shared by the spec pipeline).
std::vector<double> embed_unit(const std::string& text, Gateway& gw);

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v);

/// Intent + embedding for every assertion, in input order.
std::vector<SemanticRecord> extract_semantics(const std::vector<ParsedAssertion>& pas,
                                              Gateway& gw,
                                              const PromptTemplate& intent_template);

} // namespace svacov
