//------------------------------------------------------------------------------
// semantic.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/semantic.hpp"

#include "svacov/errors.hpp"
#include "svacov/util.hpp"

#include <cmath>

namespace svacov {

std::string extract_intent(const ParsedAssertion& pa, Gateway& gw,
                           const PromptTemplate& intent_template) {
    if (pa.raw_text.empty())
        throw ArgumentError("assertion '" + pa.assertion_id + "' has empty text");

    std::string prompt = intent_template.render({
        {"SVA", pa.raw_text},
        {"SIGNALS", join(pa.signals, ",")},
    });

    std::string response;
    int budget = gw.config().max_retries;
    for (int attempt = 0;; ++attempt) {
        response = trim(gw.chat(prompt, /*bypass_cache=*/attempt > 0));
        if (!response.empty() && response.size() <= 1000)
            return response;
        if (attempt >= budget)
            break;
    }
    if (response.empty())
        throw EmptyResponse("intent extraction for '" + pa.assertion_id +
                            "' returned an empty response");
    throw BackendError("intent for '" + pa.assertion_id + "' exceeded 1000 characters after " +
                       std::to_string(budget + 1) + " attempt(s)");
}

std::vector<double> embed_unit(const std::string& text, Gateway& gw) {
    if (text.empty())
        throw ArgumentError("embedding input must not be empty");
    std::vector<double> v = gw.embed(text);
    double norm_sq = 0.0;
    for (double x : v)
        norm_sq += x * x;
    double norm = std::sqrt(norm_sq);
    if (norm < 1e-12)
        throw ZeroVector("backend produced a zero embedding");
    for (double& x : v)
        x /= norm;
    return v;
}

std::vector<double> embed_intent(const std::string& intent, Gateway& gw) {
    return embed_unit(intent, gw);
}

double cosine_similarity(const std::vector<double>& u, const std::vector<double>& v) {
    if (u.size() != v.size())
        throw DimensionMismatch("cosine_similarity: dimensions " + std::to_string(u.size()) +
                                " vs " + std::to_string(v.size()));
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu < 1e-24 || nv < 1e-24)
        throw ZeroVector("cosine_similarity of a zero vector");
    double s = dot / (std::sqrt(nu) * std::sqrt(nv));
    if (s > 1.0)
        s = 1.0;
    if (s < -1.0)
        s = -1.0;
    return s;
}

std::vector<SemanticRecord> extract_semantics(const std::vector<ParsedAssertion>& pas,
                                              Gateway& gw,
                                              const PromptTemplate& intent_template) {
    std::vector<SemanticRecord> out;
    out.reserve(pas.size());
    for (const auto& pa : pas) {
        SemanticRecord rec;
        rec.assertion_id = pa.assertion_id;
        rec.intent_text = extract_intent(pa, gw, intent_template);
        rec.embedding = embed_intent(rec.intent_text, gw);
        rec.backend_tag = gw.backend_tag();
        out.push_back(std::move(rec));
    }
    return out;
}

} // namespace svacov
