//------------------------------------------------------------------------------
// feedback.hpp
// The iterative loop: ingest external FPV/coverage verdicts, compute N/S/P
// metrics, identify under-covered Sub-SPECs and points, feed an external
// assertion generator, merge its output, and stop on threshold or budget
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/config.hpp"
#include "svacov/gateway.hpp"
#include "svacov/mapping.hpp"
#include "svacov/spec_pipeline.hpp"
#include "svacov/sva_ast.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace svacov {

/// Branch/statement/toggle coverage within one assertion's cone of influence,
/// as reported by an external FPV tool.
struct CoiCoverage {
    std::string assertion_id;
    double bfc = 0.0;
    double sfc = 0.0;
    double tfc = 0.0;
};

struct FpvVerdict {
    std::string assertion_id;
    bool fpv_passed = false;
};

struct RunMetrics {
    int n_total = 0;  // N: all generated assertions
    int n_syntax = 0; // S: syntax-correct
    int n_fpv = 0;    // P: FPV-passed (and syntax-correct)
    std::optional<double> bfc, sfc, tfc; // means over assertions with records
};

struct IterationState {
    int round = 0;
    std::set<std::string> alive_assertions; // syntax-ok ids in play
    std::map<std::string, double> coverage_by_subspec;
    std::vector<std::string> uncovered_points;
    bool converged = false;
    double theta = 0.85;
    int max_rounds = 5;
};

struct UncoveredPoint {
    std::string point_id;
    std::string statement;
    std::vector<std::string> signals;
};

struct FeedbackItem {
    std::string subspec_id;
    std::string subspec_excerpt;
    double coverage_ratio = 0.0;
    std::vector<UncoveredPoint> uncovered;
    std::vector<std::string> covered_statements;
    std::vector<std::string> signals; // union over uncovered points, sorted
};

struct FeedbackPayload {
    int round = 0;
    std::vector<FeedbackItem> items; // ascending coverage ratio (worst first)
};

/// Reads a coverage report {"coi": [...], "fpv": [...]}. Records naming
/// unknown assertion ids are warned about and dropped.
std::pair<std::vector<CoiCoverage>, std::vector<FpvVerdict>>
ingest_coverage(const std::string& path, const std::set<std::string>& known_ids);

RunMetrics compute_metrics(const std::vector<ParsedAssertion>& assertions,
                           const std::vector<FpvVerdict>& verdicts,
                           const std::vector<CoiCoverage>& coverages);

/// "N/S/P", e.g. "127/112/58".
std::string format_nsp(const RunMetrics& m);

/// Every SubSpec under theta, worst ratio first (ties by subspec_id), each
/// carrying its uncovered point statements verbatim and their signal union.
/// Throws AlreadyConverged when state.converged.
FeedbackPayload build_feedback(const IterationState& state,
                               const std::vector<SubSpec>& subspecs,
                               const MappingResult& mapping);

/// Renders the payload through prompts/feedback.txt for LLM-facing
/// generators.
std::string render_feedback_prompt(const FeedbackPayload& payload,
                                   const std::string& prompts_dir);

// --- generators ----------------------------------------------------------------

struct GeneratedAssertion {
    std::string id;
    std::string sva;
};

class Generator {
public:
    virtual ~Generator() = default;
    virtual std::string name() const = 0;
    virtual std::vector<GeneratedAssertion> generate(const FeedbackPayload& payload) = 0;
};

/// Runs a shell command with the payload JSON on stdin and parses a JSON
/// array of {id, sva} from its stdout. Enforces a wall-clock timeout.
class ExternalCommandGenerator : public Generator {
public:
    ExternalCommandGenerator(std::string command, long timeout_ms);
    std::string name() const override { return "cmd:" + command_; }
    std::vector<GeneratedAssertion> generate(const FeedbackPayload& payload) override;

private:
    std::string command_;
    long timeout_ms_;
};

enum class SyntheticMode { perfect, one_point, none };

/// Scripted generator used by tests and the bundled tool: `perfect` emits one
/// conjunction-of-signals assertion per uncovered point, `one_point` covers
/// only the first uncovered point of the worst SubSpec, `none` returns
/// nothing.
std::vector<GeneratedAssertion> synthetic_generate(const FeedbackPayload& payload,
                                                   SyntheticMode mode);

class SyntheticGenerator : public Generator {
public:
    explicit SyntheticGenerator(SyntheticMode mode) : mode_(mode) {}
    std::string name() const override;
    std::vector<GeneratedAssertion> generate(const FeedbackPayload& payload) override {
        return synthetic_generate(payload, mode_);
    }

private:
    SyntheticMode mode_;
};

// --- the loop ----------------------------------------------------------------

struct RoundRecord {
    int round = 0;
    RunMetrics metrics;
    std::vector<CoverageRow> coverage;
    double aggregate_ratio = 0.0; // covered points / total points, all SubSpecs
    bool feedback_emitted = false;
    int generated = 0; // accepted new assertions this round
};

struct LoopResult {
    IterationState state;
    std::vector<RoundRecord> rounds;
    std::vector<ParsedAssertion> assertions; // everything seen, id order
};

struct LoopInputs {
    std::vector<SubSpec> subspecs;
    std::vector<ParsedAssertion> seed;
    std::string run_dir;      // audit trail root; empty = do not write
    std::string coverage_dir; // optional <dir>/round<k>.json reports
};

/// Per round: features for the alive set, cluster, map, tabulate coverage;
/// stop when every ratio >= theta or the round budget is spent, otherwise
/// send feedback to the generator and merge its (fresh, non-duplicate,
/// parseable) assertions. Writes round<k>/ artifacts when run_dir is set.
LoopResult run_loop(const Config& cfg, const LoopInputs& inputs, Gateway& gw, Generator& gen);

} // namespace svacov
