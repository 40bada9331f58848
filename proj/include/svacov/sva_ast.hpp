//------------------------------------------------------------------------------
// sva_ast.hpp
// Tokenizer and recursive-descent parser for a concurrent-assertion subset of
// SystemVerilog, plus the expression AST consumed by the feature pipeline
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace svacov {

// --- tokens -------------------------------------------------------------

enum class TokenKind { identifier, number, op, keyword, punctuation };

/// Byte range [begin, end) into the source text.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
};

struct SvaToken {
    TokenKind kind;
    std::string lexeme;
    Span span;
};

/// Splits assertion text into tokens. Comments (// and /* */) and whitespace
/// are skipped; token spans partition the remaining bytes in source order.
/// Throws LexError (with byte offset) on an illegal character.
std::vector<SvaToken> tokenize(std::string_view source);

// --- AST ------------------------------------------------------------------

/// Node kinds with their fixed integer codes. The codes feed structural path
/// vectors and must never change: the pad sentinel is 0, so codes start at 1.
enum class NodeKind : int {
    assertion = 1,
    property = 2,
    clocking_event = 3,
    implication = 4,
    delay = 5,
    repetition = 6,
    boolean_op = 7,
    comparison = 8,
    unary_op = 9,
    signal_ref = 10,
    index_select = 11,
    range_select = 12,
    literal = 13,
    system_func = 14,
    sequence = 15,
};

int node_kind_code(NodeKind k);
const char* node_kind_name(NodeKind k);
std::optional<NodeKind> node_kind_from_code(int code);

struct AstNode {
    int id = -1;
    NodeKind kind = NodeKind::sequence;
    std::string text;           // operator symbol, signal name, edge, literal lexeme
    std::vector<int> children;  // ids, in source order
    Span span;
};

/// A rooted expression tree over densely numbered nodes (the node id is its
/// index). Built bottom-up via add_node, then frozen with finalize(), which
/// validates the single-rooted tree shape and computes parent links.
class Ast {
public:
    int add_node(NodeKind kind, std::string text, std::vector<int> children, Span span);
    void finalize(int root_id);

    int root() const { return root_; }
    std::size_t size() const { return nodes_.size(); }
    const std::vector<AstNode>& nodes() const { return nodes_; }

    /// Throws NodeNotFound when id is out of range.
    const AstNode& node(int id) const;

    /// Parent id, or -1 for the root.
    int parent(int id) const;

    /// Edge count from the root.
    int depth(int id) const;

    bool is_leaf(int id) const { return node(id).children.empty(); }

    /// Ids of all signal_ref leaves, ordered by source position.
    std::vector<int> signal_leaves() const;

private:
    std::vector<AstNode> nodes_;
    std::vector<int> parents_;
    int root_ = -1;
    bool finalized_ = false;
};

// --- parsing ---------------------------------------------------------------

struct ParsedAssertion {
    std::string assertion_id;
    std::string raw_text;
    std::optional<Ast> ast;            // present iff syntax_ok
    std::vector<std::string> signals;  // sorted, deduplicated base names
    bool syntax_ok = false;
    std::string diagnostic;            // empty when syntax_ok
};

/// Parses one `assert property (...)` statement. Grammatical failures never
/// throw: they come back with syntax_ok=false and a diagnostic. The only
/// exception is ArgumentError for an empty id.
ParsedAssertion parse_assertion(const std::string& id, const std::string& source);

/// Distinct base identifiers of all signal_ref leaves, sorted ascending.
std::vector<std::string> extract_signals(const Ast& ast);

/// Renders the tree back to assertion text. Re-parsing the result yields a
/// structurally identical tree.
std::string to_source(const Ast& ast);

/// Shape, kinds and texts equal; ids and spans are ignored.
bool structurally_equal(const Ast& a, const Ast& b);

/// Extracts every `assert property ... ;` statement from a SystemVerilog
/// file, skipping comments and string literals. Returns raw statement slices
/// in source order.
std::vector<std::string> extract_sv_assertions(std::string_view sv_source);

} // namespace svacov
