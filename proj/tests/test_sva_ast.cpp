//------------------------------------------------------------------------------
// test_sva_ast.cpp
// Tokenizer, parser, AST invariants, printing round-trips, and the labeled
// fixture corpus
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "svacov/errors.hpp"
#include "svacov/sva_ast.hpp"

#include <json.hpp>

#include <fstream>
#include <random>

using namespace svacov;
using nlohmann::json;

namespace {

struct CorpusEntry {
    std::string id;
    std::string sva;
    std::vector<std::string> signals; // empty for the malformed file
};

std::vector<CorpusEntry> load_corpus(const std::string& path) {
    std::vector<CorpusEntry> out;
    std::ifstream in(path);
    REQUIRE(in.good());
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        json j = json::parse(line);
        CorpusEntry e;
        e.id = j["id"].get<std::string>();
        e.sva = j["sva"].get<std::string>();
        if (j.contains("signals"))
            e.signals = j["signals"].get<std::vector<std::string>>();
        out.push_back(std::move(e));
    }
    return out;
}

const AstNode& only_child(const Ast& ast, const AstNode& n) {
    REQUIRE(n.children.size() == 1);
    return ast.node(n.children[0]);
}

} // namespace

TEST_CASE("tokenizer: basic operators and spans") {
    auto toks = tokenize("req |-> gnt");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].kind == TokenKind::identifier);
    CHECK(toks[0].lexeme == "req");
    CHECK(toks[1].kind == TokenKind::op);
    CHECK(toks[1].lexeme == "|->");
    CHECK(toks[2].lexeme == "gnt");
    // spans index the original source
    std::string src = "req |-> gnt";
    for (const auto& t : toks)
        CHECK(src.substr(t.span.begin, t.span.end - t.span.begin) == t.lexeme);
}

TEST_CASE("tokenizer: delay and repetition punctuation") {
    auto toks = tokenize("##[1:3] a[*2]");
    std::vector<std::string> lexemes;
    for (const auto& t : toks)
        lexemes.push_back(t.lexeme);
    CHECK(lexemes == std::vector<std::string>{"##", "[", "1", ":", "3", "]", "a", "[*", "2", "]"});
}

TEST_CASE("tokenizer: comments are skipped, keywords classified") {
    auto toks = tokenize("assert /* x */ property // trailing\n (a)");
    REQUIRE(toks.size() == 5);
    CHECK(toks[0].kind == TokenKind::keyword);
    CHECK(toks[1].kind == TokenKind::keyword);
    CHECK(toks[2].lexeme == "(");
    CHECK(toks[3].kind == TokenKind::identifier);
    // "asserts" is an ordinary identifier, not a keyword prefix match
    auto t2 = tokenize("asserts");
    CHECK(t2[0].kind == TokenKind::identifier);
}

TEST_CASE("tokenizer: hierarchical names and sized literals are single tokens") {
    auto toks = tokenize("top.u0.busy != 8'h0f");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0].lexeme == "top.u0.busy");
    CHECK(toks[0].kind == TokenKind::identifier);
    CHECK(toks[2].lexeme == "8'h0f");
    CHECK(toks[2].kind == TokenKind::number);
}

TEST_CASE("tokenizer: system functions are keywords") {
    auto toks = tokenize("$past(a)");
    CHECK(toks[0].kind == TokenKind::keyword);
    CHECK(toks[0].lexeme == "$past");
}

TEST_CASE("tokenizer: lex errors") {
    CHECK_THROWS_AS(tokenize("a ? b"), LexError);
    CHECK_THROWS_AS(tokenize("/* unterminated"), LexError);
    CHECK_THROWS_AS(tokenize("8'"), LexError);
}

TEST_CASE("node kind codes are stable") {
    CHECK(node_kind_code(NodeKind::assertion) == 1);
    CHECK(node_kind_code(NodeKind::property) == 2);
    CHECK(node_kind_code(NodeKind::clocking_event) == 3);
    CHECK(node_kind_code(NodeKind::implication) == 4);
    CHECK(node_kind_code(NodeKind::delay) == 5);
    CHECK(node_kind_code(NodeKind::repetition) == 6);
    CHECK(node_kind_code(NodeKind::boolean_op) == 7);
    CHECK(node_kind_code(NodeKind::comparison) == 8);
    CHECK(node_kind_code(NodeKind::unary_op) == 9);
    CHECK(node_kind_code(NodeKind::signal_ref) == 10);
    CHECK(node_kind_code(NodeKind::index_select) == 11);
    CHECK(node_kind_code(NodeKind::range_select) == 12);
    CHECK(node_kind_code(NodeKind::literal) == 13);
    CHECK(node_kind_code(NodeKind::system_func) == 14);
    CHECK(node_kind_code(NodeKind::sequence) == 15);
    CHECK(!node_kind_from_code(0).has_value());
    CHECK(!node_kind_from_code(16).has_value());
    for (int code = 1; code <= 15; ++code) {
        auto k = node_kind_from_code(code);
        REQUIRE(k.has_value());
        CHECK(node_kind_code(*k) == code);
    }
}

TEST_CASE("parser: canonical implication shape") {
    auto pa = parse_assertion("t", "assert property (req |-> gnt);");
    REQUIRE(pa.syntax_ok);
    const Ast& ast = *pa.ast;
    const AstNode& root = ast.node(ast.root());
    CHECK(root.kind == NodeKind::assertion);
    const AstNode& prop = only_child(ast, root);
    CHECK(prop.kind == NodeKind::property);
    const AstNode& impl = only_child(ast, prop);
    CHECK(impl.kind == NodeKind::implication);
    CHECK(impl.text == "|->");
    REQUIRE(impl.children.size() == 2);
    CHECK(ast.node(impl.children[0]).text == "req");
    CHECK(ast.node(impl.children[1]).text == "gnt");
}

TEST_CASE("parser: clocking, disable iff, and delay on the consequent") {
    auto pa = parse_assertion("t", "assert property (@(posedge clk) disable iff (rst) req |-> ##1 gnt);");
    REQUIRE(pa.syntax_ok);
    const Ast& ast = *pa.ast;
    const AstNode& prop = only_child(ast, ast.node(ast.root()));
    REQUIRE(prop.children.size() == 3);
    const AstNode& clk = ast.node(prop.children[0]);
    CHECK(clk.kind == NodeKind::clocking_event);
    CHECK(clk.text == "posedge");
    const AstNode& dis = ast.node(prop.children[1]);
    CHECK(dis.kind == NodeKind::sequence);
    CHECK(dis.text == "disable iff");
    const AstNode& impl = ast.node(prop.children[2]);
    CHECK(impl.kind == NodeKind::implication);
    const AstNode& delay = ast.node(impl.children[1]);
    CHECK(delay.kind == NodeKind::delay);
    CHECK(delay.text == "##1");
    REQUIRE(delay.children.size() == 1); // leading delay wraps just the consequent
    CHECK(ast.node(delay.children[0]).text == "gnt");
}

TEST_CASE("parser: precedence and associativity") {
    // || binds looser than &&
    auto pa = parse_assertion("t", "assert property (a || b && c);");
    REQUIRE(pa.syntax_ok);
    const Ast& ast = *pa.ast;
    const AstNode& orn = only_child(ast, only_child(ast, ast.node(ast.root())));
    CHECK(orn.text == "||");
    CHECK(ast.node(orn.children[1]).text == "&&");

    // implication is right-associative
    auto pb = parse_assertion("t", "assert property (a |-> b |-> c);");
    REQUIRE(pb.syntax_ok);
    const Ast& astb = *pb.ast;
    const AstNode& outer = only_child(astb, only_child(astb, astb.node(astb.root())));
    CHECK(outer.kind == NodeKind::implication);
    CHECK(astb.node(outer.children[0]).text == "a");
    CHECK(astb.node(outer.children[1]).kind == NodeKind::implication);

    // delay chains are left-associative
    auto pc = parse_assertion("t", "assert property (a ##1 b ##2 c);");
    REQUIRE(pc.syntax_ok);
    const Ast& astc = *pc.ast;
    const AstNode& outer_delay = only_child(astc, only_child(astc, astc.node(astc.root())));
    CHECK(outer_delay.kind == NodeKind::delay);
    CHECK(outer_delay.text == "##2");
    CHECK(astc.node(outer_delay.children[0]).kind == NodeKind::delay);
    CHECK(astc.node(outer_delay.children[0]).text == "##1");
}

TEST_CASE("parser: selects and repetition") {
    auto pa = parse_assertion("t", "assert property (a[7:0] == 8'h00 && b[3][*2]);");
    REQUIRE(pa.syntax_ok);
    const Ast& ast = *pa.ast;
    bool saw_range = false, saw_index = false, saw_rep = false;
    for (const auto& nd : ast.nodes()) {
        saw_range |= nd.kind == NodeKind::range_select;
        saw_index |= nd.kind == NodeKind::index_select;
        saw_rep |= nd.kind == NodeKind::repetition;
    }
    CHECK(saw_range);
    CHECK(saw_index);
    CHECK(saw_rep);
    CHECK_FALSE(parse_assertion("t", "assert property ((a && b)[3]);").syntax_ok);
}

TEST_CASE("parser: unsupported system function is rejected") {
    auto pa = parse_assertion("t", "assert property ($onehot(a));");
    CHECK_FALSE(pa.syntax_ok);
    CHECK(pa.diagnostic.find("$onehot") != std::string::npos);
}

TEST_CASE("parse_assertion: empty id is an error, never a parse failure") {
    CHECK_THROWS_AS(parse_assertion("", "assert property (a);"), ArgumentError);
}

TEST_CASE("extract_signals: sorted, deduplicated, selects collapse to base name") {
    auto pa = parse_assertion("t", "assert property (b && a && b);");
    REQUIRE(pa.syntax_ok);
    CHECK(pa.signals == std::vector<std::string>{"a", "b"});

    auto pb = parse_assertion("t", "assert property (a[3] |-> $past(m.q[7:0]));");
    REQUIRE(pb.syntax_ok);
    CHECK(pb.signals == std::vector<std::string>{"a", "m.q"});
}

TEST_CASE("corpus: every grammatical fixture parses and matches its hand labels") {
    auto corpus = load_corpus(oracle::fixture("sva/corpus.jsonl"));
    REQUIRE(corpus.size() >= 30);
    for (const auto& e : corpus) {
        CAPTURE(e.id);
        CAPTURE(e.sva);
        auto pa = parse_assertion(e.id, e.sva);
        CHECK(pa.syntax_ok);
        REQUIRE(pa.ast.has_value());
        CHECK(pa.signals == e.signals);
        CHECK(pa.diagnostic.empty());
        // root is an assertion node; every child id resolves
        CHECK(pa.ast->node(pa.ast->root()).kind == NodeKind::assertion);
    }
}

TEST_CASE("corpus: print/re-parse round trip is structurally identical") {
    auto corpus = load_corpus(oracle::fixture("sva/corpus.jsonl"));
    for (const auto& e : corpus) {
        CAPTURE(e.id);
        auto pa = parse_assertion(e.id, e.sva);
        REQUIRE(pa.syntax_ok);
        std::string printed = to_source(*pa.ast);
        CAPTURE(printed);
        auto pb = parse_assertion(e.id, printed);
        REQUIRE(pb.syntax_ok);
        CHECK(structurally_equal(*pa.ast, *pb.ast));
    }
}

TEST_CASE("corpus: token spans partition their source") {
    auto corpus = load_corpus(oracle::fixture("sva/corpus.jsonl"));
    for (const auto& e : corpus) {
        CAPTURE(e.id);
        auto toks = tokenize(e.sva);
        std::size_t prev_end = 0;
        for (const auto& t : toks) {
            CHECK(t.span.begin >= prev_end);
            CHECK(t.span.end <= e.sva.size());
            CHECK(e.sva.substr(t.span.begin, t.span.end - t.span.begin) == t.lexeme);
            prev_end = t.span.end;
        }
    }
}

TEST_CASE("corpus: malformed fixtures fail cleanly") {
    auto bad = load_corpus(oracle::fixture("sva/malformed.jsonl"));
    REQUIRE(bad.size() >= 10);
    for (const auto& e : bad) {
        CAPTURE(e.id);
        CAPTURE(e.sva);
        auto pa = parse_assertion(e.id, e.sva);
        CHECK_FALSE(pa.syntax_ok);
        CHECK_FALSE(pa.ast.has_value());
        CHECK_FALSE(pa.diagnostic.empty());
        CHECK(pa.signals.empty());
    }
}

TEST_CASE("structurally_equal distinguishes operand order") {
    auto pa = parse_assertion("x", "assert property (a && b);");
    auto pb = parse_assertion("y", "assert property (b && a);");
    auto pc = parse_assertion("z", "assert property (a  &&   b);"); // spacing only
    REQUIRE(pa.syntax_ok);
    REQUIRE(pb.syntax_ok);
    REQUIRE(pc.syntax_ok);
    CHECK_FALSE(structurally_equal(*pa.ast, *pb.ast));
    CHECK(structurally_equal(*pa.ast, *pc.ast));
}

TEST_CASE("fuzz: arbitrary bytes never crash the entry point") {
    std::mt19937 rng(20260825);
    std::uniform_int_distribution<int> len(0, 80);
    std::uniform_int_distribution<int> byte(1, 255);
    for (int iter = 0; iter < 300; ++iter) {
        std::string s;
        int n = len(rng);
        for (int i = 0; i < n; ++i)
            s.push_back(static_cast<char>(byte(rng)));
        auto pa = parse_assertion("fuzz", s);
        if (!pa.syntax_ok)
            CHECK_FALSE(pa.diagnostic.empty());
    }
    // mutations of a valid assertion
    std::string base = "assert property (@(posedge clk) req |-> ##1 gnt);";
    for (int iter = 0; iter < 300; ++iter) {
        std::string s = base;
        std::uniform_int_distribution<std::size_t> pos(0, s.size() - 1);
        s[pos(rng)] = static_cast<char>(byte(rng));
        (void)parse_assertion("fuzz", s);
    }
}

TEST_CASE("Ast construction invariants") {
    Ast ast;
    int leaf = ast.add_node(NodeKind::signal_ref, "a", {}, {0, 1});
    CHECK_THROWS_AS(ast.add_node(NodeKind::boolean_op, "&&", {leaf, 99}, {0, 1}), NodeNotFound);
    int op = ast.add_node(NodeKind::unary_op, "!", {leaf}, {0, 1});

    // second parent for the same child
    Ast two;
    int l2 = two.add_node(NodeKind::signal_ref, "a", {}, {0, 1});
    two.add_node(NodeKind::unary_op, "!", {l2}, {0, 1});
    int r2 = two.add_node(NodeKind::unary_op, "!", {l2}, {0, 1});
    CHECK_THROWS_AS(two.finalize(r2), ArgumentError);

    // detached node
    Ast det;
    det.add_node(NodeKind::signal_ref, "a", {}, {0, 1});
    int lone = det.add_node(NodeKind::signal_ref, "b", {}, {0, 1});
    CHECK_THROWS_AS(det.finalize(lone), ArgumentError);

    // signal_ref must stay a leaf
    Ast leafy;
    int x = leafy.add_node(NodeKind::signal_ref, "a", {}, {0, 1});
    int y = leafy.add_node(NodeKind::signal_ref, "b", {x}, {0, 1});
    CHECK_THROWS_AS(leafy.finalize(y), ArgumentError);

    ast.finalize(op);
    CHECK(ast.root() == op);
    CHECK(ast.parent(leaf) == op);
    CHECK(ast.parent(op) == -1);
    CHECK(ast.depth(leaf) == 1);
    CHECK(ast.depth(op) == 0);
    CHECK_THROWS_AS(ast.add_node(NodeKind::literal, "1", {}, {0, 1}), ArgumentError);
    CHECK_THROWS_AS(ast.node(42), NodeNotFound);
}

TEST_CASE("signal_leaves are ordered by source position") {
    auto pa = parse_assertion("t", "assert property (gnt && req);");
    REQUIRE(pa.syntax_ok);
    auto leaves = pa.ast->signal_leaves();
    REQUIRE(leaves.size() == 2);
    CHECK(pa.ast->node(leaves[0]).text == "gnt");
    CHECK(pa.ast->node(leaves[1]).text == "req");
}

TEST_CASE("extract_sv_assertions pulls statements out of a module") {
    std::string sv = oracle::slurp(oracle::fixture("sva/sample.sv"));
    REQUIRE_FALSE(sv.empty());
    auto found = extract_sv_assertions(sv);
    REQUIRE(found.size() == 3);
    CHECK(found[0] == "assert property (@(posedge clk) req |-> ##1 gnt);");
    CHECK(found[2] == "assert property ($rose(gnt) |-> $past(req));");
    // the multi-line one still parses
    auto pa = parse_assertion("x", found[1]);
    CHECK(pa.syntax_ok);
    CHECK(pa.signals == std::vector<std::string>{"busy", "req", "rst"});
}
