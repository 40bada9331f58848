//------------------------------------------------------------------------------
// sva_ast.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/sva_ast.hpp"

#include "svacov/errors.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace svacov {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

bool is_keyword(std::string_view s) {
    return s == "assert" || s == "property" || s == "disable" || s == "iff" ||
           s == "posedge" || s == "negedge";
}

} // namespace

int node_kind_code(NodeKind k) {
    return static_cast<int>(k);
}

const char* node_kind_name(NodeKind k) {
    switch (k) {
    case NodeKind::assertion: return "assertion";
    case NodeKind::property: return "property";
    case NodeKind::clocking_event: return "clocking_event";
    case NodeKind::implication: return "implication";
    case NodeKind::delay: return "delay";
    case NodeKind::repetition: return "repetition";
    case NodeKind::boolean_op: return "boolean_op";
    case NodeKind::comparison: return "comparison";
    case NodeKind::unary_op: return "unary_op";
    case NodeKind::signal_ref: return "signal_ref";
    case NodeKind::index_select: return "index_select";
    case NodeKind::range_select: return "range_select";
    case NodeKind::literal: return "literal";
    case NodeKind::system_func: return "system_func";
    case NodeKind::sequence: return "sequence";
    }
    return "unknown";
}

std::optional<NodeKind> node_kind_from_code(int code) {
    if (code < 1 || code > 15)
        return std::nullopt;
    return static_cast<NodeKind>(code);
}

// --- tokenizer ---------------------------------------------------------------

std::vector<SvaToken> tokenize(std::string_view src) {
    std::vector<SvaToken> out;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto push = [&](TokenKind kind, std::size_t begin, std::size_t end) {
        out.push_back({kind, std::string(src.substr(begin, end - begin)), {begin, end}});
    };

    while (i < n) {
        char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        // comments
        if (c == '/' && i + 1 < n && src[i + 1] == '/') {
            i += 2;
            while (i < n && src[i] != '\n')
                ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && src[i + 1] == '*') {
            std::size_t start = i;
            i += 2;
            while (i + 1 < n && !(src[i] == '*' && src[i + 1] == '/'))
                ++i;
            if (i + 1 >= n)
                throw LexError("unterminated block comment", start);
            i += 2;
            continue;
        }
        // identifiers (hierarchical names stay one token: a.b.c)
        if (is_ident_start(c)) {
            std::size_t b = i;
            while (i < n && is_ident_char(src[i]))
                ++i;
            while (i + 1 < n && src[i] == '.' && is_ident_start(src[i + 1])) {
                ++i; // dot
                while (i < n && is_ident_char(src[i]))
                    ++i;
            }
            std::string_view lex = src.substr(b, i - b);
            push(is_keyword(lex) ? TokenKind::keyword : TokenKind::identifier, b, i);
            continue;
        }
        // system identifiers ($past, $rose, ...)
        if (c == '$' && i + 1 < n && is_ident_start(src[i + 1])) {
            std::size_t b = i;
            ++i;
            while (i < n && is_ident_char(src[i]))
                ++i;
            push(TokenKind::keyword, b, i);
            continue;
        }
        // numbers, including sized literals like 8'h00
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t b = i;
            while (i < n && std::isdigit(static_cast<unsigned char>(src[i])))
                ++i;
            if (i + 1 < n && src[i] == '\'' &&
                std::string_view("bodhBODH").find(src[i + 1]) != std::string_view::npos) {
                i += 2;
                std::size_t digits = 0;
                while (i < n && (std::isalnum(static_cast<unsigned char>(src[i])) ||
                                 src[i] == '_' || src[i] == '?')) {
                    ++i;
                    ++digits;
                }
                if (digits == 0)
                    throw LexError("malformed based literal", b);
            }
            push(TokenKind::number, b, i);
            continue;
        }
        // multi-char operators, longest first
        static const std::string_view ops3[] = {"|->", "|=>"};
        static const std::string_view ops2[] = {"##", "[*", "&&", "||", "==", "!=", "<=", ">="};
        bool matched = false;
        for (auto op : ops3) {
            if (src.substr(i, 3) == op) {
                push(TokenKind::op, i, i + 3);
                i += 3;
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        for (auto op : ops2) {
            if (src.substr(i, 2) == op) {
                push(TokenKind::op, i, i + 2);
                i += 2;
                matched = true;
                break;
            }
        }
        if (matched)
            continue;
        if (c == '<' || c == '>' || c == '!' || c == '@') {
            push(TokenKind::op, i, i + 1);
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == '[' || c == ']' || c == ':' || c == ';' || c == ',') {
            push(TokenKind::punctuation, i, i + 1);
            ++i;
            continue;
        }
        throw LexError("illegal character '" + std::string(1, c) + "'", i);
    }
    return out;
}

// --- Ast ----------------------------------------------------------------------

int Ast::add_node(NodeKind kind, std::string text, std::vector<int> children, Span span) {
    if (finalized_)
        throw ArgumentError("Ast is frozen; no nodes may be added");
    for (int c : children)
        if (c < 0 || static_cast<std::size_t>(c) >= nodes_.size())
            throw NodeNotFound("child id " + std::to_string(c) + " does not exist yet");
    int id = static_cast<int>(nodes_.size());
    nodes_.push_back({id, kind, std::move(text), std::move(children), span});
    return id;
}

void Ast::finalize(int root_id) {
    if (root_id < 0 || static_cast<std::size_t>(root_id) >= nodes_.size())
        throw NodeNotFound("root id out of range");
    parents_.assign(nodes_.size(), -1);
    std::vector<int> indeg(nodes_.size(), 0);
    for (const auto& nd : nodes_) {
        for (int c : nd.children) {
            if (parents_[static_cast<std::size_t>(c)] != -1)
                throw ArgumentError("node " + std::to_string(c) + " has two parents");
            parents_[static_cast<std::size_t>(c)] = nd.id;
            ++indeg[static_cast<std::size_t>(c)];
        }
    }
    if (parents_[static_cast<std::size_t>(root_id)] != -1)
        throw ArgumentError("designated root has a parent");
    for (const auto& nd : nodes_) {
        if (nd.id != root_id && parents_[static_cast<std::size_t>(nd.id)] == -1)
            throw ArgumentError("node " + std::to_string(nd.id) + " is detached from the tree");
        if ((nd.kind == NodeKind::signal_ref || nd.kind == NodeKind::literal) &&
            !nd.children.empty())
            throw ArgumentError(std::string(node_kind_name(nd.kind)) + " nodes must be leaves");
    }
    root_ = root_id;
    finalized_ = true;
}

const AstNode& Ast::node(int id) const {
    if (id < 0 || static_cast<std::size_t>(id) >= nodes_.size())
        throw NodeNotFound("node id " + std::to_string(id) + " out of range");
    return nodes_[static_cast<std::size_t>(id)];
}

int Ast::parent(int id) const {
    node(id); // bounds check
    return parents_[static_cast<std::size_t>(id)];
}

int Ast::depth(int id) const {
    int d = 0;
    for (int cur = parent(id); cur != -1; cur = parents_[static_cast<std::size_t>(cur)])
        ++d;
    return d;
}

std::vector<int> Ast::signal_leaves() const {
    std::vector<int> out;
    for (const auto& nd : nodes_)
        if (nd.kind == NodeKind::signal_ref)
            out.push_back(nd.id);
    std::sort(out.begin(), out.end(), [&](int a, int b) {
        const auto& na = nodes_[static_cast<std::size_t>(a)];
        const auto& nb = nodes_[static_cast<std::size_t>(b)];
        if (na.span.begin != nb.span.begin)
            return na.span.begin < nb.span.begin;
        return a < b;
    });
    return out;
}

// --- parser ---------------------------------------------------------------------

namespace {

// Internal parse failure; converted to syntax_ok=false by parse_assertion.
struct ParseFail {
    std::string msg;
    std::size_t offset;
};

// Operand precedence levels used both for parsing and for minimal
// re-parenthesization in to_source.
int precedence(const AstNode& n) {
    switch (n.kind) {
    case NodeKind::implication: return 1;
    case NodeKind::delay: return 2;
    case NodeKind::boolean_op: return n.text == "||" ? 3 : 4;
    case NodeKind::comparison: return 5;
    case NodeKind::unary_op: return 6;
    case NodeKind::repetition:
    case NodeKind::index_select:
    case NodeKind::range_select: return 7;
    default: return 8;
    }
}

class Parser {
public:
    Parser(std::string_view src, std::vector<SvaToken> toks)
        : src_(src), toks_(std::move(toks)) {}

    Ast run() {
        int root = parse_assertion_stmt();
        if (!at_end())
            fail("trailing input after assertion");
        ast_.finalize(root);
        return std::move(ast_);
    }

private:
    std::string_view src_;
    std::vector<SvaToken> toks_;
    std::size_t pos_ = 0;
    Ast ast_;

    [[noreturn]] void fail(const std::string& msg) {
        throw ParseFail{msg, at_end() ? src_.size() : toks_[pos_].span.begin};
    }

    bool at_end() const { return pos_ >= toks_.size(); }

    const SvaToken& peek() const {
        static const SvaToken eof{TokenKind::punctuation, "", {0, 0}};
        return at_end() ? eof : toks_[pos_];
    }

    bool check(TokenKind kind, std::string_view lexeme) const {
        return !at_end() && toks_[pos_].kind == kind && toks_[pos_].lexeme == lexeme;
    }

    bool accept(TokenKind kind, std::string_view lexeme) {
        if (!check(kind, lexeme))
            return false;
        ++pos_;
        return true;
    }

    const SvaToken& expect(TokenKind kind, std::string_view lexeme) {
        if (!check(kind, lexeme))
            fail("expected '" + std::string(lexeme) + "', found '" + peek().lexeme + "'");
        return toks_[pos_++];
    }

    const SvaToken& expect_number() {
        if (at_end() || peek().kind != TokenKind::number)
            fail("expected number, found '" + peek().lexeme + "'");
        return toks_[pos_++];
    }

    std::size_t begin_here() const { return at_end() ? src_.size() : toks_[pos_].span.begin; }
    std::size_t end_prev() const { return pos_ == 0 ? 0 : toks_[pos_ - 1].span.end; }

    int parse_assertion_stmt() {
        std::size_t b = begin_here();
        expect(TokenKind::keyword, "assert");
        expect(TokenKind::keyword, "property");
        expect(TokenKind::punctuation, "(");
        int prop = parse_property();
        expect(TokenKind::punctuation, ")");
        accept(TokenKind::punctuation, ";");
        return ast_.add_node(NodeKind::assertion, "", {prop}, {b, end_prev()});
    }

    int parse_property() {
        std::size_t b = begin_here();
        std::vector<int> children;
        if (accept(TokenKind::op, "@")) {
            std::size_t cb = toks_[pos_ - 1].span.begin;
            expect(TokenKind::punctuation, "(");
            std::string edge;
            if (accept(TokenKind::keyword, "posedge"))
                edge = "posedge";
            else if (accept(TokenKind::keyword, "negedge"))
                edge = "negedge";
            else
                fail("expected posedge or negedge");
            int sig = parse_or();
            expect(TokenKind::punctuation, ")");
            children.push_back(
                ast_.add_node(NodeKind::clocking_event, edge, {sig}, {cb, end_prev()}));
        }
        if (check(TokenKind::keyword, "disable")) {
            std::size_t db = toks_[pos_].span.begin;
            ++pos_;
            expect(TokenKind::keyword, "iff");
            expect(TokenKind::punctuation, "(");
            int cond = parse_or();
            expect(TokenKind::punctuation, ")");
            children.push_back(
                ast_.add_node(NodeKind::sequence, "disable iff", {cond}, {db, end_prev()}));
        }
        children.push_back(parse_prop_expr());
        return ast_.add_node(NodeKind::property, "", std::move(children), {b, end_prev()});
    }

    // implication is right-associative and binds loosest
    int parse_prop_expr() {
        std::size_t b = begin_here();
        int lhs = parse_seq_expr();
        for (std::string_view op : {"|->", "|=>"}) {
            if (accept(TokenKind::op, op)) {
                int rhs = parse_prop_expr();
                return ast_.add_node(NodeKind::implication, std::string(op), {lhs, rhs},
                                     {b, end_prev()});
            }
        }
        return lhs;
    }

    // ##-delay chains, left-associative, with an optional leading delay
    int parse_seq_expr() {
        std::size_t b = begin_here();
        int cur;
        if (check(TokenKind::op, "##")) {
            std::string d = parse_delay_spec();
            int operand = parse_or();
            cur = ast_.add_node(NodeKind::delay, d, {operand}, {b, end_prev()});
        } else {
            cur = parse_or();
        }
        while (check(TokenKind::op, "##")) {
            std::string d = parse_delay_spec();
            int rhs = parse_or();
            cur = ast_.add_node(NodeKind::delay, d, {cur, rhs}, {b, end_prev()});
        }
        return cur;
    }

    // consumes ##N or ##[m:n]; returns the canonical operator text
    std::string parse_delay_spec() {
        expect(TokenKind::op, "##");
        if (accept(TokenKind::punctuation, "[")) {
            const auto& m = expect_number();
            expect(TokenKind::punctuation, ":");
            const auto& n = expect_number();
            expect(TokenKind::punctuation, "]");
            return "##[" + m.lexeme + ":" + n.lexeme + "]";
        }
        const auto& n = expect_number();
        return "##" + n.lexeme;
    }

    int parse_or() {
        std::size_t b = begin_here();
        int lhs = parse_and();
        while (accept(TokenKind::op, "||")) {
            int rhs = parse_and();
            lhs = ast_.add_node(NodeKind::boolean_op, "||", {lhs, rhs}, {b, end_prev()});
        }
        return lhs;
    }

    int parse_and() {
        std::size_t b = begin_here();
        int lhs = parse_cmp();
        while (accept(TokenKind::op, "&&")) {
            int rhs = parse_cmp();
            lhs = ast_.add_node(NodeKind::boolean_op, "&&", {lhs, rhs}, {b, end_prev()});
        }
        return lhs;
    }

    // single, non-associative comparison
    int parse_cmp() {
        std::size_t b = begin_here();
        int lhs = parse_unary();
        for (std::string_view op : {"==", "!=", "<=", ">=", "<", ">"}) {
            if (accept(TokenKind::op, op)) {
                int rhs = parse_unary();
                return ast_.add_node(NodeKind::comparison, std::string(op), {lhs, rhs},
                                     {b, end_prev()});
            }
        }
        return lhs;
    }

    int parse_unary() {
        if (check(TokenKind::op, "!")) {
            std::size_t b = toks_[pos_].span.begin;
            ++pos_;
            int operand = parse_unary();
            return ast_.add_node(NodeKind::unary_op, "!", {operand}, {b, end_prev()});
        }
        return parse_postfix();
    }

    // selects (on plain signals) and [*n] repetition
    int parse_postfix() {
        std::size_t b = begin_here();
        int cur = parse_primary();
        for (;;) {
            if (check(TokenKind::punctuation, "[")) {
                if (ast_.node(cur).kind != NodeKind::signal_ref)
                    fail("bit/part select is only valid on a signal");
                ++pos_;
                const auto& hi = expect_number();
                int hi_id = ast_.add_node(NodeKind::literal, hi.lexeme, {}, hi.span);
                if (accept(TokenKind::punctuation, ":")) {
                    const auto& lo = expect_number();
                    int lo_id = ast_.add_node(NodeKind::literal, lo.lexeme, {}, lo.span);
                    expect(TokenKind::punctuation, "]");
                    cur = ast_.add_node(NodeKind::range_select, "", {cur, hi_id, lo_id},
                                        {b, end_prev()});
                } else {
                    expect(TokenKind::punctuation, "]");
                    cur = ast_.add_node(NodeKind::index_select, "", {cur, hi_id},
                                        {b, end_prev()});
                }
                continue;
            }
            if (check(TokenKind::op, "[*")) {
                ++pos_;
                const auto& m = expect_number();
                std::string text = "[*" + m.lexeme;
                if (accept(TokenKind::punctuation, ":")) {
                    const auto& n = expect_number();
                    text += ":" + n.lexeme;
                }
                expect(TokenKind::punctuation, "]");
                text += "]";
                cur = ast_.add_node(NodeKind::repetition, text, {cur}, {b, end_prev()});
                continue;
            }
            break;
        }
        return cur;
    }

    int parse_primary() {
        if (accept(TokenKind::punctuation, "(")) {
            int inner = parse_prop_expr();
            expect(TokenKind::punctuation, ")");
            return inner;
        }
        if (!at_end() && peek().kind == TokenKind::number) {
            const auto& t = toks_[pos_++];
            return ast_.add_node(NodeKind::literal, t.lexeme, {}, t.span);
        }
        if (!at_end() && peek().kind == TokenKind::keyword && peek().lexeme[0] == '$') {
            const auto& t = toks_[pos_];
            if (t.lexeme != "$past" && t.lexeme != "$rose" && t.lexeme != "$fell" &&
                t.lexeme != "$stable")
                fail("unsupported system function '" + t.lexeme + "'");
            std::size_t b = t.span.begin;
            std::string name = t.lexeme;
            ++pos_;
            expect(TokenKind::punctuation, "(");
            std::vector<int> args;
            args.push_back(parse_or());
            while (accept(TokenKind::punctuation, ","))
                args.push_back(parse_or());
            expect(TokenKind::punctuation, ")");
            return ast_.add_node(NodeKind::system_func, name, std::move(args), {b, end_prev()});
        }
        if (!at_end() && peek().kind == TokenKind::identifier) {
            const auto& t = toks_[pos_++];
            return ast_.add_node(NodeKind::signal_ref, t.lexeme, {}, t.span);
        }
        fail("expected expression, found '" + peek().lexeme + "'");
    }
};

} // namespace

ParsedAssertion parse_assertion(const std::string& id, const std::string& source) {
    if (id.empty())
        throw ArgumentError("assertion id must not be empty");
    ParsedAssertion pa;
    pa.assertion_id = id;
    pa.raw_text = source;
    try {
        auto toks = tokenize(source);
        if (toks.empty())
            throw ParseFail{"empty assertion source", 0};
        Parser parser(source, std::move(toks));
        pa.ast = parser.run();
        pa.signals = extract_signals(*pa.ast);
        pa.syntax_ok = true;
    } catch (const LexError& e) {
        pa.ast.reset();
        pa.syntax_ok = false;
        pa.diagnostic = e.what();
    } catch (const ParseFail& e) {
        pa.ast.reset();
        pa.syntax_ok = false;
        pa.diagnostic = e.msg + " at byte " + std::to_string(e.offset);
    }
    return pa;
}

std::vector<std::string> extract_signals(const Ast& ast) {
    std::set<std::string> names;
    for (const auto& nd : ast.nodes())
        if (nd.kind == NodeKind::signal_ref)
            names.insert(nd.text);
    return {names.begin(), names.end()};
}

namespace {

std::string print_node(const Ast& ast, int id);

std::string print_wrapped(const Ast& ast, int id, int min_prec) {
    std::string s = print_node(ast, id);
    if (precedence(ast.node(id)) < min_prec)
        return "(" + s + ")";
    return s;
}

std::string print_node(const Ast& ast, int id) {
    const AstNode& n = ast.node(id);
    switch (n.kind) {
    case NodeKind::assertion:
        return "assert property (" + print_node(ast, n.children[0]) + ");";
    case NodeKind::property: {
        std::string out;
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += " ";
            out += print_node(ast, n.children[i]);
        }
        return out;
    }
    case NodeKind::clocking_event:
        return "@(" + n.text + " " + print_node(ast, n.children[0]) + ")";
    case NodeKind::sequence: // disable iff wrapper
        return "disable iff (" + print_node(ast, n.children[0]) + ")";
    case NodeKind::implication:
        return print_wrapped(ast, n.children[0], 2) + " " + n.text + " " +
               print_wrapped(ast, n.children[1], 1);
    case NodeKind::delay:
        if (n.children.size() == 1)
            return n.text + " " + print_wrapped(ast, n.children[0], 3);
        return print_wrapped(ast, n.children[0], 2) + " " + n.text + " " +
               print_wrapped(ast, n.children[1], 3);
    case NodeKind::boolean_op: {
        int prec = n.text == "||" ? 3 : 4;
        return print_wrapped(ast, n.children[0], prec) + " " + n.text + " " +
               print_wrapped(ast, n.children[1], prec + 1);
    }
    case NodeKind::comparison:
        return print_wrapped(ast, n.children[0], 6) + " " + n.text + " " +
               print_wrapped(ast, n.children[1], 6);
    case NodeKind::unary_op:
        return "!" + print_wrapped(ast, n.children[0], 6);
    case NodeKind::repetition:
        return print_wrapped(ast, n.children[0], 7) + n.text;
    case NodeKind::index_select:
        return print_node(ast, n.children[0]) + "[" + print_node(ast, n.children[1]) + "]";
    case NodeKind::range_select:
        return print_node(ast, n.children[0]) + "[" + print_node(ast, n.children[1]) + ":" +
               print_node(ast, n.children[2]) + "]";
    case NodeKind::signal_ref:
    case NodeKind::literal:
        return n.text;
    case NodeKind::system_func: {
        std::string out = n.text + "(";
        for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i)
                out += ", ";
            out += print_node(ast, n.children[i]);
        }
        return out + ")";
    }
    }
    return "";
}

bool nodes_equal(const Ast& a, int ia, const Ast& b, int ib) {
    const AstNode& na = a.node(ia);
    const AstNode& nb = b.node(ib);
    if (na.kind != nb.kind || na.text != nb.text || na.children.size() != nb.children.size())
        return false;
    for (std::size_t i = 0; i < na.children.size(); ++i)
        if (!nodes_equal(a, na.children[i], b, nb.children[i]))
            return false;
    return true;
}

} // namespace

std::string to_source(const Ast& ast) {
    return print_node(ast, ast.root());
}

bool structurally_equal(const Ast& a, const Ast& b) {
    if (a.size() != b.size())
        return false;
    return nodes_equal(a, a.root(), b, b.root());
}

std::vector<std::string> extract_sv_assertions(std::string_view src) {
    std::vector<std::string> out;
    std::size_t i = 0;
    const std::size_t n = src.size();

    auto skip_noise = [&](std::size_t p) {
        for (;;) {
            while (p < n && std::isspace(static_cast<unsigned char>(src[p])))
                ++p;
            if (p + 1 < n && src[p] == '/' && src[p + 1] == '/') {
                while (p < n && src[p] != '\n')
                    ++p;
                continue;
            }
            if (p + 1 < n && src[p] == '/' && src[p + 1] == '*') {
                p += 2;
                while (p + 1 < n && !(src[p] == '*' && src[p + 1] == '/'))
                    ++p;
                p = p + 1 < n ? p + 2 : n;
                continue;
            }
            return p;
        }
    };

    while (i < n) {
        char c = src[i];
        if (c == '/' && i + 1 < n && (src[i + 1] == '/' || src[i + 1] == '*')) {
            i = skip_noise(i);
            continue;
        }
        if (c == '"') {
            ++i;
            while (i < n && src[i] != '"') {
                if (src[i] == '\\')
                    ++i;
                ++i;
            }
            ++i;
            continue;
        }
        if (is_ident_start(c)) {
            std::size_t b = i;
            while (i < n && is_ident_char(src[i]))
                ++i;
            if (src.substr(b, i - b) == "assert") {
                std::size_t after = skip_noise(i);
                std::size_t wb = after;
                while (after < n && is_ident_char(src[after]))
                    ++after;
                if (src.substr(wb, after - wb) == "property") {
                    // capture through the terminating semicolon
                    std::size_t p = after;
                    while (p < n && src[p] != ';') {
                        if (src[p] == '/' && p + 1 < n && (src[p + 1] == '/' || src[p + 1] == '*'))
                            p = skip_noise(p);
                        else
                            ++p;
                    }
                    if (p < n)
                        ++p; // include ';'
                    out.emplace_back(src.substr(b, p - b));
                    i = p;
                }
            }
            continue;
        }
        ++i;
    }
    return out;
}

} // namespace svacov
