//------------------------------------------------------------------------------
// gateway.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/gateway.hpp"

#include "svacov/errors.hpp"
#include "svacov/log.hpp"
#include "svacov/sva_ast.hpp"
#include "svacov/util.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <thread>

#define CPPHTTPLIB_NO_EXCEPTIONS 0
#include <httplib.h>

namespace svacov {

using nlohmann::json;

// --- stub backend -----------------------------------------------------------

namespace {

/// Content of a labeled prompt section: everything after the line `header`
/// up to the first of `terminators` (or end of prompt).
std::string prompt_section(const std::string& prompt, const std::string& header,
                           const std::vector<std::string>& terminators) {
    auto lines = split_lines(prompt);
    std::string out;
    bool in_section = false;
    for (const auto& line : lines) {
        if (!in_section) {
            if (trim(line) == header)
                in_section = true;
            continue;
        }
        bool is_term = false;
        for (const auto& t : terminators)
            if (trim(line) == t) {
                is_term = true;
                break;
            }
        if (is_term)
            break;
        if (!out.empty())
            out += "\n";
        out += line;
    }
    return out;
}

std::string inline_value(const std::string& prompt, const std::string& prefix) {
    for (const auto& line : split_lines(prompt)) {
        std::string t = trim(line);
        if (starts_with(t, prefix))
            return trim(t.substr(prefix.size()));
    }
    return "";
}

std::vector<std::string> parse_glossary_line(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text + ",") {
        if (c == ',' || c == '\n') {
            std::string t = trim(cur);
            if (!t.empty())
                out.push_back(t);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    return out;
}

std::string op_token(const AstNode& n) {
    switch (n.kind) {
    case NodeKind::implication:
        return n.text == "|->" ? "IMPLIES" : "IMPLIES_NEXT";
    case NodeKind::delay: {
        // "##1" -> DELAY1, "##[2:3]" -> DELAY2TO3
        std::string t = n.text.substr(2);
        if (!t.empty() && t.front() == '[') {
            t = t.substr(1, t.size() - 2);
            auto colon = t.find(':');
            return "DELAY" + t.substr(0, colon) + "TO" + t.substr(colon + 1);
        }
        return "DELAY" + t;
    }
    case NodeKind::repetition: {
        std::string t = n.text.substr(2, n.text.size() - 3); // strip "[*" and "]"
        auto colon = t.find(':');
        if (colon != std::string::npos)
            return "REPEAT" + t.substr(0, colon) + "TO" + t.substr(colon + 1);
        return "REPEAT" + t;
    }
    case NodeKind::boolean_op:
        return n.text == "&&" ? "AND" : "OR";
    case NodeKind::comparison:
        if (n.text == "==") return "EQ";
        if (n.text == "!=") return "NE";
        if (n.text == "<") return "LT";
        if (n.text == "<=") return "LE";
        if (n.text == ">") return "GT";
        return "GE";
    case NodeKind::unary_op:
        return "NOT";
    case NodeKind::system_func:
        return to_lower(n.text) == "$past"     ? "PAST"
               : to_lower(n.text) == "$rose"   ? "ROSE"
               : to_lower(n.text) == "$fell"   ? "FELL"
                                               : "STABLE";
    default:
        return "";
    }
}

void collect_op_tokens(const Ast& ast, int id, std::vector<std::string>& out) {
    const AstNode& n = ast.node(id);
    std::string tok = op_token(n);
    if (!tok.empty())
        out.push_back(tok);
    for (int c : n.children)
        collect_op_tokens(ast, c, out);
}

std::string stub_intent(const std::string& prompt) {
    std::string sva = prompt_section(prompt, "SVA:", {"SIGNALS:"});
    std::string signals = trim(prompt_section(prompt, "SIGNALS:", {}));

    std::string summary;
    ParsedAssertion pa = parse_assertion("stub", trim(sva));
    if (pa.syntax_ok) {
        std::vector<std::string> ops;
        collect_op_tokens(*pa.ast, pa.ast->root(), ops);
        summary = ops.empty() ? "PLAIN" : join(ops, " ");
    } else {
        summary = "UNPARSED";
    }
    return "SIGNALS[" + signals + "] " + summary;
}

std::vector<std::string> signals_in_text(const std::string& text,
                                         const std::vector<std::string>& glossary) {
    auto tokens = token_set(text);
    std::vector<std::string> out;
    for (const auto& g : glossary)
        if (tokens.count(to_lower(g)))
            out.push_back(g);
    std::sort(out.begin(), out.end());
    return out;
}

std::string stub_split(const std::string& prompt) {
    auto glossary =
        parse_glossary_line(prompt_section(prompt, "KNOWN SIGNALS:", {"SPECIFICATION:"}));
    std::string spec = prompt_section(prompt, "SPECIFICATION:", {});

    json arr = json::array();
    auto lines = split_lines(spec);
    std::size_t i = 0;
    while (i < lines.size()) {
        if (!starts_with(trim(lines[i]), "#")) {
            ++i;
            continue;
        }
        std::string heading = trim(lines[i]);
        std::string title = trim(heading.substr(heading.find_first_not_of('#')));
        std::string body = lines[i];
        std::size_t j = i + 1;
        while (j < lines.size() && !starts_with(trim(lines[j]), "#")) {
            body += "\n" + lines[j];
            ++j;
        }
        json sub;
        sub["title"] = title;
        sub["body"] = body;
        sub["signals"] = signals_in_text(body, glossary);
        arr.push_back(sub);
        i = j;
    }
    return arr.dump();
}

std::vector<std::string> split_sentences(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (std::size_t i = 0; i < text.size(); ++i) {
        cur.push_back(text[i]);
        char c = text[i];
        if ((c == '.' || c == '!' || c == '?') &&
            (i + 1 >= text.size() || std::isspace(static_cast<unsigned char>(text[i + 1])))) {
            std::string t = trim(cur);
            if (!t.empty())
                out.push_back(collapse_ws(t));
            cur.clear();
        }
    }
    return out; // trailing fragment without a terminator is not a sentence
}

std::string stub_points(const std::string& prompt) {
    auto glossary = parse_glossary_line(prompt_section(prompt, "KNOWN SIGNALS:", {"TITLE:"}));
    std::string body = prompt_section(prompt, "SECTION:", {});

    // drop heading lines; they are titles, not prose
    std::string prose;
    for (const auto& line : split_lines(body)) {
        if (starts_with(trim(line), "#"))
            continue;
        prose += line + "\n";
    }

    json arr = json::array();
    for (const auto& sentence : split_sentences(prose)) {
        auto sigs = signals_in_text(sentence, glossary);
        if (sigs.empty())
            continue;
        json p;
        p["statement"] = sentence;
        p["signals"] = sigs;
        arr.push_back(p);
    }
    return arr.dump();
}

} // namespace

std::string StubBackend::chat(const std::string& prompt) {
    std::string first = trim(split_lines(prompt).empty() ? "" : split_lines(prompt)[0]);
    if (first == "TASK: INTENT")
        return stub_intent(prompt);
    if (first == "TASK: SPLIT")
        return stub_split(prompt);
    if (first == "TASK: POINTS")
        return stub_points(prompt);
    // unknown prompt shape: deterministic echo of a content fingerprint
    return "STUB:" + hex64(fnv1a64(prompt));
}

std::vector<double> StubBackend::embed(const std::string& text) {
    std::vector<double> v(static_cast<std::size_t>(d_sem_), 0.0);
    for (const auto& token : token_set(text)) {
        std::uint64_t state = fnv1a64(token);
        for (auto& x : v)
            x += to_unit_interval(splitmix64(state));
    }
    return v;
}

// --- http backend -------------------------------------------------------------

HttpBackend::HttpBackend(GatewayConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.endpoint.empty())
        throw ArgumentError("http backend requires gateway.endpoint");
}

std::string HttpBackend::tag() const {
    return "http:" + cfg_.endpoint;
}

std::string HttpBackend::post_json(const std::string& path, const std::string& body,
                                   const std::string& expect_field) {
    // split "http://host:port/prefix" into client base and path prefix
    std::string base = cfg_.endpoint;
    std::string prefix;
    auto scheme = base.find("://");
    if (scheme != std::string::npos) {
        auto slash = base.find('/', scheme + 3);
        if (slash != std::string::npos) {
            prefix = base.substr(slash);
            base = base.substr(0, slash);
        }
    }
    httplib::Client client(base);
    client.set_connection_timeout(0, cfg_.timeout_ms * 1000);
    client.set_read_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);
    client.set_write_timeout(cfg_.timeout_ms / 1000, (cfg_.timeout_ms % 1000) * 1000);

    httplib::Headers headers;
    if (const char* key = std::getenv(cfg_.api_key_env.c_str()); key && *key)
        headers.emplace("Authorization", std::string("Bearer ") + key);

    ++requests_;
    auto res = client.Post(prefix + path, headers, body, "application/json");
    if (!res)
        throw BackendError("no response from " + cfg_.endpoint + path + ": " +
                               httplib::to_string(res.error()),
                           /*transient=*/true);
    if (res->status == 401 || res->status == 403)
        throw AuthError("authentication failed (" + std::to_string(res->status) + ")");
    if (res->status == 429 || res->status >= 500)
        throw BackendError("backend returned " + std::to_string(res->status),
                           /*transient=*/true);
    if (res->status != 200)
        throw BackendError("backend returned " + std::to_string(res->status) + ": " + res->body);

    json parsed = json::parse(res->body, nullptr, false);
    if (parsed.is_discarded() || !parsed.contains(expect_field))
        throw BackendError("malformed backend response; missing '" + expect_field + "'");
    return parsed[expect_field].dump();
}

std::string HttpBackend::chat(const std::string& prompt) {
    json body;
    body["model"] = cfg_.chat_model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    std::string content = post_json("/chat", body.dump(), "content");
    json s = json::parse(content);
    if (!s.is_string())
        throw BackendError("chat response 'content' is not a string");
    return s.get<std::string>();
}

std::vector<double> HttpBackend::embed(const std::string& text) {
    json body;
    body["model"] = cfg_.embed_model;
    body["input"] = text;
    std::string emb = post_json("/embeddings", body.dump(), "embedding");
    json arr = json::parse(emb);
    if (!arr.is_array())
        throw BackendError("embedding response is not an array");
    std::vector<double> out;
    out.reserve(arr.size());
    for (const auto& x : arr) {
        if (!x.is_number())
            throw BackendError("embedding entry is not a number");
        out.push_back(x.get<double>());
    }
    return out;
}

// --- cache ---------------------------------------------------------------------

ResponseCache::ResponseCache(std::string path) : path_(std::move(path)) {
    if (path_.empty() || !file_exists(path_))
        return;
    std::ifstream in(path_);
    std::string line;
    std::size_t bad = 0;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        json rec = json::parse(line, nullptr, false);
        if (rec.is_discarded() || !rec.contains("key") || !rec.contains("kind") ||
            !rec.contains("payload") || !rec.contains("value") || !rec["key"].is_string() ||
            !rec["kind"].is_string() || !rec["payload"].is_string()) {
            ++bad;
            continue;
        }
        std::uint64_t key =
            std::strtoull(rec["key"].get<std::string>().c_str(), nullptr, 16);
        map_[key].push_back(
            {rec["kind"].get<std::string>(), rec["payload"].get<std::string>(),
             rec["value"].dump()});
    }
    if (bad)
        log::warn("cache file " + path_ + ": skipped " + std::to_string(bad) +
                  " corrupt record(s)");
}

static std::uint64_t cache_key(const std::string& kind, const std::string& payload) {
    std::uint64_t h = fnv1a64(kind);
    h = fnv1a64("\x1f", h);
    return fnv1a64(payload, h);
}

std::optional<std::string> ResponseCache::lookup(const std::string& kind,
                                                 const std::string& payload) const {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = map_.find(cache_key(kind, payload));
    if (it == map_.end())
        return std::nullopt;
    for (const auto& e : it->second)
        if (e.kind == kind && e.payload == payload)
            return e.value;
    return std::nullopt;
}

void ResponseCache::store(const std::string& kind, const std::string& payload,
                          const std::string& value) {
    std::lock_guard<std::mutex> lock(mu_);
    std::uint64_t key = cache_key(kind, payload);
    map_[key].push_back({kind, payload, value});
    if (path_.empty())
        return;
    json rec;
    rec["created_at"] = static_cast<long long>(
        std::chrono::duration_cast<std::chrono::milliseconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count());
    rec["key"] = hex64(key);
    rec["kind"] = kind;
    rec["payload"] = payload;
    rec["value"] = json::parse(value);
    std::ofstream out(path_, std::ios::app);
    if (!out) {
        log::warn("cannot append to cache file " + path_);
        return;
    }
    out << rec.dump() << "\n";
}

std::size_t ResponseCache::entries() const {
    std::lock_guard<std::mutex> lock(mu_);
    std::size_t n = 0;
    for (const auto& [k, v] : map_)
        n += v.size();
    return n;
}

// --- gateway -------------------------------------------------------------------

namespace {

std::unique_ptr<Backend> make_backend(const GatewayConfig& cfg) {
    if (cfg.backend == BackendKind::http)
        return std::make_unique<HttpBackend>(cfg);
    return std::make_unique<StubBackend>(cfg.d_sem);
}

} // namespace

Gateway::Gateway(GatewayConfig cfg)
    : cfg_(cfg), backend_(make_backend(cfg)), cache_(cfg.cache_path) {}

Gateway::Gateway(GatewayConfig cfg, std::unique_ptr<Backend> backend)
    : cfg_(std::move(cfg)), backend_(std::move(backend)), cache_(cfg_.cache_path) {}

std::string Gateway::call_with_retries(const std::string& what,
                                       const std::function<std::string()>& attempt) {
    long delay = cfg_.backoff_initial_ms;
    for (int tries = 0;; ++tries) {
        try {
            ++backend_calls_;
            return attempt();
        } catch (const AuthError&) {
            throw;
        } catch (const BackendError& e) {
            if (!e.transient || tries >= cfg_.max_retries)
                throw BackendError(what + " failed after " + std::to_string(tries + 1) +
                                       " attempt(s): " + e.what(),
                                   e.transient);
            log::warn(what + " attempt " + std::to_string(tries + 1) + " failed (" + e.what() +
                      "); retrying in " + std::to_string(delay) + " ms");
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            delay = static_cast<long>(static_cast<double>(delay) * cfg_.backoff_multiplier);
        }
    }
}

std::string Gateway::chat(const std::string& prompt, bool bypass_cache) {
    if (prompt.empty())
        throw ArgumentError("chat prompt must not be empty");
    const std::string kind = "chat:" + backend_->tag() + ":" + cfg_.chat_model;
    if (!bypass_cache) {
        if (auto hit = cache_.lookup(kind, prompt)) {
            ++cache_hits_;
            return json::parse(*hit).get<std::string>();
        }
    }
    std::string response = call_with_retries("chat", [&] { return backend_->chat(prompt); });
    cache_.store(kind, prompt, json(response).dump());
    return response;
}

std::vector<double> Gateway::embed(const std::string& text) {
    if (text.empty())
        throw ArgumentError("embedding input must not be empty");
    const std::string kind = "embed:" + backend_->tag() + ":" + cfg_.embed_model;
    if (auto hit = cache_.lookup(kind, text)) {
        ++cache_hits_;
        return json::parse(*hit).get<std::vector<double>>();
    }
    std::vector<double> v;
    call_with_retries("embed", [&] {
        v = backend_->embed(text);
        return std::string();
    });
    if (static_cast<int>(v.size()) != backend_->dimension())
        throw DimensionMismatch("backend returned " + std::to_string(v.size()) +
                                "-dimensional embedding, declared " +
                                std::to_string(backend_->dimension()));
    cache_.store(kind, text, json(v).dump());
    return v;
}

// --- prompt templates ------------------------------------------------------------

PromptTemplate PromptTemplate::from_file(const std::string& path) {
    return PromptTemplate(read_file(path));
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& values) const {
    std::string out = text_;
    for (const auto& [name, value] : values) {
        std::string needle = "{{" + name + "}}";
        std::size_t pos = 0;
        while ((pos = out.find(needle, pos)) != std::string::npos) {
            out.replace(pos, needle.size(), value);
            pos += value.size();
        }
    }
    return out;
}

} // namespace svacov
