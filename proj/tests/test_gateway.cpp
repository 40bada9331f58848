//------------------------------------------------------------------------------
// test_gateway.cpp
// Stub backend determinism, prompt templates, the response cache, retry
// policy, and the HTTP backend wire contract against a local server
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "support/oracles.hpp"
#include "svacov/errors.hpp"
#include "svacov/gateway.hpp"
#include "svacov/util.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <fstream>
#include <thread>

using namespace svacov;
using nlohmann::json;

namespace {

GatewayConfig fast_cfg() {
    GatewayConfig cfg;
    cfg.backoff_initial_ms = 1;
    cfg.backoff_multiplier = 1.0;
    return cfg;
}

/// Counts calls and answers from fixed tables; fails transiently on demand.
class ScriptedBackend : public Backend {
public:
    std::string tag() const override { return "scripted"; }
    std::string chat(const std::string& prompt) override {
        ++chat_calls;
        if (fail_next > 0) {
            --fail_next;
            throw BackendError("scripted transient failure", /*transient=*/true);
        }
        if (auth_fail)
            throw AuthError("scripted auth failure");
        return "reply to: " + prompt;
    }
    std::vector<double> embed(const std::string& text) override {
        ++embed_calls;
        return {static_cast<double>(text.size()), 1.0};
    }
    int dimension() const override { return 2; }

    int chat_calls = 0;
    int embed_calls = 0;
    int fail_next = 0;
    bool auth_fail = false;
};

} // namespace

TEST_CASE("stub embedding: deterministic, dimension d_sem, token-set semantics") {
    StubBackend stub(64);
    auto a = stub.embed("req gnt");
    CHECK(a.size() == 64);
    CHECK(a == stub.embed("req gnt"));
    // duplicates, order, case and separators do not matter: same token set
    CHECK(a == stub.embed("gnt req REQ"));
    CHECK(a == stub.embed("(req)   &&   [gnt]"));
    CHECK(a != stub.embed("req"));
    // unnormalized values in [-1, 1) per token; two tokens bound the sum
    for (double x : a)
        CHECK(std::abs(x) < 2.0);
    // empty text embeds to the zero vector
    auto zero = stub.embed("; ,");
    for (double x : zero)
        CHECK(x == 0.0);
    CHECK(stub.network_requests() == 0);
}

TEST_CASE("stub embedding matches the independently retyped definition") {
    StubBackend stub(48);
    for (const char* text : {"req gnt", "assert property (a |-> b);",
                             "SIGNALS[clk,gnt,req] IMPLIES DELAY1",
                             "The flag rx_full clears one cycle after rx_ack is asserted."}) {
        CAPTURE(text);
        auto impl = stub.embed(text);
        auto ref = oracle::stub_embed(text, 48);
        REQUIRE(impl.size() == ref.size());
        for (std::size_t i = 0; i < impl.size(); ++i)
            CHECK(impl[i] == doctest::Approx(ref[i]).epsilon(1e-15));
    }
}

TEST_CASE("stub chat: intent task emits the canonical summary") {
    StubBackend stub(64);
    std::string prompt =
        "TASK: INTENT\n"
        "Summarize.\n"
        "SVA:\n"
        "assert property (@(posedge clk) req |-> ##1 gnt);\n"
        "SIGNALS:\n"
        "clk,gnt,req\n";
    CHECK(stub.chat(prompt) == "SIGNALS[clk,gnt,req] IMPLIES DELAY1");

    std::string unparsed =
        "TASK: INTENT\nSVA:\nassert property (a |->);\nSIGNALS:\na\n";
    CHECK(stub.chat(unparsed) == "SIGNALS[a] UNPARSED");

    std::string plain = "TASK: INTENT\nSVA:\nassert property (req);\nSIGNALS:\nreq\n";
    CHECK(stub.chat(plain) == "SIGNALS[req] PLAIN");
}

TEST_CASE("stub chat: op summaries cover the construct table") {
    StubBackend stub(64);
    auto intent = [&](const std::string& sva, const std::string& signals) {
        return stub.chat("TASK: INTENT\nSVA:\n" + sva + "\nSIGNALS:\n" + signals + "\n");
    };
    CHECK(intent("assert property (a |=> b);", "a,b") == "SIGNALS[a,b] IMPLIES_NEXT");
    CHECK(intent("assert property (a ##[2:3] b);", "a,b") == "SIGNALS[a,b] DELAY2TO3");
    CHECK(intent("assert property (a[*3] |-> b);", "a,b") == "SIGNALS[a,b] IMPLIES REPEAT3");
    CHECK(intent("assert property (a || !b);", "a,b") == "SIGNALS[a,b] OR NOT");
    CHECK(intent("assert property (a == 3);", "a") == "SIGNALS[a] EQ");
    CHECK(intent("assert property ($fell(a) |-> $stable(b));", "a,b") ==
          "SIGNALS[a,b] IMPLIES FELL STABLE");
}

TEST_CASE("stub chat: unknown task yields a deterministic fingerprint") {
    StubBackend stub(64);
    std::string r = stub.chat("TASK: SOMETHING ELSE\nbody\n");
    CHECK(starts_with(r, "STUB:"));
    CHECK(r.size() == 5 + 16);
    CHECK(r == stub.chat("TASK: SOMETHING ELSE\nbody\n"));
}

TEST_CASE("prompt templates substitute {{NAME}} placeholders") {
    PromptTemplate t("Hello {{WHO}}, {{WHAT}} and {{WHO}} again");
    CHECK(t.render({{"WHO", "world"}, {"WHAT", "x"}}) == "Hello world, x and world again");
    auto from_disk = PromptTemplate::from_file(oracle::prompts_dir() + "/intent.txt");
    CHECK(from_disk.text().find("TASK: INTENT") == 0);
    CHECK_THROWS_AS(PromptTemplate::from_file("/nonexistent/prompt.txt"), IoError);
}

TEST_CASE("gateway: cache collapses repeated calls") {
    auto owned = std::make_unique<ScriptedBackend>();
    ScriptedBackend* backend = owned.get();
    Gateway gw(fast_cfg(), std::move(owned));

    CHECK(gw.chat("p1") == "reply to: p1");
    CHECK(gw.chat("p1") == "reply to: p1");
    CHECK(backend->chat_calls == 1);
    CHECK(gw.cache_hits() == 1);
    CHECK(gw.chat("p2") == "reply to: p2");
    CHECK(backend->chat_calls == 2);

    auto e1 = gw.embed("text");
    auto e2 = gw.embed("text");
    CHECK(e1 == e2);
    CHECK(backend->embed_calls == 1);

    // bypass_cache forces a fresh call but still writes through
    CHECK(gw.chat("p1", /*bypass_cache=*/true) == "reply to: p1");
    CHECK(backend->chat_calls == 3);
    CHECK_THROWS_AS(gw.chat(""), ArgumentError);
}

TEST_CASE("gateway: cache file persists across instances and skips corrupt lines") {
    std::string dir = oracle::make_temp_dir("cache");
    std::string cache_path = dir + "/cache.jsonl";

    GatewayConfig cfg = fast_cfg();
    cfg.cache_path = cache_path;
    {
        auto owned = std::make_unique<ScriptedBackend>();
        Gateway gw(cfg, std::move(owned));
        CHECK(gw.chat("persisted") == "reply to: persisted");
        (void)gw.embed("vector me");
    }
    // corrupt the file with a junk line between valid records
    {
        std::ofstream app(cache_path, std::ios::app);
        app << "{ not json at all\n";
    }
    {
        auto owned = std::make_unique<ScriptedBackend>();
        ScriptedBackend* backend = owned.get();
        Gateway gw(cfg, std::move(owned));
        CHECK(gw.chat("persisted") == "reply to: persisted");
        CHECK(gw.embed("vector me") == std::vector<double>{9.0, 1.0});
        CHECK(backend->chat_calls == 0);
        CHECK(backend->embed_calls == 0);
        CHECK(gw.cache_hits() == 2);
    }

    ResponseCache direct(cache_path);
    CHECK(direct.entries() == 2);
    CHECK_FALSE(direct.lookup("chat:scripted:stub-chat", "never stored").has_value());
}

TEST_CASE("gateway: transient failures retry with budget, auth failures do not") {
    GatewayConfig cfg = fast_cfg();
    cfg.max_retries = 3;

    auto owned = std::make_unique<ScriptedBackend>();
    ScriptedBackend* backend = owned.get();
    Gateway gw(cfg, std::move(owned));
    backend->fail_next = 3;
    CHECK(gw.chat("eventually") == "reply to: eventually");
    CHECK(backend->chat_calls == 4);

    auto owned2 = std::make_unique<ScriptedBackend>();
    ScriptedBackend* b2 = owned2.get();
    Gateway gw2(cfg, std::move(owned2));
    b2->fail_next = 4; // one more than the budget
    CHECK_THROWS_AS(gw2.chat("never"), BackendError);
    CHECK(b2->chat_calls == 4);

    auto owned3 = std::make_unique<ScriptedBackend>();
    ScriptedBackend* b3 = owned3.get();
    Gateway gw3(cfg, std::move(owned3));
    b3->auth_fail = true;
    CHECK_THROWS_AS(gw3.chat("denied"), AuthError);
    CHECK(b3->chat_calls == 1);
}

TEST_CASE("http backend: wire contract, auth header, and status mapping") {
    httplib::Server svr;
    std::atomic<int> chat_hits{0};
    std::string seen_auth;

    svr.Post("/v1/chat", [&](const httplib::Request& req, httplib::Response& res) {
        ++chat_hits;
        seen_auth = req.get_header_value("Authorization");
        json body = json::parse(req.body);
        REQUIRE(body.contains("model"));
        REQUIRE(body.contains("messages"));
        REQUIRE(body["messages"].is_array());
        REQUIRE(body["messages"][0]["role"] == "user");
        json out;
        out["content"] = "echo: " + body["messages"][0]["content"].get<std::string>();
        res.set_content(out.dump(), "application/json");
    });
    svr.Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        json body = json::parse(req.body);
        REQUIRE(body.contains("model"));
        REQUIRE(body.contains("input"));
        json out;
        out["embedding"] = json::array({1.0, 2.0, 3.0});
        res.set_content(out.dump(), "application/json");
    });
    int port = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();

    setenv("SVACOV_TEST_KEY", "sekrit", 1);
    GatewayConfig cfg = fast_cfg();
    cfg.backend = BackendKind::http;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1";
    cfg.api_key_env = "SVACOV_TEST_KEY";
    cfg.chat_model = "model-x";
    cfg.d_sem = 3;

    {
        Gateway gw(cfg);
        CHECK(gw.backend_tag() == "http:" + cfg.endpoint);
        CHECK(gw.chat("hello") == "echo: hello");
        CHECK(seen_auth == "Bearer sekrit");
        CHECK(gw.embed("x") == std::vector<double>{1.0, 2.0, 3.0});
        CHECK(gw.network_requests() == 2);
        // cached second time: no extra round trip
        CHECK(gw.chat("hello") == "echo: hello");
        CHECK(gw.network_requests() == 2);
    }

    // a route that answers with an unexpected status is a plain BackendError
    {
        GatewayConfig d = cfg;
        d.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/nowhere";
        Gateway gw(fast_cfg(), std::make_unique<HttpBackend>(d));
        CHECK_THROWS_AS(gw.chat("x"), BackendError); // 404 is non-transient
    }

    // connection refused -> transient BackendError after budget
    {
        GatewayConfig dead = fast_cfg();
        dead.backend = BackendKind::http;
        dead.endpoint = "http://127.0.0.1:1";
        dead.max_retries = 1;
        Gateway gw(dead);
        CHECK_THROWS_AS(gw.chat("x"), BackendError);
    }

    svr.stop();
    server_thread.join();
}

TEST_CASE("http backend: 401 and 5xx routes through a dedicated endpoint") {
    httplib::Server svr;
    std::atomic<int> failures_left{2};
    svr.Post("/chat", [&](const httplib::Request&, httplib::Response& res) {
        if (failures_left-- > 0) {
            res.status = 503;
            return;
        }
        res.set_content("{\"content\": \"recovered\"}", "application/json");
    });
    svr.Post("/embeddings", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 401;
    });
    int port = svr.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&] { svr.listen_after_bind(); });
    svr.wait_until_ready();

    GatewayConfig cfg = fast_cfg();
    cfg.backend = BackendKind::http;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port);
    cfg.max_retries = 3;

    Gateway gw(cfg);
    CHECK(gw.chat("come back") == "recovered");
    CHECK(gw.network_requests() == 3); // two 503s then success
    CHECK_THROWS_AS(gw.embed("denied"), AuthError);

    // budget exhaustion: every attempt 503s
    failures_left = 100;
    GatewayConfig strict = cfg;
    strict.max_retries = 2;
    Gateway gw2(strict);
    CHECK_THROWS_AS(gw2.chat("hopeless"), BackendError);
    CHECK(gw2.network_requests() == 3); // initial try + 2 retries

    svr.stop();
    server_thread.join();
}
