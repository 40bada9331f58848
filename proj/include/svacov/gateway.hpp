//------------------------------------------------------------------------------
// gateway.hpp
// Chat-completion and embedding behind one interface: an HTTP backend for
// real services and a deterministic offline stub, with retries and a
// persistent response cache
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/config.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace svacov {

class Backend {
public:
    virtual ~Backend() = default;
    virtual std::string tag() const = 0;
    virtual std::string chat(const std::string& prompt) = 0;
    virtual std::vector<double> embed(const std::string& text) = 0;
    virtual int dimension() const = 0;
    /// Network round trips issued so far. The stub always reports 0.
    virtual long network_requests() const { return 0; }
};

/// Deterministic offline backend. chat() dispatches on the TASK marker of the
/// prompt template; embed() sums per-token pseudo-vectors derived from an
/// FNV-1a seed fed through splitmix64 (values in [-1,1), un-normalized).
class StubBackend : public Backend {
public:
    explicit StubBackend(int d_sem) : d_sem_(d_sem) {}
    std::string tag() const override { return "stub"; }
    std::string chat(const std::string& prompt) override;
    std::vector<double> embed(const std::string& text) override;
    int dimension() const override { return d_sem_; }

private:
    int d_sem_;
};

/// POSTs {model, messages} to <endpoint>/chat and {model, input} to
/// <endpoint>/embeddings; expects {content} / {embedding} back. Bearer token
/// read from the configured environment variable.
class HttpBackend : public Backend {
public:
    explicit HttpBackend(GatewayConfig cfg);
    std::string tag() const override;
    std::string chat(const std::string& prompt) override;
    std::vector<double> embed(const std::string& text) override;
    int dimension() const override { return cfg_.d_sem; }
    long network_requests() const override { return requests_; }

private:
    std::string post_json(const std::string& path, const std::string& body,
                          const std::string& expect_field);
    GatewayConfig cfg_;
    long requests_ = 0;
};

/// Append-friendly key-value store; one JSON record per line. A corrupt line
/// invalidates only that record. Entries keep the full request payload, so a
/// hit is an exact payload match, not just a hash match.
class ResponseCache {
public:
    explicit ResponseCache(std::string path);

    std::optional<std::string> lookup(const std::string& kind, const std::string& payload) const;
    void store(const std::string& kind, const std::string& payload, const std::string& value);

    std::size_t entries() const;

private:
    struct Entry {
        std::string kind;
        std::string payload;
        std::string value; // serialized JSON
    };
    std::string path_;
    mutable std::mutex mu_;
    std::map<std::uint64_t, std::vector<Entry>> map_;
};

/// Front door for all model traffic: cache lookup, retry with geometric
/// backoff on transient failures, and per-call accounting.
class Gateway {
public:
    explicit Gateway(GatewayConfig cfg);
    Gateway(GatewayConfig cfg, std::unique_ptr<Backend> backend);

    /// Returns the chat completion for `prompt`. With bypass_cache the call
    /// skips the cache read but still writes the fresh response through.
    std::string chat(const std::string& prompt, bool bypass_cache = false);

    std::vector<double> embed(const std::string& text);

    int dimension() const { return backend_->dimension(); }
    std::string backend_tag() const { return backend_->tag(); }
    const GatewayConfig& config() const { return cfg_; }

    long backend_calls() const { return backend_calls_; }
    long network_requests() const { return backend_->network_requests(); }
    long cache_hits() const { return cache_hits_; }

private:
    std::string call_with_retries(const std::string& what,
                                  const std::function<std::string()>& attempt);

    GatewayConfig cfg_;
    std::unique_ptr<Backend> backend_;
    ResponseCache cache_;
    long backend_calls_ = 0;
    long cache_hits_ = 0;
};

/// Loads a template file and substitutes {{NAME}} placeholders.
class PromptTemplate {
public:
    static PromptTemplate from_file(const std::string& path);
    explicit PromptTemplate(std::string text) : text_(std::move(text)) {}

    std::string render(const std::map<std::string, std::string>& values) const;
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

} // namespace svacov
