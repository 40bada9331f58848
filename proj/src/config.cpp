//------------------------------------------------------------------------------
// config.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/config.hpp"

#include "svacov/errors.hpp"
#include "svacov/util.hpp"

#include <charconv>
#include <cmath>

namespace svacov {

namespace {

struct RawValue {
    std::string text; // unquoted scalar or string contents
    bool quoted = false;
};

double as_double(const RawValue& v, const std::string& key) {
    try {
        std::size_t used = 0;
        double d = std::stod(v.text, &used);
        if (used != v.text.size())
            throw std::invalid_argument("trailing chars");
        return d;
    } catch (const std::exception&) {
        throw ValidationError("config key '" + key + "': expected number, got '" + v.text + "'");
    }
}

long as_long(const RawValue& v, const std::string& key) {
    long out = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc{} || p != v.text.data() + v.text.size())
        throw ValidationError("config key '" + key + "': expected integer, got '" + v.text + "'");
    return out;
}

std::uint64_t as_u64(const RawValue& v, const std::string& key) {
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v.text.data(), v.text.data() + v.text.size(), out);
    if (ec != std::errc{} || p != v.text.data() + v.text.size())
        throw ValidationError("config key '" + key + "': expected unsigned integer");
    return out;
}

} // namespace

Config parse_config(const std::string& text) {
    Config cfg;
    std::string section;
    std::size_t lineno = 0;
    for (const auto& raw_line : split_lines(text)) {
        ++lineno;
        std::string line = trim(raw_line);
        if (line.empty() || line[0] == '#')
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string rhs = trim(line.substr(eq + 1));
        // strip trailing comment on unquoted values
        RawValue val;
        if (!rhs.empty() && rhs.front() == '"') {
            std::size_t close = rhs.find('"', 1);
            if (close == std::string::npos)
                throw ValidationError("config line " + std::to_string(lineno) + ": unterminated string");
            val.text = rhs.substr(1, close - 1);
            val.quoted = true;
        } else {
            std::size_t hash = rhs.find('#');
            if (hash != std::string::npos)
                rhs = trim(rhs.substr(0, hash));
            val.text = rhs;
        }
        if (val.text.empty() && !val.quoted)
            throw ValidationError("config line " + std::to_string(lineno) + ": empty value");

        std::string full = section.empty() ? key : section + "." + key;
        if (full == "prompts_dir") {
            cfg.prompts_dir = val.text;
        } else if (full == "clustering.tau_sem") {
            cfg.clustering.tau_sem = as_double(val, full);
        } else if (full == "clustering.delta_struct") {
            cfg.clustering.delta_struct = as_double(val, full);
        } else if (full == "clustering.pca_variance_target") {
            cfg.clustering.pca_variance_target = as_double(val, full);
        } else if (full == "clustering.pca_max_k") {
            cfg.clustering.pca_max_k = static_cast<int>(as_long(val, full));
        } else if (full == "clustering.alpha") {
            cfg.clustering.alpha = as_double(val, full);
        } else if (full == "clustering.tau_fuse") {
            cfg.clustering.tau_fuse = as_double(val, full);
        } else if (full == "clustering.seed") {
            cfg.clustering.seed = as_u64(val, full);
        } else if (full == "clustering.struct_path_weight") {
            cfg.clustering.struct_path_weight = as_double(val, full);
        } else if (full == "clustering.struct_lca_weight") {
            cfg.clustering.struct_lca_weight = as_double(val, full);
        } else if (full == "mapping.w_sig") {
            cfg.mapping.w_sig = as_double(val, full);
        } else if (full == "mapping.w_sem") {
            cfg.mapping.w_sem = as_double(val, full);
        } else if (full == "mapping.tau_map") {
            cfg.mapping.tau_map = as_double(val, full);
        } else if (full == "loop.theta") {
            cfg.loop.theta = as_double(val, full);
        } else if (full == "loop.max_rounds") {
            cfg.loop.max_rounds = static_cast<int>(as_long(val, full));
        } else if (full == "loop.generator_timeout_ms") {
            cfg.loop.generator_timeout_ms = as_long(val, full);
        } else if (full == "gateway.backend") {
            if (val.text == "stub")
                cfg.gateway.backend = BackendKind::stub;
            else if (val.text == "http")
                cfg.gateway.backend = BackendKind::http;
            else
                throw ValidationError("config key 'gateway.backend': expected stub or http");
        } else if (full == "gateway.endpoint") {
            cfg.gateway.endpoint = val.text;
        } else if (full == "gateway.api_key_env") {
            cfg.gateway.api_key_env = val.text;
        } else if (full == "gateway.chat_model") {
            cfg.gateway.chat_model = val.text;
        } else if (full == "gateway.embed_model") {
            cfg.gateway.embed_model = val.text;
        } else if (full == "gateway.d_sem") {
            cfg.gateway.d_sem = static_cast<int>(as_long(val, full));
        } else if (full == "gateway.max_retries") {
            cfg.gateway.max_retries = static_cast<int>(as_long(val, full));
        } else if (full == "gateway.backoff_initial_ms") {
            cfg.gateway.backoff_initial_ms = as_long(val, full);
        } else if (full == "gateway.backoff_multiplier") {
            cfg.gateway.backoff_multiplier = as_double(val, full);
        } else if (full == "gateway.timeout_ms") {
            cfg.gateway.timeout_ms = as_long(val, full);
        } else if (full == "gateway.max_in_flight") {
            cfg.gateway.max_in_flight = static_cast<int>(as_long(val, full));
        } else if (full == "gateway.cache_path") {
            cfg.gateway.cache_path = val.text;
        } else {
            throw ValidationError("unknown config key '" + full + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

Config load_config(const std::string& path) {
    return parse_config(read_file(path));
}

void validate_config(const Config& cfg) {
    auto in_open_01 = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_open_01(cfg.clustering.tau_sem))
        throw ValidationError("clustering.tau_sem must lie in (0,1)");
    if (cfg.clustering.delta_struct && *cfg.clustering.delta_struct < 0.0)
        throw ValidationError("clustering.delta_struct must be non-negative");
    if (!(cfg.clustering.pca_variance_target > 0.0 && cfg.clustering.pca_variance_target <= 1.0))
        throw ValidationError("clustering.pca_variance_target must lie in (0,1]");
    if (cfg.clustering.pca_max_k < 1)
        throw ValidationError("clustering.pca_max_k must be >= 1");
    if (cfg.clustering.alpha < 0.0)
        throw ValidationError("clustering.alpha must be non-negative");
    if (cfg.clustering.struct_path_weight < 0.0 || cfg.clustering.struct_lca_weight < 0.0)
        throw ValidationError("structural distance weights must be non-negative");
    if (cfg.mapping.w_sig < 0.0 || cfg.mapping.w_sem < 0.0)
        throw ValidationError("mapping weights must be non-negative");
    if (cfg.mapping.w_sig + cfg.mapping.w_sem <= 0.0)
        throw ValidationError("mapping.w_sig + mapping.w_sem must be positive");
    if (cfg.loop.theta < 0.0 || cfg.loop.theta > 1.0)
        throw ValidationError("loop.theta must lie in [0,1]");
    if (cfg.loop.max_rounds < 0)
        throw ValidationError("loop.max_rounds must be >= 0");
    if (cfg.gateway.max_retries < 0)
        throw ValidationError("gateway.max_retries must be >= 0");
    if (cfg.gateway.d_sem < 8)
        throw ValidationError("gateway.d_sem must be >= 8");
    if (cfg.gateway.max_in_flight < 1)
        throw ValidationError("gateway.max_in_flight must be >= 1");
}

} // namespace svacov
