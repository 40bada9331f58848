//------------------------------------------------------------------------------
// config.hpp
// Pipeline configuration: one TOML-style file with [clustering], [mapping],
// [loop] and [gateway] sections plus a few global keys
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace svacov {

struct ClusteringConfig {
    double tau_sem = 0.80;                 // semantic link threshold
    std::optional<double> delta_struct;    // structural gate; empty = median of
                                           // the nonzero distance matrix
    double pca_variance_target = 0.95;
    int pca_max_k = 8;
    double alpha = 1.0;                    // weight on the one-hot block
    double tau_fuse = 0.75;                // final link threshold
    std::uint64_t seed = 0;                // reserved for stochastic variants;
                                           // must not affect shipped algorithms
    double struct_path_weight = 1.0;
    double struct_lca_weight = 1.0;
};

struct MappingConfig {
    double w_sig = 0.5;
    double w_sem = 0.5;
    double tau_map = 0.60;
};

struct LoopConfig {
    double theta = 0.85;                   // per-SubSpec coverage threshold
    int max_rounds = 5;
    long generator_timeout_ms = 600000;
};

enum class BackendKind { stub, http };

struct GatewayConfig {
    BackendKind backend = BackendKind::stub;
    std::string endpoint;                  // base URL for the http backend
    std::string api_key_env = "SVACOV_API_KEY";
    std::string chat_model = "stub-chat";
    std::string embed_model = "stub-embed";
    int d_sem = 64;                        // stub embedding dimension
    int max_retries = 3;
    long backoff_initial_ms = 500;
    double backoff_multiplier = 2.0;
    long timeout_ms = 60000;
    int max_in_flight = 4;
    std::string cache_path;                // empty = in-memory only
};

struct Config {
    std::string prompts_dir = "prompts";
    ClusteringConfig clustering;
    MappingConfig mapping;
    LoopConfig loop;
    GatewayConfig gateway;
};

/// Parses the key-value config file. Unknown keys raise ValidationError, as do
/// values outside their documented ranges.
Config parse_config(const std::string& text);

/// read_file + parse_config.
Config load_config(const std::string& path);

/// Range checks shared by parse_config and programmatic construction.
void validate_config(const Config& cfg);

} // namespace svacov
