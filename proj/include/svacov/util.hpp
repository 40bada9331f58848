//------------------------------------------------------------------------------
// util.hpp
// Small shared helpers: hashing, deterministic RNG streams, string utilities
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace svacov {

// --- hashing ----------------------------------------------------------------

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = kFnvOffset) {
    std::uint64_t h = seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= kFnvPrime;
    }
    return h;
}

std::string hex64(std::uint64_t v);

/// splitmix64 stream; advances `state` on every call.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Maps a 64-bit word to a double in [-1, 1) using the top 53 bits.
inline double to_unit_interval(std::uint64_t x) {
    return static_cast<double>(x >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

// --- strings ----------------------------------------------------------------

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

/// Collapses every run of whitespace to a single space and trims the ends.
std::string collapse_ws(std::string_view s);

/// Maximal runs of [A-Za-z0-9_$.] become tokens; everything else separates.
std::vector<std::string> word_tokens(std::string_view s);

/// Lowercased deduplicated token set, as used by the stub embedding.
std::set<std::string> token_set(std::string_view s);

std::vector<std::string> split_lines(std::string_view s);

bool starts_with(std::string_view s, std::string_view prefix);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// --- files ------------------------------------------------------------------

/// Reads a whole file; throws IoError if the file cannot be opened.
std::string read_file(const std::string& path);

/// Writes a whole file; throws IoError on failure.
void write_file(const std::string& path, std::string_view content);

bool file_exists(const std::string& path);

} // namespace svacov
