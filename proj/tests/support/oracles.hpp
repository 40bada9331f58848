//------------------------------------------------------------------------------
// oracles.hpp
// Independent reference implementations the tests check production code
// against: ancestor-set LCA, a cyclic Jacobi eigensolver, BFS connected
// components, a from-scratch stub embedding, and small process/file helpers.
// Nothing here calls the algorithms under test.
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/sva_ast.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

namespace oracle {

// --- LCA by ancestor sets -----------------------------------------------------

/// Edge distance through the lowest common ancestor, computed by intersecting
/// full ancestor chains instead of the lockstep walk used in production.
inline int lca_distance(const svacov::Ast& ast, int a, int b) {
    std::map<int, int> steps_a;
    int steps = 0;
    for (int cur = a; cur != -1; cur = ast.parent(cur))
        steps_a[cur] = steps++;
    steps = 0;
    for (int cur = b; cur != -1; cur = ast.parent(cur)) {
        auto it = steps_a.find(cur);
        if (it != steps_a.end())
            return it->second + steps;
        ++steps;
    }
    return -1; // different trees; unreachable for a finalized Ast
}

inline double avg_pairwise_lca(const svacov::Ast& ast) {
    std::vector<int> leaves;
    for (const auto& nd : ast.nodes())
        if (nd.kind == svacov::NodeKind::signal_ref)
            leaves.push_back(nd.id);
    if (leaves.size() < 2)
        return 0.0;
    double total = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i)
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            total += lca_distance(ast, leaves[i], leaves[j]);
            ++pairs;
        }
    return total / static_cast<double>(pairs);
}

// --- random ASTs ---------------------------------------------------------------

/// Grows a random expression tree (bounded size) and finalizes it under an
/// assertion/property root. Leaves are signal_ref nodes.
inline svacov::Ast random_ast(std::mt19937& rng, int max_nodes = 50) {
    using svacov::NodeKind;
    svacov::Ast ast;
    int leaf_counter = 0;

    // budget counts internal nodes we may still spend
    std::function<int(int&)> grow = [&](int& budget) -> int {
        std::uniform_int_distribution<int> kind_pick(0, 6);
        if (budget <= 0 || kind_pick(rng) == 0) {
            ++leaf_counter;
            return ast.add_node(NodeKind::signal_ref, "s" + std::to_string(leaf_counter), {},
                                {0, 0});
        }
        --budget;
        switch (kind_pick(rng)) {
        case 1: {
            int l = grow(budget), r = grow(budget);
            return ast.add_node(NodeKind::boolean_op, "&&", {l, r}, {0, 0});
        }
        case 2: {
            int l = grow(budget), r = grow(budget);
            return ast.add_node(NodeKind::implication, "|->", {l, r}, {0, 0});
        }
        case 3: {
            int l = grow(budget), r = grow(budget);
            return ast.add_node(NodeKind::delay, "##1", {l, r}, {0, 0});
        }
        case 4: {
            int c = grow(budget);
            return ast.add_node(NodeKind::unary_op, "!", {c}, {0, 0});
        }
        case 5: {
            int c = grow(budget);
            return ast.add_node(NodeKind::system_func, "$past", {c}, {0, 0});
        }
        default: {
            int c = grow(budget);
            return ast.add_node(NodeKind::repetition, "[*2]", {c}, {0, 0});
        }
        }
    };

    int budget = std::uniform_int_distribution<int>(1, (max_nodes - 4) / 2)(rng);
    int left = grow(budget);
    int right = grow(budget);
    int top = ast.add_node(NodeKind::boolean_op, "&&", {left, right}, {0, 0});
    int prop = ast.add_node(NodeKind::property, "", {top}, {0, 0});
    int root = ast.add_node(NodeKind::assertion, "", {prop}, {0, 0});
    ast.finalize(root);
    return ast;
}

// --- Jacobi eigensolver ---------------------------------------------------------

struct EigenResult {
    std::vector<double> values;               // descending
    std::vector<std::vector<double>> vectors; // vectors[i] pairs with values[i]
};

/// Cyclic Jacobi rotations on a symmetric matrix until off-diagonal mass is
/// negligible. Quadratic-time reference, fine at test scale.
inline EigenResult jacobi_eigen(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        v[i][i] = 1.0;

    for (int sweep = 0; sweep < 200; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a[p][q] * a[p][q];
        if (off < 1e-24)
            break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300)
                    continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return a[x][x] > a[y][y]; });

    EigenResult res;
    for (std::size_t i : order) {
        res.values.push_back(a[i][i]);
        std::vector<double> col(n);
        for (std::size_t k = 0; k < n; ++k)
            col[k] = v[k][i];
        res.vectors.push_back(std::move(col));
    }
    return res;
}

/// Sample covariance with divisor n-1, the convention under test.
inline std::vector<std::vector<double>>
covariance(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t d = rows.empty() ? 0 : rows[0].size();
    std::vector<double> mean(d, 0.0);
    for (const auto& r : rows)
        for (std::size_t j = 0; j < d; ++j)
            mean[j] += r[j];
    for (auto& m : mean)
        m /= static_cast<double>(n);
    std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
    for (const auto& r : rows)
        for (std::size_t i = 0; i < d; ++i)
            for (std::size_t j = 0; j < d; ++j)
                cov[i][j] += (r[i] - mean[i]) * (r[j] - mean[j]);
    for (auto& row : cov)
        for (auto& x : row)
            x /= static_cast<double>(n - 1);
    return cov;
}

// --- connected components --------------------------------------------------------

/// BFS components over an adjacency predicate; labels assigned by each
/// component's smallest member index, matching the clustering contract.
inline std::vector<int> components(std::size_t n,
                                   const std::function<bool(std::size_t, std::size_t)>& linked) {
    std::vector<int> label(n, -1);
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (label[i] != -1)
            continue;
        int lab = next++;
        std::deque<std::size_t> queue{i};
        label[i] = lab;
        while (!queue.empty()) {
            std::size_t cur = queue.front();
            queue.pop_front();
            for (std::size_t j = 0; j < n; ++j) {
                if (label[j] == -1 && (linked(cur, j) || linked(j, cur))) {
                    label[j] = lab;
                    queue.push_back(j);
                }
            }
        }
    }
    return label;
}

/// Partition as a set of sets, for order-independent comparison.
inline std::set<std::set<std::size_t>> as_partition(const std::vector<int>& labels) {
    std::map<int, std::set<std::size_t>> by_label;
    for (std::size_t i = 0; i < labels.size(); ++i)
        by_label[labels[i]].insert(i);
    std::set<std::set<std::size_t>> out;
    for (auto& [lab, members] : by_label)
        out.insert(std::move(members));
    return out;
}

// --- stub embedding, re-derived ----------------------------------------------------

/// The documented stub embedding, retyped from its definition: lowercase
/// [A-Za-z0-9_$.] tokens (outer dots stripped), deduplicated; per token an
/// FNV-1a-64 seed drives a splitmix64 stream whose words map to [-1,1).
inline std::vector<double> stub_embed(const std::string& text, int d) {
    std::set<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        while (!cur.empty() && cur.front() == '.')
            cur.erase(cur.begin());
        while (!cur.empty() && cur.back() == '.')
            cur.pop_back();
        if (!cur.empty())
            tokens.insert(cur);
        cur.clear();
    };
    for (char raw : text) {
        char c = static_cast<char>(std::tolower(static_cast<unsigned char>(raw)));
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$' || c == '.')
            cur.push_back(c);
        else
            flush();
    }
    flush();

    std::vector<double> v(static_cast<std::size_t>(d), 0.0);
    for (const auto& tok : tokens) {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : tok) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        std::uint64_t state = h;
        for (auto& x : v) {
            std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
            z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
            z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
            z ^= z >> 31;
            x += static_cast<double>(z >> 11) * (2.0 / 9007199254740992.0) - 1.0;
        }
    }
    return v;
}

// --- scoring, re-derived -------------------------------------------------------------

inline double cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu == 0.0 || nv == 0.0)
        return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

inline double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty())
        return 0.0;
    std::size_t inter = 0;
    for (const auto& x : a)
        inter += b.count(x);
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

inline double combined_score(double jac, double sim, double w_sig, double w_sem) {
    return (w_sig * jac + w_sem * ((sim + 1.0) / 2.0)) / (w_sig + w_sem);
}

// --- process / file helpers ----------------------------------------------------------

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Runs a shell command with stdout/stderr captured to temp files.
inline CmdResult run_cmd(const std::string& cmd) {
    static int counter = 0;
    std::string base = (std::filesystem::temp_directory_path() /
                        ("svacov_test_" + std::to_string(::getpid()) + "_" +
                         std::to_string(counter++)))
                           .string();
    std::string out_path = base + ".out", err_path = base + ".err";
    int rc = std::system((cmd + " >" + out_path + " 2>" + err_path).c_str());
    CmdResult res;
    res.exit_code = (rc == -1) ? -1 : (WIFEXITED(rc) ? WEXITSTATUS(rc) : 128 + WTERMSIG(rc));
    res.out = slurp(out_path);
    res.err = slurp(err_path);
    std::filesystem::remove(out_path);
    std::filesystem::remove(err_path);
    return res;
}

/// Fresh scratch directory under the system temp root.
inline std::string make_temp_dir(const std::string& hint) {
    static int counter = 0;
    auto dir = std::filesystem::temp_directory_path() /
               ("svacov_" + hint + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

inline std::string source_dir() { return SVACOV_SOURCE_DIR; }
inline std::string fixture(const std::string& rel) { return source_dir() + "/fixtures/" + rel; }
inline std::string prompts_dir() { return source_dir() + "/prompts"; }

} // namespace oracle
