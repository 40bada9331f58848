//------------------------------------------------------------------------------
// structural.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/structural.hpp"

#include "svacov/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace svacov {

namespace {

void require_signal_leaf(const Ast& ast, int id) {
    if (ast.node(id).kind != NodeKind::signal_ref)
        throw NotALeaf("node " + std::to_string(id) + " is not a signal_ref leaf");
}

} // namespace

int lca_distance(const Ast& ast, int leaf_a, int leaf_b) {
    require_signal_leaf(ast, leaf_a);
    require_signal_leaf(ast, leaf_b);
    if (leaf_a == leaf_b)
        return 0;
    int da = ast.depth(leaf_a);
    int db = ast.depth(leaf_b);
    int a = leaf_a, b = leaf_b;
    int dist = 0;
    while (da > db) {
        a = ast.parent(a);
        --da;
        ++dist;
    }
    while (db > da) {
        b = ast.parent(b);
        --db;
        ++dist;
    }
    while (a != b) {
        a = ast.parent(a);
        b = ast.parent(b);
        dist += 2;
    }
    return dist;
}

double avg_pairwise_lca(const Ast& ast) {
    auto leaves = ast.signal_leaves();
    if (leaves.size() < 2)
        return 0.0;
    long long total = 0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        for (std::size_t j = i + 1; j < leaves.size(); ++j) {
            total += lca_distance(ast, leaves[i], leaves[j]);
            ++pairs;
        }
    }
    return static_cast<double>(total) / static_cast<double>(pairs);
}

std::vector<int> signal_path(const Ast& ast, int leaf) {
    require_signal_leaf(ast, leaf);
    std::vector<int> rev;
    for (int cur = leaf; cur != -1; cur = ast.parent(cur))
        rev.push_back(node_kind_code(ast.node(cur).kind));
    return {rev.rbegin(), rev.rend()};
}

std::pair<std::vector<int>, double> build_structural_vector(const ParsedAssertion& pa) {
    if (!pa.syntax_ok || !pa.ast)
        throw SyntaxRequired("assertion '" + pa.assertion_id + "' has no parse tree");
    const Ast& ast = *pa.ast;

    // leftmost leaf occurrence per signal name
    std::map<std::string, int> first_leaf;
    for (int leaf : ast.signal_leaves())
        first_leaf.emplace(ast.node(leaf).text, leaf);

    std::vector<int> path;
    for (const auto& [name, leaf] : first_leaf) {
        auto p = signal_path(ast, leaf);
        path.insert(path.end(), p.begin(), p.end());
    }
    return {std::move(path), avg_pairwise_lca(ast)};
}

std::vector<StructuralVector> pad_batch(const std::vector<UnpaddedVector>& batch) {
    if (batch.empty())
        throw EmptyBatch("pad_batch requires a non-empty batch");
    std::size_t pad_len = 0;
    for (const auto& v : batch)
        pad_len = std::max(pad_len, v.path.size());
    std::vector<StructuralVector> out;
    out.reserve(batch.size());
    for (const auto& v : batch) {
        StructuralVector sv;
        sv.assertion_id = v.assertion_id;
        sv.avg_lca_distance = v.avg_lca_distance;
        sv.raw_length = static_cast<int>(v.path.size());
        sv.path_vector = v.path;
        sv.path_vector.resize(pad_len, 0);
        out.push_back(std::move(sv));
    }
    return out;
}

double structural_distance(const StructuralVector& a, const StructuralVector& b,
                           const StructuralWeights& w) {
    if (a.path_vector.size() != b.path_vector.size())
        throw LengthMismatch("structural vectors have different pad lengths (" +
                             std::to_string(a.path_vector.size()) + " vs " +
                             std::to_string(b.path_vector.size()) + ")");
    double path_term = 0.0;
    if (!a.path_vector.empty()) {
        double sq = 0.0;
        for (std::size_t i = 0; i < a.path_vector.size(); ++i) {
            double d = static_cast<double>(a.path_vector[i] - b.path_vector[i]);
            sq += d * d;
        }
        path_term = std::sqrt(sq) / std::sqrt(static_cast<double>(a.path_vector.size()));
    }
    double lca_term = std::abs(a.avg_lca_distance - b.avg_lca_distance);
    return w.path_weight * path_term + w.lca_weight * lca_term;
}

StructuralDistanceMatrix distance_matrix(const std::vector<StructuralVector>& vectors,
                                         const StructuralWeights& w) {
    StructuralDistanceMatrix m;
    const std::size_t n = vectors.size();
    m.ids.reserve(n);
    for (const auto& v : vectors)
        m.ids.push_back(v.assertion_id);
    m.values.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double d = structural_distance(vectors[i], vectors[j], w);
            m.values[i * n + j] = d;
            m.values[j * n + i] = d;
        }
    }
    return m;
}

double median_nonzero_distance(const StructuralDistanceMatrix& m) {
    std::vector<double> vals;
    const std::size_t n = m.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (m.at(i, j) > 0.0)
                vals.push_back(m.at(i, j));
    if (vals.empty())
        return 0.0;
    std::sort(vals.begin(), vals.end());
    std::size_t mid = vals.size() / 2;
    if (vals.size() % 2 == 1)
        return vals[mid];
    return 0.5 * (vals[mid - 1] + vals[mid]);
}

} // namespace svacov
