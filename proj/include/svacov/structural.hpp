//------------------------------------------------------------------------------
// structural.hpp
// AST-based structural representation of assertions: average pairwise LCA
// distance between signal leaves and padded root-to-leaf path vectors
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/sva_ast.hpp"

#include <string>
#include <vector>

namespace svacov {

struct StructuralVector {
    std::string assertion_id;
    std::vector<int> path_vector;   // padded with 0; real codes are >= 1
    double avg_lca_distance = 0.0;
    int raw_length = 0;             // pre-padding length
};

/// Symmetric pairwise distances with zero diagonal. Values are stored
/// row-major over the full n*n square.
struct StructuralDistanceMatrix {
    std::vector<std::string> ids;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * ids.size() + j]; }
    std::size_t size() const { return ids.size(); }
};

struct StructuralWeights {
    double path_weight = 1.0;
    double lca_weight = 1.0;
};

/// Edge-count path length between two signal_ref leaves through their lowest
/// common ancestor: depth(a) + depth(b) - 2*depth(lca).
int lca_distance(const Ast& ast, int leaf_a, int leaf_b);

/// Mean lca_distance over all unordered pairs of distinct signal_ref leaf
/// occurrences; 0 when the tree has fewer than two such leaves.
double avg_pairwise_lca(const Ast& ast);

/// Root-to-leaf node-kind codes, root first, the leaf's code (10) last.
std::vector<int> signal_path(const Ast& ast, int leaf);

/// Per-signal paths for each name's leftmost leaf occurrence, ordered by
/// ascending signal name and concatenated, plus the avg LCA distance over all
/// leaf occurrences. Throws SyntaxRequired when pa.syntax_ok is false.
std::pair<std::vector<int>, double> build_structural_vector(const ParsedAssertion& pa);

struct UnpaddedVector {
    std::string assertion_id;
    std::vector<int> path;
    double avg_lca_distance = 0.0;
};

/// Right-pads every vector with 0 up to the batch maximum length.
/// Throws EmptyBatch on an empty input.
std::vector<StructuralVector> pad_batch(const std::vector<UnpaddedVector>& batch);

/// Normalized Euclidean distance between the path vectors plus the weighted
/// absolute difference of the avg LCA distances. Throws LengthMismatch when
/// the pad lengths differ.
double structural_distance(const StructuralVector& a, const StructuralVector& b,
                           const StructuralWeights& w = {});

StructuralDistanceMatrix distance_matrix(const std::vector<StructuralVector>& vectors,
                                         const StructuralWeights& w = {});

/// Median of the strictly positive entries (the default structural gate);
/// 0 when every off-diagonal entry is zero.
double median_nonzero_distance(const StructuralDistanceMatrix& m);

} // namespace svacov
