//------------------------------------------------------------------------------
// clustering.hpp
// Groups assertions by fusing semantic and structural representations:
// a structural-distance gate on linkable pairs, semantic single-linkage
// clustering, one-hot label encoding fused with PCA-reduced structural
// vectors, and a final single-linkage grouping
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#pragma once

#include "svacov/config.hpp"
#include "svacov/semantic.hpp"
#include "svacov/structural.hpp"

#include <string>
#include <vector>

namespace svacov {

using Matrix = std::vector<std::vector<double>>;

struct PcaModel {
    std::vector<double> mean;            // dimension d
    Matrix components;                   // k rows of dimension d, orthonormal,
                                         // non-increasing explained variance
    std::vector<double> explained_variance;
    int k = 0;
};

struct AssertionGroup {
    int group_id = 0;
    std::vector<std::string> member_ids; // non-empty, sorted ascending
    int semantic_label = 0;              // pre-fusion cluster
    std::vector<double> fused_centroid;
};

/// Principal components of the sample covariance (divisor n-1). k is the
/// smallest count reaching variance_target, capped at min(max_k, rank).
/// Component signs are fixed: the entry of largest magnitude is positive
/// (earliest index on ties). All-identical rows yield the degenerate model
/// {k=1, component=e1, explained_variance=[0]}.
PcaModel fit_pca(const Matrix& rows, double variance_target, int max_k);

/// components * (row - mean).
std::vector<double> project(const PcaModel& model, const std::vector<double>& row);

/// Single-linkage clustering where a pair is linkable only if the embedding
/// cosine is >= tau_sem AND the structural distance is <= delta_struct.
/// Labels are 0-based, assigned by each cluster's smallest member index.
/// delta_struct is taken from cfg when set, otherwise the matrix median rule.
std::vector<int> semantic_cluster(const std::vector<SemanticRecord>& records,
                                  const StructuralDistanceMatrix& dist,
                                  const ClusteringConfig& cfg);

/// Row i = concat(alpha * onehot(label_i), reduced_i). Distinct labels map to
/// one-hot columns in ascending label order.
Matrix fuse(const std::vector<int>& labels, const Matrix& reduced, double alpha);

/// Single-linkage over fused rows with cosine link threshold tau_fuse.
/// Groups partition the ids; group ids are dense, ordered by smallest member.
std::vector<AssertionGroup> final_grouping(const Matrix& fused,
                                           const std::vector<std::string>& ids,
                                           const std::vector<int>& semantic_labels,
                                           const ClusteringConfig& cfg);

struct ClusteringResult {
    std::vector<AssertionGroup> groups;
    std::vector<int> semantic_labels;
    double resolved_delta_struct = 0.0;
    PcaModel pca;      // k == 0 when PCA was skipped (single-assertion batch)
    Matrix fused;
};

/// Full pipeline over one batch: gate + semantic clustering, PCA on
/// [path_vector | avg_lca] rows, fusion, final grouping. Records and vectors
/// must be aligned index-for-index with the distance matrix ids.
ClusteringResult cluster_assertions(const std::vector<SemanticRecord>& records,
                                    const std::vector<StructuralVector>& vectors,
                                    const StructuralDistanceMatrix& dist,
                                    const ClusteringConfig& cfg);

} // namespace svacov
