//------------------------------------------------------------------------------
// clustering.cpp
//
// SPDX-License-Identifier: Apache-2.0
//------------------------------------------------------------------------------
#include "svacov/clustering.hpp"

#include "svacov/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace svacov {

namespace {

// union-find with path compression
struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), 0);
    }
    int find(int x) {
        while (parent[static_cast<std::size_t>(x)] != x) {
            parent[static_cast<std::size_t>(x)] =
                parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
            x = parent[static_cast<std::size_t>(x)];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b)
            parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
    }
};

/// Labels components 0..L-1 in order of each component's smallest member index.
std::vector<int> component_labels(UnionFind& uf, std::size_t n) {
    std::vector<int> labels(n, -1);
    std::map<int, int> root_to_label;
    int next = 0;
    for (std::size_t i = 0; i < n; ++i) {
        int root = uf.find(static_cast<int>(i));
        auto [it, inserted] = root_to_label.emplace(root, next);
        if (inserted)
            ++next;
        labels[i] = it->second;
    }
    return labels;
}

/// Cosine that tolerates zero rows: two zero rows are identical (1), a zero
/// row against a nonzero one never links on its own (0).
double safe_cosine(const std::vector<double>& u, const std::vector<double>& v) {
    double dot = 0.0, nu = 0.0, nv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        dot += u[i] * v[i];
        nu += u[i] * u[i];
        nv += v[i] * v[i];
    }
    if (nu < 1e-24 && nv < 1e-24)
        return 1.0;
    if (nu < 1e-24 || nv < 1e-24)
        return 0.0;
    return dot / (std::sqrt(nu) * std::sqrt(nv));
}

} // namespace

PcaModel fit_pca(const Matrix& rows, double variance_target, int max_k) {
    const std::size_t n = rows.size();
    if (n < 2)
        throw ArgumentError("fit_pca requires at least 2 rows");
    const std::size_t d = rows[0].size();
    if (d < 1)
        throw ArgumentError("fit_pca requires at least 1 column");
    for (const auto& r : rows)
        if (r.size() != d)
            throw DimensionMismatch("fit_pca: ragged input rows");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw ArgumentError("variance_target must lie in (0,1]");
    if (max_k < 1)
        throw ArgumentError("max_k must be >= 1");

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];

    Eigen::RowVectorXd mean = x.colwise().mean();
    Eigen::MatrixXd centered = x.rowwise() - mean;
    Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);

    PcaModel model;
    model.mean.assign(mean.data(), mean.data() + d);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
        throw Error("eigen decomposition failed");

    // descending order; clamp small negative eigenvalues from rounding
    std::vector<double> evals(d);
    for (std::size_t j = 0; j < d; ++j)
        evals[j] = std::max(0.0, solver.eigenvalues()(static_cast<Eigen::Index>(d - 1 - j)));
    double total = std::accumulate(evals.begin(), evals.end(), 0.0);

    if (total <= 1e-12) {
        // all rows identical: degenerate model, unit e1 component
        model.k = 1;
        model.components.assign(1, std::vector<double>(d, 0.0));
        model.components[0][0] = 1.0;
        model.explained_variance = {0.0};
        return model;
    }

    int rank = 0;
    for (double ev : evals)
        if (ev > evals[0] * 1e-10)
            ++rank;
    rank = std::max(rank, 1);

    int k = 1;
    double cum = evals[0];
    while (cum / total < variance_target && k < static_cast<int>(d)) {
        cum += evals[static_cast<std::size_t>(k)];
        ++k;
    }
    k = std::min({k, max_k, rank});

    model.k = k;
    model.components.assign(static_cast<std::size_t>(k), std::vector<double>(d, 0.0));
    model.explained_variance.assign(evals.begin(), evals.begin() + k);
    for (int c = 0; c < k; ++c) {
        Eigen::VectorXd v = solver.eigenvectors().col(static_cast<Eigen::Index>(d - 1) -
                                                      static_cast<Eigen::Index>(c));
        // deterministic sign: largest-|entry| coordinate made positive,
        // earliest index on ties
        Eigen::Index best = 0;
        double best_abs = -1.0;
        for (Eigen::Index j = 0; j < v.size(); ++j) {
            if (std::abs(v(j)) > best_abs) {
                best_abs = std::abs(v(j));
                best = j;
            }
        }
        if (v(best) < 0.0)
            v = -v;
        for (std::size_t j = 0; j < d; ++j)
            model.components[static_cast<std::size_t>(c)][j] =
                v(static_cast<Eigen::Index>(j));
    }
    return model;
}

std::vector<double> project(const PcaModel& model, const std::vector<double>& row) {
    if (row.size() != model.mean.size())
        throw DimensionMismatch("project: row dimension " + std::to_string(row.size()) +
                                ", model dimension " + std::to_string(model.mean.size()));
    std::vector<double> out(static_cast<std::size_t>(model.k), 0.0);
    for (int c = 0; c < model.k; ++c) {
        double acc = 0.0;
        const auto& comp = model.components[static_cast<std::size_t>(c)];
        for (std::size_t j = 0; j < row.size(); ++j)
            acc += comp[j] * (row[j] - model.mean[j]);
        out[static_cast<std::size_t>(c)] = acc;
    }
    return out;
}

std::vector<int> semantic_cluster(const std::vector<SemanticRecord>& records,
                                  const StructuralDistanceMatrix& dist,
                                  const ClusteringConfig& cfg) {
    const std::size_t n = records.size();
    if (n == 0)
        throw ArgumentError("semantic_cluster requires at least one record");

    // map record ids onto matrix indices
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < dist.ids.size(); ++i)
        index[dist.ids[i]] = i;
    std::vector<std::size_t> row(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = index.find(records[i].assertion_id);
        if (it == index.end())
            throw ArgumentError("distance matrix does not cover assertion '" +
                                records[i].assertion_id + "'");
        row[i] = it->second;
    }

    double delta = cfg.delta_struct ? *cfg.delta_struct : median_nonzero_distance(dist);

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (dist.at(row[i], row[j]) > delta)
                continue; // structural gate
            if (cosine_similarity(records[i].embedding, records[j].embedding) >= cfg.tau_sem)
                uf.unite(static_cast<int>(i), static_cast<int>(j));
        }
    }
    return component_labels(uf, n);
}

Matrix fuse(const std::vector<int>& labels, const Matrix& reduced, double alpha) {
    const std::size_t n = labels.size();
    if (!reduced.empty() && reduced.size() != n)
        throw DimensionMismatch("fuse: " + std::to_string(n) + " labels vs " +
                                std::to_string(reduced.size()) + " reduced rows");
    std::map<int, std::size_t> column_of;
    for (int l : labels)
        column_of.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [label, col] : column_of)
        col = next++;
    const std::size_t n_labels = column_of.size();

    Matrix out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = reduced.empty() ? 0 : reduced[i].size();
        out[i].assign(n_labels + k, 0.0);
        out[i][column_of[labels[i]]] = alpha;
        for (std::size_t j = 0; j < k; ++j)
            out[i][n_labels + j] = reduced[i][j];
    }
    return out;
}

std::vector<AssertionGroup> final_grouping(const Matrix& fused,
                                           const std::vector<std::string>& ids,
                                           const std::vector<int>& semantic_labels,
                                           const ClusteringConfig& cfg) {
    const std::size_t n = ids.size();
    if (fused.size() != n || semantic_labels.size() != n)
        throw DimensionMismatch("final_grouping: input sizes disagree");

    UnionFind uf(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (safe_cosine(fused[i], fused[j]) >= cfg.tau_fuse)
                uf.unite(static_cast<int>(i), static_cast<int>(j));

    std::map<int, std::vector<std::size_t>> members; // root -> indices
    for (std::size_t i = 0; i < n; ++i)
        members[uf.find(static_cast<int>(i))].push_back(i);

    std::vector<AssertionGroup> groups;
    for (const auto& [root, idxs] : members) {
        AssertionGroup g;
        for (std::size_t i : idxs)
            g.member_ids.push_back(ids[i]);
        std::sort(g.member_ids.begin(), g.member_ids.end());

        // semantic label of the lexicographically smallest member
        std::size_t smallest = idxs[0];
        for (std::size_t i : idxs)
            if (ids[i] < ids[smallest])
                smallest = i;
        g.semantic_label = semantic_labels[smallest];

        g.fused_centroid.assign(fused[idxs[0]].size(), 0.0);
        for (std::size_t i : idxs)
            for (std::size_t j = 0; j < g.fused_centroid.size(); ++j)
                g.fused_centroid[j] += fused[i][j];
        for (double& x : g.fused_centroid)
            x /= static_cast<double>(idxs.size());
        groups.push_back(std::move(g));
    }

    std::sort(groups.begin(), groups.end(), [](const AssertionGroup& a, const AssertionGroup& b) {
        return a.member_ids.front() < b.member_ids.front();
    });
    for (std::size_t i = 0; i < groups.size(); ++i)
        groups[i].group_id = static_cast<int>(i);
    return groups;
}

ClusteringResult cluster_assertions(const std::vector<SemanticRecord>& records,
                                    const std::vector<StructuralVector>& vectors,
                                    const StructuralDistanceMatrix& dist,
                                    const ClusteringConfig& cfg) {
    const std::size_t n = records.size();
    if (n == 0)
        throw ArgumentError("cluster_assertions requires a non-empty batch");
    if (vectors.size() != n)
        throw DimensionMismatch("cluster_assertions: record/vector count mismatch");

    ClusteringResult result;
    result.resolved_delta_struct =
        cfg.delta_struct ? *cfg.delta_struct : median_nonzero_distance(dist);

    std::vector<std::string> ids;
    ids.reserve(n);
    for (const auto& r : records)
        ids.push_back(r.assertion_id);

    if (n == 1) {
        // single-assertion batch: one group, PCA skipped
        result.semantic_labels = {0};
        result.fused = fuse(result.semantic_labels, {}, cfg.alpha);
        result.groups = final_grouping(result.fused, ids, result.semantic_labels, cfg);
        return result;
    }

    ClusteringConfig effective = cfg;
    effective.delta_struct = result.resolved_delta_struct;
    result.semantic_labels = semantic_cluster(records, dist, effective);

    // structural rows: padded path vector with the avg LCA distance appended
    Matrix rows(n);
    for (std::size_t i = 0; i < n; ++i) {
        rows[i].reserve(vectors[i].path_vector.size() + 1);
        for (int code : vectors[i].path_vector)
            rows[i].push_back(static_cast<double>(code));
        rows[i].push_back(vectors[i].avg_lca_distance);
    }

    result.pca = fit_pca(rows, cfg.pca_variance_target, cfg.pca_max_k);
    Matrix reduced(n);
    for (std::size_t i = 0; i < n; ++i)
        reduced[i] = project(result.pca, rows[i]);

    result.fused = fuse(result.semantic_labels, reduced, cfg.alpha);
    result.groups = final_grouping(result.fused, ids, result.semantic_labels, cfg);
    return result;
}

} // namespace svacov
