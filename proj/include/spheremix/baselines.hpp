#pragma once

#include <cstdint>

#include "spheremix/types.hpp"

namespace spheremix {

struct ImputedUniverse {
    FeatureUniverse universe;            // all sources cover [0, n)
    std::vector<Eigen::MatrixXd> maps;   // per source: r x r_l Procrustes map (QQ' = I)
    std::vector<double> scales;
    std::vector<std::vector<int>> imputed_ids;  // features filled per source
};

// Rank-r SVD base from the reference source (must cover every feature), mapped
// into each source space by scaled orthogonal Procrustes fit on the overlap.
ImputedUniverse impute_missing(const FeatureUniverse& u, int r, int reference_source = 0);

// Imputation, column-concatenation, rank-r SVD, row normalization. Sign of
// each singular vector fixed so its largest-magnitude entry is positive.
Eigen::MatrixXd svd_concat_embed(const FeatureUniverse& u, int r);

struct KmeansResult {
    Eigen::MatrixXd centers;
    Eigen::VectorXi labels;
    double objective = 0.0;  // sum of squared distances
};

// Lloyd + k-means++ on squared Euclidean distance; best of `restarts` seeded
// runs; deterministic given seed.
KmeansResult kmeans_euclidean(const Eigen::MatrixXd& points, int K, std::uint64_t seed,
                              int restarts = 10, int max_iter = 100);

// Average-linkage agglomerative clustering on cosine distance, cut at K.
// Ties broken toward the lexicographically smallest cluster-index pair.
Eigen::VectorXi hclust_average_cosine(const Eigen::MatrixXd& points, int K);

struct ClusterCenters {
    Eigen::MatrixXd centers;          // one row per retained cluster
    std::vector<int> cluster_ids;     // original labels of retained rows
    std::vector<int> degenerate_ids;  // near-zero mean, fell back to first member
};

// Normalized within-cluster means; empty clusters dropped, near-cancelling
// clusters fall back to their first member and are flagged.
ClusterCenters cluster_centers(const Eigen::MatrixXd& points, const Eigen::VectorXi& labels,
                               int K);

}  // namespace spheremix
