#include "spheremix/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spheremix/linalg.hpp"
#include "spheremix/rng.hpp"

namespace spheremix {

ImputedUniverse impute_missing(const FeatureUniverse& u, int r, int reference_source) {
    u.validate(false);
    if (reference_source < 0 || reference_source >= static_cast<int>(u.sources.size()))
        throw std::invalid_argument("impute: reference source out of range");
    const SourceSet& ref = u.sources[static_cast<size_t>(reference_source)];
    if (ref.size() != u.n)
        throw std::invalid_argument("impute: reference source must cover every feature");
    if (r < 1 || r > std::min<int>(u.n, ref.dim()))
        throw std::invalid_argument("impute: rank out of range");

    TruncatedSvd svd = truncated_svd(ref.embeddings, r);
    Eigen::MatrixXd base = svd.U * svd.S.asDiagonal();  // n x r reference scores

    ImputedUniverse out;
    out.universe.n = u.n;
    for (const SourceSet& src : u.sources) {
        if (src.dim() < r) throw std::invalid_argument("impute: source dim below rank");
        Eigen::MatrixXd overlap_base(src.size(), r);
        for (int t = 0; t < src.size(); ++t)
            overlap_base.row(t) = base.row(src.feature_ids[static_cast<size_t>(t)]);
        ProcrustesMap map = orthogonal_procrustes(overlap_base, src.embeddings);

        SourceSet filled;
        filled.source_id = src.source_id;
        filled.embeddings.resize(u.n, src.dim());
        std::vector<char> seen(static_cast<size_t>(u.n), 0);
        for (int t = 0; t < src.size(); ++t) {
            filled.embeddings.row(src.feature_ids[static_cast<size_t>(t)]) =
                src.embeddings.row(t);
            seen[static_cast<size_t>(src.feature_ids[static_cast<size_t>(t)])] = 1;
        }
        std::vector<int> imputed;
        for (int i = 0; i < u.n; ++i) {
            filled.feature_ids.push_back(i);
            if (!seen[static_cast<size_t>(i)]) {
                filled.embeddings.row(i) = map.scale * base.row(i) * map.Q;
                imputed.push_back(i);
            }
        }
        out.universe.sources.push_back(std::move(filled));
        out.maps.push_back(map.Q);
        out.scales.push_back(map.scale);
        out.imputed_ids.push_back(std::move(imputed));
    }
    return out;
}

Eigen::MatrixXd svd_concat_embed(const FeatureUniverse& u, int r) {
    ImputedUniverse imp = impute_missing(u, r, 0);
    int total_dim = 0;
    for (const auto& src : imp.universe.sources) total_dim += src.dim();
    Eigen::MatrixXd concat(u.n, total_dim);
    int at = 0;
    for (const auto& src : imp.universe.sources) {
        concat.middleCols(at, src.dim()) = src.embeddings;
        at += src.dim();
    }
    TruncatedSvd svd = truncated_svd(concat, r);
    return normalize_rows(svd.U * svd.S.asDiagonal());
}

namespace {

KmeansResult kmeans_single(const Eigen::MatrixXd& points, int K, std::uint64_t seed,
                           int max_iter) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    Rng rng(seed);
    Eigen::MatrixXd centers(K, d);

    // k-means++ seeding on squared Euclidean distance
    centers.row(0) = points.row(static_cast<int>(rng.uniform_int(0, n - 1)));
    Eigen::VectorXd d2 =
        (points.rowwise() - centers.row(0)).rowwise().squaredNorm();
    for (int k = 1; k < K; ++k) {
        const double total = d2.sum();
        int pick;
        if (total > 0.0) {
            double th = rng.uniform() * total, acc = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                acc += d2[i];
                if (acc >= th) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<int>(rng.uniform_int(0, n - 1));
        }
        centers.row(k) = points.row(pick);
        d2 = d2.cwiseMin((points.rowwise() - centers.row(k)).rowwise().squaredNorm());
    }

    KmeansResult res;
    res.labels = Eigen::VectorXi::Zero(n);
    for (int it = 0; it < max_iter; ++it) {
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bv = (points.row(i) - centers.row(0)).squaredNorm();
            for (int k = 1; k < K; ++k) {
                const double v = (points.row(i) - centers.row(k)).squaredNorm();
                if (v < bv) {
                    bv = v;
                    best = k;
                }
            }
            if (res.labels[i] != best) {
                res.labels[i] = best;
                changed = true;
            }
        }
        for (int k = 0; k < K; ++k) {
            Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
            int cnt = 0;
            for (int i = 0; i < n; ++i)
                if (res.labels[i] == k) {
                    sum += points.row(i);
                    ++cnt;
                }
            if (cnt == 0) {
                // empty cluster takes the point farthest from its own center
                int worst = 0;
                double wv = -1.0;
                for (int i = 0; i < n; ++i) {
                    const double v = (points.row(i) - centers.row(res.labels[i])).squaredNorm();
                    if (v > wv) {
                        wv = v;
                        worst = i;
                    }
                }
                centers.row(k) = points.row(worst);
                res.labels[worst] = k;
                changed = true;
            } else {
                centers.row(k) = sum / cnt;
            }
        }
        if (!changed && it > 0) break;
    }
    res.centers = centers;
    res.objective = 0.0;
    for (int i = 0; i < n; ++i)
        res.objective += (points.row(i) - centers.row(res.labels[i])).squaredNorm();
    return res;
}

}  // namespace

KmeansResult kmeans_euclidean(const Eigen::MatrixXd& points, int K, std::uint64_t seed,
                              int restarts, int max_iter) {
    const int n = static_cast<int>(points.rows());
    if (K < 1 || K > n) throw std::invalid_argument("kmeans: K must be in [1, n]");
    if (restarts < 1) throw std::invalid_argument("kmeans: restarts must be positive");
    KmeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int t = 0; t < restarts; ++t) {
        KmeansResult run = kmeans_single(points, K, substream(seed, t), max_iter);
        if (run.objective < best.objective) best = std::move(run);
    }
    return best;
}

Eigen::VectorXi hclust_average_cosine(const Eigen::MatrixXd& points, int K) {
    const int n = static_cast<int>(points.rows());
    if (K < 1 || K > n) throw std::invalid_argument("hclust: K must be in [1, n]");

    Eigen::MatrixXd unit = normalize_rows(points);
    Eigen::MatrixXd dist = Eigen::MatrixXd::Constant(n, n, 0.0);
    dist.noalias() = -(unit * unit.transpose());
    dist.array() += 1.0;  // cosine distance

    // cluster b merges into a < b; average linkage via Lance-Williams
    std::vector<char> active(n, 1);
    std::vector<int> size(n, 1);
    std::vector<int> owner(n);
    for (int i = 0; i < n; ++i) owner[i] = i;

    for (int merges = 0; merges < n - K; ++merges) {
        int best_a = -1, best_b = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (int a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (int b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (dist(a, b) < best_d) {
                    best_d = dist(a, b);
                    best_a = a;
                    best_b = b;
                }
            }
        }
        for (int c = 0; c < n; ++c) {
            if (!active[c] || c == best_a || c == best_b) continue;
            const double d = (size[best_a] * dist(best_a, c) + size[best_b] * dist(best_b, c)) /
                             (size[best_a] + size[best_b]);
            dist(best_a, c) = dist(c, best_a) = d;
        }
        size[best_a] += size[best_b];
        active[best_b] = 0;
        for (int i = 0; i < n; ++i)
            if (owner[i] == best_b) owner[i] = best_a;
    }

    // relabel surviving clusters 0..K-1 in order of their smallest member
    std::vector<int> relabel(n, -1);
    int next = 0;
    Eigen::VectorXi labels(n);
    for (int i = 0; i < n; ++i) {
        if (relabel[owner[i]] < 0) relabel[owner[i]] = next++;
        labels[i] = relabel[owner[i]];
    }
    return labels;
}

ClusterCenters cluster_centers(const Eigen::MatrixXd& points, const Eigen::VectorXi& labels,
                               int K) {
    if (labels.size() != points.rows())
        throw std::invalid_argument("cluster_centers: label count mismatch");
    ClusterCenters out;
    std::vector<Eigen::RowVectorXd> rows;
    for (int k = 0; k < K; ++k) {
        Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(points.cols());
        int cnt = 0, first = -1;
        for (int i = 0; i < points.rows(); ++i)
            if (labels[i] == k) {
                sum += points.row(i);
                if (first < 0) first = i;
                ++cnt;
            }
        if (cnt == 0) continue;
        if (sum.norm() <= 1e-12) {
            sum = points.row(first);
            out.degenerate_ids.push_back(k);
            if (sum.norm() <= 1e-12)
                throw std::invalid_argument("cluster_centers: zero member vector");
        }
        rows.push_back(sum / sum.norm());
        out.cluster_ids.push_back(k);
    }
    out.centers.resize(static_cast<int>(rows.size()), points.cols());
    for (size_t t = 0; t < rows.size(); ++t) out.centers.row(static_cast<int>(t)) = rows[t];
    return out;
}

}  // namespace spheremix
