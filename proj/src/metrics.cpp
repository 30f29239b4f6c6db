#include "spheremix/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "spheremix/linalg.hpp"

namespace spheremix {

double rel_err_subspace(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
    if (est.rows() != truth.rows())
        throw std::invalid_argument("rel_err: row count mismatch");
    if (est.size() == 0) throw std::invalid_argument("rel_err: empty input");
    // ||AA' - BB'||^2 = ||A'A||^2 + ||B'B||^2 - 2||B'A||^2, so no n x n matrix
    const Eigen::MatrixXd ata = est.transpose() * est;
    const Eigen::MatrixXd btb = truth.transpose() * truth;
    const Eigen::MatrixXd bta = truth.transpose() * est;
    const double num2 =
        ata.squaredNorm() + btb.squaredNorm() - 2.0 * bta.squaredNorm();
    const double den2 = btb.squaredNorm();
    if (!(den2 > 0.0)) throw std::invalid_argument("rel_err: zero truth matrix");
    return std::sqrt(std::max(num2, 0.0) / den2);
}

double rel_acc(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
    return 1.0 / (1.0 + rel_err_subspace(est, truth));
}

ProcrustesResult procrustes_align(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
    if (est.rows() != truth.rows() || est.cols() != truth.cols())
        throw std::invalid_argument("procrustes_align: shape mismatch");
    ProcrustesResult out;
    out.rotation = orthogonal_procrustes(est, truth).Q;
    Eigen::MatrixXd aligned = est * out.rotation;
    out.row_errors.resize(est.rows());
    for (int i = 0; i < est.rows(); ++i)
        out.row_errors[i] = (aligned.row(i) - truth.row(i)).norm();
    out.mean_square_error = (aligned - truth).squaredNorm() / est.rows();
    return out;
}

// Hungarian algorithm (Jonker-style potentials) minimizing total cost
std::vector<int> assignment_min(const Eigen::MatrixXd& cost) {
    if (cost.rows() != cost.cols() || cost.rows() == 0)
        throw std::invalid_argument("assignment_min: square nonempty cost required");
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            double delta = std::numeric_limits<double>::infinity();
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0 != 0);
    }
    std::vector<int> match(n, -1);  // match[row] = column
    for (int j = 1; j <= n; ++j) match[p[j] - 1] = j - 1;
    return match;
}

PermutationResult permutation_align(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth) {
    if (est.rows() != truth.rows() || est.cols() != truth.cols())
        throw std::invalid_argument("permutation_align: shape mismatch");
    const int K = static_cast<int>(est.rows());
    // maximize sum of inner products == minimize negated cost
    Eigen::MatrixXd cost = -(truth * est.transpose());  // cost(k, m): truth k vs est m
    PermutationResult out;
    out.perm = assignment_min(cost);
    out.aligned.resize(K, est.cols());
    for (int k = 0; k < K; ++k) out.aligned.row(k) = est.row(out.perm[k]);
    out.mean_square_error = (out.aligned - truth).squaredNorm() / K;
    return out;
}

double adjusted_mutual_information(const Eigen::VectorXi& a, const Eigen::VectorXi& b) {
    if (a.size() != b.size()) throw std::invalid_argument("ami: length mismatch");
    const int n = static_cast<int>(a.size());
    if (n == 0) throw std::invalid_argument("ami: empty labelings");
    // compact the label alphabets
    auto compact = [](const Eigen::VectorXi& x) {
        std::vector<int> uniq(x.data(), x.data() + x.size());
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::vector<int> out(x.size());
        for (int i = 0; i < x.size(); ++i)
            out[i] = static_cast<int>(std::lower_bound(uniq.begin(), uniq.end(), x[i]) -
                                      uniq.begin());
        return std::pair(std::move(out), static_cast<int>(uniq.size()));
    };
    auto [la, ka] = compact(a);
    auto [lb, kb] = compact(b);

    Eigen::MatrixXd cont = Eigen::MatrixXd::Zero(ka, kb);
    for (int i = 0; i < n; ++i) cont(la[i], lb[i]) += 1.0;
    Eigen::VectorXd ra = cont.rowwise().sum(), cb = cont.colwise().sum();

    // single cluster on both sides: conventionally perfect agreement
    if (ka == 1 && kb == 1) return 1.0;

    const double dn = n;
    double h_a = 0.0, h_b = 0.0, mi = 0.0;
    for (int i = 0; i < ka; ++i)
        if (ra[i] > 0) h_a -= ra[i] / dn * std::log(ra[i] / dn);
    for (int j = 0; j < kb; ++j)
        if (cb[j] > 0) h_b -= cb[j] / dn * std::log(cb[j] / dn);
    for (int i = 0; i < ka; ++i)
        for (int j = 0; j < kb; ++j)
            if (cont(i, j) > 0)
                mi += cont(i, j) / dn * std::log(dn * cont(i, j) / (ra[i] * cb[j]));

    // expected MI under the permutation model (hypergeometric marginals)
    std::vector<double> lgam(n + 2);
    for (int t = 0; t <= n + 1; ++t) lgam[t] = std::lgamma(t + 1.0);
    double emi = 0.0;
    for (int i = 0; i < ka; ++i) {
        const double ai = ra[i];
        for (int j = 0; j < kb; ++j) {
            const double bj = cb[j];
            const int lo = std::max(1, static_cast<int>(ai + bj) - n);
            const int hi = static_cast<int>(std::min(ai, bj));
            for (int nij = lo; nij <= hi; ++nij) {
                const double lognij =
                    std::log(nij * dn / (ai * bj));
                const double logp = lgam[static_cast<int>(ai)] + lgam[static_cast<int>(bj)] +
                                    lgam[n - static_cast<int>(ai)] +
                                    lgam[n - static_cast<int>(bj)] - lgam[n] - lgam[nij] -
                                    lgam[static_cast<int>(ai) - nij] -
                                    lgam[static_cast<int>(bj) - nij] -
                                    lgam[n - static_cast<int>(ai) - static_cast<int>(bj) + nij];
                emi += (nij / dn) * lognij * std::exp(logp);
            }
        }
    }
    const double denom = std::max(h_a, h_b) - emi;
    if (std::abs(denom) < 1e-15) return mi - emi >= 0.0 ? 1.0 : 0.0;
    return (mi - emi) / denom;
}

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size()) throw std::invalid_argument("auc: length mismatch");
    std::vector<size_t> order(scores.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [&](size_t x, size_t y) { return scores[x] < scores[y]; });
    double pos = 0.0, neg = 0.0, rank_sum = 0.0;
    size_t t = 0;
    while (t < order.size()) {
        size_t e = t;
        while (e + 1 < order.size() && scores[order[e + 1]] == scores[order[t]]) ++e;
        const double mid_rank = 0.5 * (t + e) + 1.0;  // average 1-based rank of the tie group
        for (size_t q = t; q <= e; ++q)
            if (labels[order[q]] == 1) {
                rank_sum += mid_rank;
                pos += 1.0;
            } else {
                neg += 1.0;
            }
        t = e + 1;
    }
    if (pos == 0.0 || neg == 0.0) throw std::invalid_argument("auc: both classes required");
    return (rank_sum - pos * (pos + 1.0) / 2.0) / (pos * neg);
}

namespace {

double cosine(const Eigen::RowVectorXd& x, const Eigen::RowVectorXd& y) {
    const double nx = x.norm(), ny = y.norm();
    if (nx < 1e-300 || ny < 1e-300) return 0.0;
    return x.dot(y) / (nx * ny);
}

}  // namespace

std::vector<double> score_pairs_cosine(const Eigen::MatrixXd& V,
                                       const std::vector<LabeledPair>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(cosine(V.row(p.i), V.row(p.j)));
    return out;
}

std::vector<double> score_pairs_bilinear(const Eigen::MatrixXd& V, const Eigen::MatrixXd& R,
                                         const std::vector<LabeledPair>& pairs) {
    if (R.rows() != V.cols() || R.cols() != V.cols())
        throw std::invalid_argument("bilinear score: R shape mismatch");
    const Eigen::MatrixXd root = psd_sqrt(R);
    const Eigen::MatrixXd mapped = V * root.transpose();
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& p : pairs) out.push_back(cosine(mapped.row(p.i), mapped.row(p.j)));
    return out;
}

MarginStats margin_stats(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu, double kappa,
                         const PriorMatrix& priors, const Eigen::VectorXi& z_true,
                         double threshold) {
    const int n = static_cast<int>(V.rows());
    if (priors.rows() != n || z_true.size() != n)
        throw std::invalid_argument("margin_stats: row count mismatch");
    if (priors.clusters() != mu.rows())
        throw std::invalid_argument("margin_stats: cluster count mismatch");
    MarginStats out;
    out.margins.resize(n);
    const double inf = std::numeric_limits<double>::infinity();
    int below = 0;
    std::vector<double> finite;
    for (int i = 0; i < n; ++i) {
        double own = -inf, best_other = -inf;
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos) {
            const int k = priors.cluster_at(pos);
            const double sc = priors.log_prob_at(pos) + kappa * mu.row(k).dot(V.row(i));
            if (k == z_true[i]) {
                own = sc;
            } else if (sc > best_other) {
                best_other = sc;
            }
        }
        double m;
        if (std::isinf(own) && own < 0) {
            m = -inf;  // truth carries zero prior mass
            ++out.truth_off_support;
        } else if (std::isinf(best_other) && best_other < 0) {
            m = inf;  // no competitor in the support
            ++out.singleton_supports;
        } else {
            m = own - best_other;
            finite.push_back(m);
        }
        out.margins[i] = m;
        if (m <= threshold) ++below;
    }
    out.fraction_below = static_cast<double>(below) / n;
    if (!finite.empty()) {
        std::sort(finite.begin(), finite.end());
        auto quantile = [&](double q) {
            const double pos = q * (finite.size() - 1);
            const size_t lo = static_cast<size_t>(pos);
            const size_t hi = std::min(lo + 1, finite.size() - 1);
            const double frac = pos - lo;
            return finite[lo] * (1.0 - frac) + finite[hi] * frac;
        };
        out.q10 = quantile(0.10);
        out.q50 = quantile(0.50);
        out.q90 = quantile(0.90);
    }
    return out;
}

}  // namespace spheremix
