#include "spheremix/losses.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spheremix/directional.hpp"

namespace spheremix {

namespace {

constexpr double kProbFloor = 1e-12;
const double kLogFloor = std::log(kProbFloor);

double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

}  // namespace

BernoulliTerm bernoulli_loglik(double t, int label) {
    BernoulliTerm out;
    out.sigma = sigmoid(t);
    // log sigma(t) = -log1p(exp(-t)); log(1 - sigma(t)) = log sigma(t) - t
    double log_sig = t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
    double logp = label == 1 ? log_sig : log_sig - t;
    if (logp < kLogFloor) {
        out.logp = kLogFloor;
        out.d_dt = 0.0;  // clamp active: the loss is locally flat
    } else {
        out.logp = logp;
        out.d_dt = label - out.sigma;
    }
    return out;
}

double loss_lr(const FeatureUniverse& u, const Eigen::MatrixXd& V,
               const std::vector<Eigen::MatrixXd>& W, const LossGrads& g, double gscale) {
    if (W.size() != u.sources.size())
        throw std::invalid_argument("loss_lr: W count != source count");
    const double N = static_cast<double>(u.total_rows());
    double loss = 0.0;
    for (size_t l = 0; l < u.sources.size(); ++l) {
        const SourceSet& s = u.sources[l];
        if (W[l].rows() != s.dim() || W[l].cols() != V.cols())
            throw std::invalid_argument("loss_lr: W_l shape mismatch");
        const double scale = 1.0 / (N * s.dim());
        for (int row = 0; row < s.size(); ++row) {
            const int i = s.feature_ids[row];
            Eigen::VectorXd resid =
                W[l] * V.row(i).transpose() - s.embeddings.row(row).transpose();
            loss += scale * resid.squaredNorm();
            const double c = 2.0 * scale * gscale;
            if (g.V) g.V->row(i) += c * (W[l].transpose() * resid).transpose();
            if (g.W) (*g.W)[l].noalias() += c * resid * V.row(i);
        }
    }
    return loss;
}

double loss_vmf(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu, double kappa,
                const PriorMatrix& priors, const LossGrads& g, double gscale) {
    const int n = static_cast<int>(V.rows());
    if (priors.rows() != n) throw std::invalid_argument("loss_vmf: priors row count != n");
    if (priors.clusters() != mu.rows())
        throw std::invalid_argument("loss_vmf: priors cluster count != K");
    if (!(kappa > 0.0)) throw std::invalid_argument("loss_vmf: kappa must be positive");
    const int r = static_cast<int>(V.cols());
    const double log_c = vmf_log_normalizer(r, kappa);

    double sum_t = 0.0;      // sum of per-feature log mixture values
    double sum_align = 0.0;  // sum_i sum_k gamma_ik mu_k' V_i
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
        const int begin = priors.support_begin(i), end = priors.support_end(i);
        if (begin == end) throw std::invalid_argument("loss_vmf: empty prior support row");
        scores.clear();
        double best = -std::numeric_limits<double>::infinity();
        for (int pos = begin; pos < end; ++pos) {
            double s =
                priors.log_prob_at(pos) + kappa * mu.row(priors.cluster_at(pos)).dot(V.row(i));
            scores.push_back(s);
            best = std::max(best, s);
        }
        double lse = 0.0;
        for (double s : scores) lse += std::exp(s - best);
        lse = best + std::log(lse);
        sum_t += log_c + lse;
        if (g.V || g.mu || g.kappa) {
            for (int pos = begin; pos < end; ++pos) {
                const int k = priors.cluster_at(pos);
                double gamma = std::exp(scores[pos - begin] - lse);
                if (g.V) g.V->row(i) -= (gscale * gamma / n) * mu.row(k);
                if (g.mu) g.mu->row(k) -= (gscale * gamma / n) * V.row(i);
                if (g.kappa) sum_align += gamma * mu.row(k).dot(V.row(i));
            }
        }
    }
    const double loss = -sum_t / (n * kappa);
    if (g.kappa) {
        double a = mean_resultant_ratio(r, kappa);
        *g.kappa += gscale * (-loss / kappa + a / kappa - sum_align / (n * kappa));
    }
    return loss;
}

double loss_sim(const Eigen::MatrixXd& mu, double beta1, double beta2,
                const PriorMatrix& priors, const std::vector<LabeledPair>& pairs,
                const LossGrads& g, double gscale) {
    if (pairs.empty()) throw std::invalid_argument("loss_sim: empty pair set");
    const Eigen::MatrixXd gram = mu * mu.transpose();
    const double inv = 1.0 / static_cast<double>(pairs.size());
    double loss = 0.0;
    std::vector<double> logterm, ddt;
    std::vector<int> ks1, ks2;
    for (const auto& p : pairs) {
        logterm.clear(); ddt.clear(); ks1.clear(); ks2.clear();
        double best = -std::numeric_limits<double>::infinity();
        for (int p1 = priors.support_begin(p.i); p1 < priors.support_end(p.i); ++p1) {
            for (int p2 = priors.support_begin(p.j); p2 < priors.support_end(p.j); ++p2) {
                const int k1 = priors.cluster_at(p1), k2 = priors.cluster_at(p2);
                BernoulliTerm b = bernoulli_loglik(beta1 + beta2 * gram(k1, k2), p.label);
                logterm.push_back(priors.log_prob_at(p1) + priors.log_prob_at(p2) + b.logp);
                ddt.push_back(b.d_dt);
                ks1.push_back(k1);
                ks2.push_back(k2);
                best = std::max(best, logterm.back());
            }
        }
        double lse = 0.0;
        for (double lt : logterm) lse += std::exp(lt - best);
        lse = best + std::log(lse);
        loss -= lse;
        if (g.mu || g.beta1 || g.beta2) {
            for (size_t t = 0; t < logterm.size(); ++t) {
                if (ddt[t] == 0.0) continue;
                // rho * (delta - sigma) / n_S, rho the pair responsibility
                double w = gscale * inv * std::exp(logterm[t] - lse) * ddt[t];
                if (g.beta1) *g.beta1 -= w;
                if (g.beta2) *g.beta2 -= w * gram(ks1[t], ks2[t]);
                if (g.mu) {
                    g.mu->row(ks1[t]) -= w * beta2 * mu.row(ks2[t]);
                    g.mu->row(ks2[t]) -= w * beta2 * mu.row(ks1[t]);
                }
            }
        }
    }
    return loss * inv;
}

double loss_rel(const Eigen::MatrixXd& V, double beta3, const Eigen::MatrixXd& R,
                const std::vector<LabeledPair>& pairs, const LossGrads& g, double gscale) {
    if (pairs.empty()) throw std::invalid_argument("loss_rel: empty pair set");
    const double inv = 1.0 / static_cast<double>(pairs.size());
    double loss = 0.0;
    for (const auto& p : pairs) {
        Eigen::VectorXd rvj = R * V.row(p.j).transpose();
        BernoulliTerm b = bernoulli_loglik(beta3 + V.row(p.i).dot(rvj), p.label);
        loss -= b.logp;
        if (b.d_dt != 0.0) {
            const double w = gscale * inv * b.d_dt;
            if (g.beta3) *g.beta3 -= w;
            if (g.R) g.R->noalias() -= w * V.row(p.i).transpose() * V.row(p.j);
            if (g.V) {
                g.V->row(p.i) -= w * rvj.transpose();
                g.V->row(p.j) -= w * (R.transpose() * V.row(p.i).transpose()).transpose();
            }
        }
    }
    return loss * inv;
}

double loss_composite(const FeatureUniverse& u, const ModelState& s,
                      const PriorMatrix& priors, const RelationalPairSet& pairs,
                      const CompositeWeights& w, const LossGrads& g) {
    w.validate();
    double total = loss_lr(u, s.V, s.W, g);
    if (w.vmf > 0.0) total += w.vmf * loss_vmf(s.V, s.mu, s.kappa, priors, g, w.vmf);
    if (w.sim > 0.0) total += w.sim * loss_sim(s.mu, s.beta1, s.beta2, priors, pairs.sim, g, w.sim);
    if (w.rel > 0.0) total += w.rel * loss_rel(s.V, s.beta3, s.R, pairs.rel, g, w.rel);
    return total;
}

}  // namespace spheremix
