#include "spheremix/fit.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "spheremix/directional.hpp"
#include "spheremix/linalg.hpp"
#include "spheremix/metrics.hpp"
#include "spheremix/rng.hpp"

namespace spheremix {

namespace {

Eigen::MatrixXd safe_normalize_rows(const Eigen::MatrixXd& m) {
    Eigen::MatrixXd out = m;
    for (int i = 0; i < out.rows(); ++i) {
        double nrm = out.row(i).norm();
        if (nrm > 1e-12) {
            out.row(i) /= nrm;
        } else {
            out.row(i).setZero();
            out(i, 0) = 1.0;
        }
    }
    return out;
}

// objective for the feature-level blocks (steps 1 and 3); the hard-label vMF
// term is enabled only in step 3
struct FeatureObjective {
    const FeatureUniverse& u;
    const RelationalPairSet& pairs;
    double w_rel = 0.0;
    double w_vmf = 0.0;  // weight on the hard-label term
    const Eigen::MatrixXd* mu = nullptr;
    double kappa = 0.0;
    const Eigen::VectorXi* z = nullptr;

    bool use_rel() const { return w_rel > 0.0 && !pairs.rel.empty(); }
    bool use_vmf() const { return w_vmf > 0.0 && mu != nullptr; }

    double hard_vmf(const Eigen::MatrixXd& V) const {
        const int n = static_cast<int>(V.rows());
        const double log_c = vmf_log_normalizer(static_cast<int>(V.cols()), kappa);
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += log_c + kappa * mu->row((*z)[i]).dot(V.row(i));
        return -s / (n * kappa);
    }

    double eval(const Eigen::MatrixXd& V, const std::vector<Eigen::MatrixXd>& W,
                double beta3, const Eigen::MatrixXd& R) const {
        double val = loss_lr(u, V, W);
        if (use_vmf()) val += w_vmf * hard_vmf(V);
        if (use_rel()) val += w_rel * loss_rel(V, beta3, R, pairs.rel);
        return val;
    }

    // gradient w.r.t. V only (W enters by exact least squares, not gradients)
    Eigen::MatrixXd grad_v(const Eigen::MatrixXd& V, const std::vector<Eigen::MatrixXd>& W,
                           double beta3, const Eigen::MatrixXd& R) const {
        Eigen::MatrixXd gv = Eigen::MatrixXd::Zero(V.rows(), V.cols());
        LossGrads g;
        g.V = &gv;
        loss_lr(u, V, W, g);
        if (use_rel()) loss_rel(V, beta3, R, pairs.rel, g, w_rel);
        if (use_vmf()) {
            const double c = w_vmf / static_cast<double>(V.rows());
            for (int i = 0; i < V.rows(); ++i) gv.row(i) -= c * mu->row((*z)[i]);
        }
        return gv;
    }
};

// exact per-source least squares for W_l given V (ridge guard for rank gaps)
void solve_w(const FeatureUniverse& u, const Eigen::MatrixXd& V,
             std::vector<Eigen::MatrixXd>& W) {
    const int r = static_cast<int>(V.cols());
    W.resize(u.sources.size());
    for (size_t l = 0; l < u.sources.size(); ++l) {
        const SourceSet& s = u.sources[l];
        Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(r, r);
        Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(r, s.dim());
        for (int row = 0; row < s.size(); ++row) {
            const auto v = V.row(s.feature_ids[row]);
            gram.noalias() += v.transpose() * v;
            cross.noalias() += v.transpose() * s.embeddings.row(row);
        }
        gram.diagonal().array() += 1e-12;
        W[l] = gram.ldlt().solve(cross).transpose();  // r_l x r
    }
}

// per-block step sizes carried across alternations: grow after clean
// acceptance, remember the backtracked scale otherwise
struct StepState {
    double v, beta, r;
    explicit StepState(const FitConfig& cfg)
        : v(cfg.step_v), beta(cfg.step_beta), r(cfg.step_r) {}
};

// guarded line search along -grad; updates the persistent step size
template <typename Try>
bool guarded_step(double& step, int max_halvings, double& value, Try&& attempt) {
    double s = step;
    for (int h = 0; h <= max_halvings; ++h, s *= 0.5) {
        double v_try = attempt(s);
        if (v_try <= value) {
            value = v_try;
            step = (h == 0) ? std::min(s * 2.0, 1e9) : s;
            return true;
        }
    }
    step = std::max(s, 1e-300);
    return false;
}

// one alternation over (W, V, beta3, R); returns accepted step count
int feature_alternation(const FeatureObjective& obj, Eigen::MatrixXd& V,
                        std::vector<Eigen::MatrixXd>& W, double& beta3, Eigen::MatrixXd& R,
                        double& value, const FitConfig& cfg, StepState& steps) {
    int accepted = 0;

    {  // W: exact minimizer of the only W-dependent term
        std::vector<Eigen::MatrixXd> w_try = W;
        solve_w(obj.u, V, w_try);
        double v_try = obj.eval(V, w_try, beta3, R);
        if (v_try <= value) {
            W = std::move(w_try);
            value = v_try;
            ++accepted;
        }
    }

    for (int pass = 0; pass < cfg.v_passes; ++pass) {
        Eigen::MatrixXd gv = obj.grad_v(V, W, beta3, R);
        Eigen::MatrixXd v_try;
        bool ok = guarded_step(steps.v, cfg.max_halvings, value, [&](double s) {
            v_try = safe_normalize_rows(V - s * gv);
            return obj.eval(v_try, W, beta3, R);
        });
        if (!ok) break;
        V = std::move(v_try);
        ++accepted;
    }

    if (obj.use_rel()) {
        {  // beta3
            double gb = 0.0;
            LossGrads g;
            g.beta3 = &gb;
            loss_rel(V, beta3, R, obj.pairs.rel, g, obj.w_rel);
            double b_try = beta3;
            if (guarded_step(steps.beta, cfg.max_halvings, value, [&](double s) {
                    b_try = beta3 - s * gb;
                    return obj.eval(V, W, b_try, R);
                })) {
                beta3 = b_try;
                ++accepted;
            }
        }
        {  // R, symmetrized gradient step
            Eigen::MatrixXd gr = Eigen::MatrixXd::Zero(R.rows(), R.cols());
            LossGrads g;
            g.R = &gr;
            loss_rel(V, beta3, R, obj.pairs.rel, g, obj.w_rel);
            gr = 0.5 * (gr + gr.transpose());
            Eigen::MatrixXd r_try;
            if (guarded_step(steps.r, cfg.max_halvings, value, [&](double s) {
                    r_try = R - s * gr;
                    return obj.eval(V, W, beta3, r_try);
                })) {
                R = std::move(r_try);
                ++accepted;
            }
        }
    }
    return accepted;
}

// SVD warm start stitched across sources by Procrustes on shared features
Eigen::MatrixXd stitched_warm_start(const FeatureUniverse& u, int r) {
    const size_t L = u.sources.size();
    std::vector<Eigen::MatrixXd> embeds(L);
    for (size_t l = 0; l < L; ++l) {
        const SourceSet& s = u.sources[l];
        if (s.size() < r)
            throw std::invalid_argument("init: source smaller than latent rank");
        TruncatedSvd svd = truncated_svd(s.embeddings, r);
        embeds[l] = safe_normalize_rows(svd.U * svd.S.asDiagonal());
    }

    size_t anchor = 0;
    for (size_t l = 1; l < L; ++l)
        if (u.sources[l].size() > u.sources[anchor].size()) anchor = l;

    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(u.n, r);
    std::vector<int> count(u.n, 0);
    std::vector<bool> done(L, false);
    auto absorb = [&](size_t l, const Eigen::MatrixXd& rows) {
        const auto& ids = u.sources[l].feature_ids;
        for (size_t t = 0; t < ids.size(); ++t) {
            sum.row(ids[t]) += rows.row(static_cast<int>(t));
            ++count[ids[t]];
        }
        done[l] = true;
    };
    absorb(anchor, embeds[anchor]);

    for (size_t round = 1; round < L; ++round) {
        // next source: largest overlap with already-stitched features
        size_t pick = L;
        int best_overlap = -1;
        for (size_t l = 0; l < L; ++l) {
            if (done[l]) continue;
            int overlap = 0;
            for (int id : u.sources[l].feature_ids)
                if (count[id] > 0) ++overlap;
            if (overlap > best_overlap) {
                best_overlap = overlap;
                pick = l;
            }
        }
        const auto& ids = u.sources[pick].feature_ids;
        Eigen::MatrixXd rows = embeds[pick];
        if (best_overlap >= 1) {
            Eigen::MatrixXd X(best_overlap, r), Y(best_overlap, r);
            int t = 0;
            for (size_t row = 0; row < ids.size(); ++row) {
                const int id = ids[row];
                if (count[id] > 0) {
                    X.row(t) = rows.row(static_cast<int>(row));
                    Y.row(t) = (sum.row(id) / count[id]).normalized();
                    ++t;
                }
            }
            rows = rows * orthogonal_procrustes(X, Y).Q;
        }
        absorb(pick, rows);
    }
    return safe_normalize_rows(sum);
}

}  // namespace

void FitConfig::validate() const {
    weights.validate();
    if (r < 2) throw std::invalid_argument("fit config: r must be >= 2");
    if (max_outer < 1 || max_inner < 1 || em_max_iter < 1)
        throw std::invalid_argument("fit config: iteration caps must be positive");
    if (!(tol_rel >= 0.0) || !(inner_tol >= 0.0) || !(em_tol >= 0.0))
        throw std::invalid_argument("fit config: tolerances must be nonnegative");
    if (!(step_v > 0.0) || !(step_beta > 0.0) || !(step_r > 0.0) || !(step_mu_sim > 0.0))
        throw std::invalid_argument("fit config: step sizes must be positive");
    if (v_passes < 1 || max_halvings < 0)
        throw std::invalid_argument("fit config: bad search controls");
}

bool FitTrace::same_path(const FitTrace& other) const {
    if (step1_objective != other.step1_objective) return false;
    if (converged != other.converged) return false;
    if (outer.size() != other.outer.size()) return false;
    for (size_t s = 0; s < outer.size(); ++s) {
        const auto& a = outer[s];
        const auto& b = other.outer[s];
        if (a.outer != b.outer || a.composite != b.composite || a.lr != b.lr ||
            a.vmf != b.vmf || a.sim != b.sim || a.rel != b.rel ||
            a.em_objective != b.em_objective || a.step3_objective != b.step3_objective ||
            a.em_iterations != b.em_iterations || a.step3_steps != b.step3_steps)
            return false;
    }
    return true;
}

ModelState init_feature_level(const FeatureUniverse& u, const RelationalPairSet& pairs,
                              const FitConfig& cfg, std::vector<double>* objective_trace) {
    cfg.validate();
    u.validate(false);
    pairs.validate(u.n);

    ModelState s;
    s.V = stitched_warm_start(u, cfg.r);
    solve_w(u, s.V, s.W);
    s.beta3 = 0.0;
    s.R = Eigen::MatrixXd::Zero(cfg.r, cfg.r);
    s.mu = Eigen::MatrixXd::Zero(1, cfg.r);  // placeholder until step 2
    s.mu(0, 0) = 1.0;
    s.kappa = 1.0;
    s.z = Eigen::VectorXi::Zero(u.n);

    FeatureObjective obj{u, pairs};
    obj.w_rel = cfg.weights.rel;

    double value = obj.eval(s.V, s.W, s.beta3, s.R);
    if (objective_trace) objective_trace->push_back(value);
    StepState steps(cfg);
    for (int it = 0; it < cfg.max_inner; ++it) {
        double prev = value;
        int accepted = feature_alternation(obj, s.V, s.W, s.beta3, s.R, value, cfg, steps);
        if (objective_trace) objective_trace->push_back(value);
        if (accepted == 0) break;
        if (std::abs(prev - value) <= cfg.inner_tol * std::max(1.0, std::abs(prev))) break;
    }
    return s;
}

namespace {

// E-step over prior support; returns dense responsibilities (zeros elsewhere)
Eigen::MatrixXd responsibilities(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu,
                                 double kappa, const PriorMatrix& priors) {
    const int n = static_cast<int>(V.rows());
    Eigen::MatrixXd gamma = Eigen::MatrixXd::Zero(n, priors.clusters());
    std::vector<double> scores;
    for (int i = 0; i < n; ++i) {
        const int begin = priors.support_begin(i), end = priors.support_end(i);
        if (begin == end) throw std::invalid_argument("em: empty prior support row");
        scores.clear();
        double best = -std::numeric_limits<double>::infinity();
        for (int pos = begin; pos < end; ++pos) {
            double sc =
                priors.log_prob_at(pos) + kappa * mu.row(priors.cluster_at(pos)).dot(V.row(i));
            scores.push_back(sc);
            best = std::max(best, sc);
        }
        double total = 0.0;
        for (double sc : scores) total += std::exp(sc - best);
        for (int pos = begin; pos < end; ++pos)
            gamma(i, priors.cluster_at(pos)) = std::exp(scores[pos - begin] - best) / total;
    }
    return gamma;
}

}  // namespace

EmResult em_concept_update(ModelState& s, const PriorMatrix& priors,
                           const std::vector<LabeledPair>& sim_pairs,
                           const CompositeWeights& w, const FitConfig& cfg) {
    const int K = priors.clusters();
    if (s.mu.rows() != K) throw std::invalid_argument("em: mu rows != prior clusters");
    const int n = s.n(), r = s.r();
    const bool use_sim = w.sim > 0.0 && !sim_pairs.empty();
    // with both weights zero this is a pure concept re-estimation on the vMF loss
    const double wv = (w.vmf == 0.0 && !use_sim) ? 1.0 : w.vmf;
    const double ws = use_sim ? w.sim : 0.0;

    auto objective = [&](const Eigen::MatrixXd& mu, double kappa, double b1, double b2) {
        double J = 0.0;
        if (wv > 0.0) J += wv * loss_vmf(s.V, mu, kappa, priors, {});
        if (ws > 0.0) J += ws * loss_sim(mu, b1, b2, priors, sim_pairs, {});
        return J;
    };

    EmResult res;
    double J = objective(s.mu, s.kappa, s.beta1, s.beta2);
    const double slack = 1e-12;

    for (int it = 0; it < cfg.em_max_iter; ++it) {
        const double J_prev = J;
        Eigen::MatrixXd gamma = responsibilities(s.V, s.mu, s.kappa, priors);

        // mu: closed-form candidate, then optional similarity correction;
        // both acceptance-guarded so J cannot increase
        Eigen::MatrixXd resultant = gamma.transpose() * s.V;  // K x r
        Eigen::MatrixXd mu_cand = s.mu;
        for (int k = 0; k < K; ++k) {
            double nrm = resultant.row(k).norm();
            if (nrm > 1e-12) mu_cand.row(k) = resultant.row(k) / nrm;
        }
        double J_cand = objective(mu_cand, s.kappa, s.beta1, s.beta2);
        if (J_cand <= J + slack) {
            if (use_sim) {
                Eigen::MatrixXd gmu = Eigen::MatrixXd::Zero(K, r);
                LossGrads g;
                g.mu = &gmu;
                loss_sim(mu_cand, s.beta1, s.beta2, priors, sim_pairs, g, ws);
                double step = cfg.step_mu_sim;
                for (int h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
                    Eigen::MatrixXd mu_try = safe_normalize_rows(mu_cand - step * gmu);
                    double J_try = objective(mu_try, s.kappa, s.beta1, s.beta2);
                    if (J_try <= J_cand) {
                        mu_cand = std::move(mu_try);
                        J_cand = J_try;
                        break;
                    }
                }
            }
            s.mu = mu_cand;
            J = J_cand;
        }

        // kappa: mixture-weighted resultant inversion, guarded toward the old value
        {
            double rbar = 0.0;
            for (int k = 0; k < K; ++k) rbar += gamma.col(k).dot((s.V * s.mu.row(k).transpose()).col(0));
            rbar /= n;
            rbar = std::min(std::max(rbar, 0.0), 1.0 - 1e-9);
            double kappa_cand = std::max(concentration_from_resultant(r, rbar), 1e-8);
            double step = 1.0;
            for (int h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
                double k_try = s.kappa + step * (kappa_cand - s.kappa);
                double J_try = objective(s.mu, k_try, s.beta1, s.beta2);
                if (J_try <= J + slack) {
                    s.kappa = k_try;
                    J = J_try;
                    break;
                }
            }
        }

        // beta1, beta2: Newton on the marginalized logistic likelihood, guarded
        if (use_sim) {
            Eigen::Vector2d grad = Eigen::Vector2d::Zero();
            Eigen::Matrix2d hess = Eigen::Matrix2d::Zero();
            const Eigen::MatrixXd gram = s.mu * s.mu.transpose();
            const double inv = 1.0 / static_cast<double>(sim_pairs.size());
            std::vector<double> logterm, dd, hh, cc;
            for (const auto& p : sim_pairs) {
                logterm.clear(); dd.clear(); hh.clear(); cc.clear();
                double best = -std::numeric_limits<double>::infinity();
                for (int p1 = priors.support_begin(p.i); p1 < priors.support_end(p.i); ++p1)
                    for (int p2 = priors.support_begin(p.j); p2 < priors.support_end(p.j); ++p2) {
                        const int k1 = priors.cluster_at(p1), k2 = priors.cluster_at(p2);
                        BernoulliTerm b = bernoulli_loglik(s.beta1 + s.beta2 * gram(k1, k2), p.label);
                        logterm.push_back(priors.log_prob_at(p1) + priors.log_prob_at(p2) + b.logp);
                        dd.push_back(b.d_dt);
                        hh.push_back(b.d_dt == 0.0 ? 0.0 : -b.sigma * (1.0 - b.sigma));
                        cc.push_back(gram(k1, k2));
                        best = std::max(best, logterm.back());
                    }
                double lse = 0.0;
                for (double lt : logterm) lse += std::exp(lt - best);
                lse = best + std::log(lse);
                Eigen::Vector2d m1 = Eigen::Vector2d::Zero();
                Eigen::Matrix2d m2 = Eigen::Matrix2d::Zero();
                for (size_t t = 0; t < logterm.size(); ++t) {
                    double rho = std::exp(logterm[t] - lse);
                    Eigen::Vector2d x(1.0, cc[t]);
                    m1 += rho * dd[t] * x;
                    m2 += rho * (dd[t] * dd[t] + hh[t]) * x * x.transpose();
                }
                grad -= inv * m1;
                hess -= inv * (m2 - m1 * m1.transpose());
            }
            Eigen::Vector2d delta;
            double det = hess.determinant();
            if (det > 1e-14 && hess(0, 0) > 0.0) {
                delta = -hess.inverse() * grad;
            } else {
                delta = -cfg.step_beta * grad;
            }
            double step = 1.0;
            for (int h = 0; h <= cfg.max_halvings; ++h, step *= 0.5) {
                double b1 = s.beta1 + step * delta[0];
                double b2 = s.beta2 + step * delta[1];
                double J_try = objective(s.mu, s.kappa, b1, b2);
                if (J_try <= J + slack) {
                    s.beta1 = b1;
                    s.beta2 = b2;
                    J = J_try;
                    break;
                }
            }
        }

        res.objective.push_back(J);
        res.iterations = it + 1;
        if (std::abs(J_prev - J) <= cfg.em_tol * std::max(1.0, std::abs(J_prev))) break;
    }

    // final E-step defines responsibilities and hard labels at the final (mu, kappa)
    res.responsibilities = responsibilities(s.V, s.mu, s.kappa, priors);
    s.z.resize(n);
    for (int i = 0; i < n; ++i) {
        int best = -1;
        double bv = -1.0;
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos) {
            const int k = priors.cluster_at(pos);
            if (res.responsibilities(i, k) > bv) {
                bv = res.responsibilities(i, k);
                best = k;
            }
        }
        s.z[i] = best;
    }
    return res;
}

int feature_refine(const FeatureUniverse& u, ModelState& s, const RelationalPairSet& pairs,
                   const CompositeWeights& w, const FitConfig& cfg,
                   std::vector<double>* objective_trace) {
    FeatureObjective obj{u, pairs};
    obj.w_rel = w.rel;
    obj.w_vmf = w.vmf;
    obj.mu = &s.mu;
    obj.kappa = s.kappa;
    obj.z = &s.z;

    double value = obj.eval(s.V, s.W, s.beta3, s.R);
    if (objective_trace) objective_trace->push_back(value);
    int total_steps = 0;
    StepState steps(cfg);
    for (int it = 0; it < cfg.max_inner; ++it) {
        double prev = value;
        int accepted = feature_alternation(obj, s.V, s.W, s.beta3, s.R, value, cfg, steps);
        total_steps += accepted;
        if (objective_trace) objective_trace->push_back(value);
        if (accepted == 0) break;
        if (std::abs(prev - value) <= cfg.inner_tol * std::max(1.0, std::abs(prev))) break;
    }
    return total_steps;
}

Assignment assign_clusters(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu,
                           double kappa, const PriorMatrix& priors) {
    if (priors.rows() != V.rows()) throw std::invalid_argument("assign: priors row mismatch");
    if (priors.clusters() != mu.rows()) throw std::invalid_argument("assign: cluster mismatch");
    const int n = static_cast<int>(V.rows());
    Assignment out;
    out.labels.resize(n);
    out.margins.resize(n);
    for (int i = 0; i < n; ++i) {
        int best = -1;
        double b1 = -std::numeric_limits<double>::infinity();
        double b2 = -std::numeric_limits<double>::infinity();
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos) {
            const int k = priors.cluster_at(pos);
            double sc = priors.log_prob_at(pos) + kappa * mu.row(k).dot(V.row(i));
            if (sc > b1) {
                b2 = b1;
                b1 = sc;
                best = k;
            } else if (sc > b2) {
                b2 = sc;
            }
        }
        if (best < 0) throw std::invalid_argument("assign: empty prior support row");
        out.labels[i] = best;
        out.margins[i] = std::isinf(b2) ? std::numeric_limits<double>::infinity() : b1 - b2;
    }
    return out;
}

FitResult fit_alignment(const FeatureUniverse& u, const PriorMatrix& priors,
                        const RelationalPairSet& pairs, const FitConfig& cfg) {
    cfg.validate();
    u.validate(false);
    pairs.validate(u.n);
    if (priors.rows() != u.n) throw std::invalid_argument("fit: priors row count != n");
    const int K = priors.clusters();
    if (cfg.K > 0 && cfg.K != K)
        throw std::invalid_argument("fit: config K disagrees with priors");

    FitResult out;
    out.state = init_feature_level(u, pairs, cfg, &out.trace.step1_objective);
    ModelState& s = out.state;

    SphericalKmeansResult km = spherical_kmeans(s.V, K, substream(cfg.seed, 0xa1, 0));
    for (std::uint64_t t = 1; t < 4; ++t) {
        SphericalKmeansResult alt = spherical_kmeans(s.V, K, substream(cfg.seed, 0xa1, t));
        if (alt.objective > km.objective) km = std::move(alt);
    }
    // centers carry no cluster identity; hand each cluster id the center
    // holding most of its prior mass so restricted supports start on their
    // own regions instead of whatever index k-means produced
    Eigen::MatrixXd affinity = Eigen::MatrixXd::Zero(K, K);
    for (int i = 0; i < u.n; ++i)
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos)
            affinity(priors.cluster_at(pos), km.labels[i]) += priors.prob_at(pos);
    const std::vector<int> pick = assignment_min(-affinity);
    s.mu.resize(K, cfg.r);
    for (int k = 0; k < K; ++k) s.mu.row(k) = km.centers.row(pick[k]);
    s.z.resize(u.n);
    for (int i = 0; i < u.n; ++i) {
        int zb = -1;
        double best = -std::numeric_limits<double>::infinity();
        for (int pos = priors.support_begin(i); pos < priors.support_end(i); ++pos) {
            const int k = priors.cluster_at(pos);
            const double sc = s.mu.row(k).dot(s.V.row(i));
            if (sc > best) {
                best = sc;
                zb = k;
            }
        }
        s.z[i] = zb;
    }
    double rbar = std::min(std::max(km.objective / u.n, 0.0), 1.0 - 1e-9);
    s.kappa = std::max(concentration_from_resultant(cfg.r, rbar), 1e-8);
    s.beta1 = 0.0;
    s.beta2 = 0.0;

    double composite = loss_composite(u, s, priors, pairs, cfg.weights);
    for (int outer = 1; outer <= cfg.max_outer; ++outer) {
        ModelState snapshot = s;
        OuterRecord rec;
        rec.outer = outer;
        auto t0 = std::chrono::steady_clock::now();

        EmResult em = em_concept_update(s, priors, pairs.sim, cfg.weights, cfg);
        rec.em_objective = std::move(em.objective);
        rec.em_iterations = em.iterations;
        rec.step3_steps = feature_refine(u, s, pairs, cfg.weights, cfg, &rec.step3_objective);

        rec.lr = loss_lr(u, s.V, s.W);
        rec.vmf = loss_vmf(s.V, s.mu, s.kappa, priors);
        rec.sim = pairs.sim.empty() ? 0.0 : loss_sim(s.mu, s.beta1, s.beta2, priors, pairs.sim);
        rec.rel = pairs.rel.empty() ? 0.0 : loss_rel(s.V, s.beta3, s.R, pairs.rel);
        rec.composite = rec.lr + cfg.weights.vmf * rec.vmf + cfg.weights.sim * rec.sim +
                        cfg.weights.rel * rec.rel;
        rec.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0).count();

        if (rec.composite > composite + 1e-12 * std::max(1.0, std::abs(composite))) {
            s = std::move(snapshot);  // no progress: roll back and stop
            out.trace.converged = true;
            break;
        }
        const double change = std::abs(composite - rec.composite);
        const double ref = std::max(1.0, std::abs(composite));
        composite = rec.composite;
        out.trace.outer.push_back(std::move(rec));
        if (change <= cfg.tol_rel * ref) {
            out.trace.converged = true;
            break;
        }
    }
    out.converged = out.trace.converged;
    return out;
}

}  // namespace spheremix
