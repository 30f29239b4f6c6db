#pragma once

#include "spheremix/types.hpp"

namespace spheremix {

// Bernoulli log-likelihood of `label` under logit t, probability clamped to
// [1e-12, 1-1e-12]. d_dt is the derivative of the clamped log-likelihood
// (zero where the clamp is active) so analytic gradients match finite
// differences exactly.
struct BernoulliTerm {
    double logp;
    double d_dt;    // label - sigma(t), or 0 when clamped
    double sigma;   // unclamped sigma(t)
};
BernoulliTerm bernoulli_loglik(double t, int label);

// Ambient (unprojected, unsymmetrized) gradients; blocks left null are skipped.
struct LossGrads {
    Eigen::MatrixXd* V = nullptr;
    std::vector<Eigen::MatrixXd>* W = nullptr;
    Eigen::MatrixXd* mu = nullptr;
    double* kappa = nullptr;
    double* beta1 = nullptr;
    double* beta2 = nullptr;
    double* beta3 = nullptr;
    Eigen::MatrixXd* R = nullptr;
};

// Each loss returns its unweighted value; gradient contributions are
// accumulated into `g` multiplied by `gscale` (the composite weight).

// (1/N) sum_l (1/r_l) sum_{i in S_l} ||U_i - W_l V_i||^2
double loss_lr(const FeatureUniverse& u, const Eigen::MatrixXd& V,
               const std::vector<Eigen::MatrixXd>& W, const LossGrads& g = {},
               double gscale = 1.0);

// -(1/(n*kappa)) sum_i log sum_k pi_ik f_r(V_i; mu_k, kappa), over prior support
double loss_vmf(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu, double kappa,
                const PriorMatrix& priors, const LossGrads& g = {}, double gscale = 1.0);

// -(1/n_S) sum_pairs log sum_{k1,k2} P(delta | mu_k1, mu_k2, b1, b2) pi_ik1 pi_jk2
double loss_sim(const Eigen::MatrixXd& mu, double beta1, double beta2,
                const PriorMatrix& priors, const std::vector<LabeledPair>& pairs,
                const LossGrads& g = {}, double gscale = 1.0);

// -(1/n_R) sum_pairs log P(delta | V_i, V_j, b3, R)
double loss_rel(const Eigen::MatrixXd& V, double beta3, const Eigen::MatrixXd& R,
                const std::vector<LabeledPair>& pairs, const LossGrads& g = {},
                double gscale = 1.0);

// l_lr + w_vmf*l_vmf + w_sim*l_sim + w_rel*l_rel; zero-weight terms are skipped
// entirely (also numerically, so their parameters may be degenerate).
double loss_composite(const FeatureUniverse& u, const ModelState& s,
                      const PriorMatrix& priors, const RelationalPairSet& pairs,
                      const CompositeWeights& w, const LossGrads& g = {});

}  // namespace spheremix
