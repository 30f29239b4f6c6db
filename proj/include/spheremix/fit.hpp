#pragma once

#include <cstdint>
#include <optional>

#include "spheremix/losses.hpp"

namespace spheremix {

struct FitConfig {
    int r = 6;
    int K = 0;                      // clusters; 0 = take from priors
    CompositeWeights weights;
    int max_outer = 50;
    double tol_rel = 1e-6;          // relative composite change across outer iterations
    int max_inner = 100;            // feature-level alternations (steps 1 and 3)
    double inner_tol = 1e-8;
    int em_max_iter = 100;
    double em_tol = 1e-8;
    double step_v = 1.0;            // initial step sizes before backtracking
    double step_beta = 1.0;
    double step_r = 1.0;
    double step_mu_sim = 0.5;       // similarity correction on mu
    int v_passes = 2;               // projected-gradient passes on V per alternation
    int max_halvings = 30;
    std::uint64_t seed = 0;

    void validate() const;
};

struct OuterRecord {
    int outer = 0;
    double composite = 0.0;
    double lr = 0.0, vmf = 0.0, sim = 0.0, rel = 0.0;
    std::vector<double> em_objective;     // Step-2 objective after each EM iteration
    std::vector<double> step3_objective;  // Step-3 objective after each accepted alternation
    int em_iterations = 0;
    int step3_steps = 0;
    double wall_ms = 0.0;  // excluded from determinism comparisons
};

struct FitTrace {
    std::vector<double> step1_objective;
    std::vector<OuterRecord> outer;
    bool converged = false;

    bool same_path(const FitTrace& other) const;  // bitwise, ignoring wall_ms
};

// Step 1: minimize l_lr + w_rel*l_rel over (V, W, beta3, R) from an SVD +
// Procrustes-stitched warm start. mu/kappa/z in the result are placeholders.
ModelState init_feature_level(const FeatureUniverse& u, const RelationalPairSet& pairs,
                              const FitConfig& cfg, std::vector<double>* objective_trace = nullptr);

struct EmResult {
    Eigen::MatrixXd responsibilities;  // n x K dense (zero outside support)
    std::vector<double> objective;     // after each EM iteration
    int iterations = 0;
};

// Step 2: EM on w_vmf*l_vmf + w_sim*l_sim over (mu, kappa, beta1, beta2, z)
// with V fixed. Every M-step block is acceptance-guarded on that objective, so
// the recorded sequence is non-increasing. With both weights zero the plain
// vMF loss drives the update (pure concept re-estimation).
EmResult em_concept_update(ModelState& s, const PriorMatrix& priors,
                           const std::vector<LabeledPair>& sim_pairs,
                           const CompositeWeights& w, const FitConfig& cfg);

// Step 3: minimize l_lr + w_vmf*l_vmf_hard + w_rel*l_rel over (V, W, beta3, R)
// with (mu, kappa, z) fixed, where l_vmf_hard plugs the hard labels in.
int feature_refine(const FeatureUniverse& u, ModelState& s, const RelationalPairSet& pairs,
                   const CompositeWeights& w, const FitConfig& cfg,
                   std::vector<double>* objective_trace = nullptr);

// assignment scores log pi_ik + kappa * mu_k' V_i over the prior support;
// margin = best minus runner-up (+inf when the support is a singleton)
struct Assignment {
    Eigen::VectorXi labels;
    Eigen::VectorXd margins;
};
Assignment assign_clusters(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu,
                           double kappa, const PriorMatrix& priors);

struct FitResult {
    ModelState state;
    FitTrace trace;
    bool converged = false;
};

// Full pipeline: Step 1 init, then alternate Steps 2 and 3 until the composite
// stops improving (relative tol) or max_outer is reached. An outer iteration
// that fails to improve the composite is rolled back and treated as converged.
FitResult fit_alignment(const FeatureUniverse& u, const PriorMatrix& priors,
                        const RelationalPairSet& pairs, const FitConfig& cfg);

}  // namespace spheremix
