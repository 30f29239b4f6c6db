#pragma once

#include <cstdint>
#include <optional>

#include "spheremix/types.hpp"

namespace spheremix {

enum class NoiseModel : std::uint8_t { vmf = 0, gaussian = 1 };

struct ScenarioConfig {
    int n = 1000;
    int K = 50;
    int r = 6;
    double kappa = 150.0;
    int L = 4;                      // sources; supported range [1, 4]
    int source_dim = 200;           // r_l, shared across sources
    double source_concentration = 60.0;
    double w_mean = 0.6, w_sd = 1.0;
    double mu_mean = 0.0, mu_sd = 1.0;  // mu_mean <= 0 means use 1/sqrt(r)
    double beta1 = -0.125, beta2 = 5.0;
    double beta3 = -0.125;
    std::vector<double> r_diag;     // empty = isotropic 5
    double sim_pos_pct = 0.025, sim_neg_pct = 0.035;   // fractions of all pairs
    double rel_pos_pct = 0.025, rel_neg_pct = 0.035;
    double eval_pair_pct = 0.02;    // held-out labeled pairs per channel
    double anchor_fraction = 0.7;
    bool spectral_priors = false;   // else uniform over non-anchor clusters
    NoiseModel noise = NoiseModel::vmf;
    double gaussian_sd = 0.1;
    std::uint64_t seed = 0;

    void validate() const;
    void apply_pair_preset(double total_pct);  // 0.04 / 0.06 / 0.08
};

struct ScenarioTruth {
    Eigen::MatrixXd V;               // n x r
    Eigen::MatrixXd mu;              // K x r
    Eigen::VectorXi z;               // n
    std::vector<Eigen::MatrixXd> W;  // r_l x r each
    Eigen::MatrixXd R;               // r x r
    double kappa = 0.0;
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    std::vector<int> anchor_clusters;
    std::vector<int> eval_features;  // features whose cluster is not anchored
};

struct Scenario {
    ScenarioConfig config;
    FeatureUniverse universe;
    RelationalPairSet pairs;       // observed (fitting) pairs
    RelationalPairSet eval_pairs;  // held-out labeled pairs for scoring
    PriorMatrix priors;
    ScenarioTruth truth;
};

// source index windows from the fixed 4-source design, scaled proportionally
std::vector<std::pair<int, int>> source_windows(int n, int L);

Scenario generate_scenario(const ScenarioConfig& cfg);

// Exposed separately for targeted tests: label sampling at the true model,
// positive subsampling, and hard-negative selection by first-source cosine.
RelationalPairSet generate_relational_pairs(const ScenarioConfig& cfg, const ScenarioTruth& truth,
                                            const Eigen::MatrixXd& first_source,
                                            std::uint64_t seed,
                                            RelationalPairSet* eval_pairs = nullptr);

PriorMatrix build_anchor_priors(const ScenarioConfig& cfg, const Eigen::VectorXi& z,
                                const std::vector<int>& anchor_clusters,
                                const std::vector<LabeledPair>* candidate_pairs,
                                std::uint64_t seed);

}  // namespace spheremix
