#pragma once

#include <map>
#include <optional>
#include <string>

#include "spheremix/types.hpp"

namespace spheremix {

// RelErr = ||A A' - B B'||_F / ||B B'||_F via the r x r Gram identity;
// rel_acc = 1 / (1 + RelErr). Invariant to right-rotation of either argument.
double rel_err_subspace(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);
double rel_acc(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

struct ProcrustesResult {
    Eigen::MatrixXd rotation;       // r x r orthogonal, est * rotation ~ truth
    Eigen::VectorXd row_errors;     // ||est_i O - truth_i||
    double mean_square_error = 0.0;
};
ProcrustesResult procrustes_align(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

struct PermutationResult {
    std::vector<int> perm;          // est row perm[k] matches truth row k
    Eigen::MatrixXd aligned;        // est rows reordered
    double mean_square_error = 0.0;
};
// Hungarian matching maximizing total inner product between matched rows.
PermutationResult permutation_align(const Eigen::MatrixXd& est, const Eigen::MatrixXd& truth);

// Minimum-cost perfect matching on a square cost matrix; out[row] = column.
std::vector<int> assignment_min(const Eigen::MatrixXd& cost);

// Adjusted mutual information, max normalization, permutation-model expected MI.
double adjusted_mutual_information(const Eigen::VectorXi& a, const Eigen::VectorXi& b);

// Rank AUC with ties counted 1/2. Throws if either class is absent.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Similarity channel: cosine of latent rows. Relatedness channel: cosine after
// mapping by the PSD-projected square root of R.
std::vector<double> score_pairs_cosine(const Eigen::MatrixXd& V,
                                       const std::vector<LabeledPair>& pairs);
std::vector<double> score_pairs_bilinear(const Eigen::MatrixXd& V, const Eigen::MatrixXd& R,
                                         const std::vector<LabeledPair>& pairs);

struct MarginStats {
    Eigen::VectorXd margins;          // +inf where the support is a singleton
    int singleton_supports = 0;
    int truth_off_support = 0;        // margin -inf: true cluster carries zero prior
    double q10 = 0.0, q50 = 0.0, q90 = 0.0;
    double fraction_below = 0.0;      // fraction with margin <= threshold
};
// m_i = score(z_i) - max_{k != z_i} score(k), score = log pi_ik + kappa mu_k' V_i
MarginStats margin_stats(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu, double kappa,
                         const PriorMatrix& priors, const Eigen::VectorXi& z_true,
                         double threshold = 0.0);

struct EvalReport {
    std::string method;
    int replication = 0;
    std::map<std::string, double> metrics;
};

}  // namespace spheremix
