#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace spheremix {

// One embedding source: rows of `embeddings` correspond to `feature_ids`
// (strictly increasing, 0-based). Rows are unit-norm unless the set was built
// with validate_unit_rows=false (additive-noise simulations).
struct SourceSet {
    int source_id = 0;
    std::vector<int> feature_ids;
    Eigen::MatrixXd embeddings;  // |S_l| x r_l

    int dim() const { return static_cast<int>(embeddings.cols()); }
    int size() const { return static_cast<int>(feature_ids.size()); }
};

struct FeatureUniverse {
    int n = 0;
    std::vector<SourceSet> sources;

    int total_rows() const;                 // N = sum |S_l|
    std::vector<int> coverage() const;      // D_i, how many sources carry feature i
    void validate(bool require_unit_rows = true) const;
};

// Row-stochastic sparse prior over clusters; rows sum to 1 within 1e-10.
class PriorMatrix {
  public:
    PriorMatrix() = default;
    PriorMatrix(int n, int K, const std::vector<int>& row, const std::vector<int>& col,
                const std::vector<double>& prob);
    static PriorMatrix uniform(int n, int K);
    static PriorMatrix from_dense(const Eigen::MatrixXd& dense);

    int rows() const { return n_; }
    int clusters() const { return K_; }
    int support_begin(int i) const { return offsets_[i]; }
    int support_end(int i) const { return offsets_[i + 1]; }
    int support_size(int i) const { return offsets_[i + 1] - offsets_[i]; }
    int cluster_at(int pos) const { return cols_[pos]; }
    double prob_at(int pos) const { return vals_[pos]; }
    double log_prob_at(int pos) const { return logs_[pos]; }
    double prob(int i, int k) const;  // 0 outside support

    Eigen::MatrixXd dense() const;

  private:
    int n_ = 0, K_ = 0;
    std::vector<int> offsets_;  // n+1
    std::vector<int> cols_;
    std::vector<double> vals_;
    std::vector<double> logs_;
};

enum class Channel : std::uint8_t { similarity = 0, relatedness = 1 };

struct LabeledPair {
    int i = 0, j = 0;
    int label = 0;  // {0,1}
};

// Unordered distinct pairs per channel; duplicates and self-pairs rejected.
struct RelationalPairSet {
    std::vector<LabeledPair> sim;
    std::vector<LabeledPair> rel;

    void add(Channel ch, int i, int j, int label, int n);
    void validate(int n) const;
};

struct CompositeWeights {
    double vmf = 1.0;
    double sim = 1.0;
    double rel = 1.0;

    void validate() const;
};

struct ModelState {
    Eigen::MatrixXd V;                // n x r, unit rows
    std::vector<Eigen::MatrixXd> W;   // per source, r_l x r
    Eigen::MatrixXd mu;               // K x r, unit rows
    double kappa = 1.0;
    double beta1 = 0.0, beta2 = 0.0, beta3 = 0.0;
    Eigen::MatrixXd R;                // r x r, symmetric
    Eigen::VectorXi z;                // n, values in [0, K)

    int n() const { return static_cast<int>(V.rows()); }
    int r() const { return static_cast<int>(V.cols()); }
    int K() const { return static_cast<int>(mu.rows()); }
    void validate(const FeatureUniverse& universe) const;
};

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& m, double floor = 1e-300);

}  // namespace spheremix
