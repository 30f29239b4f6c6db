#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spheremix/fit.hpp"
#include "spheremix/metrics.hpp"
#include "spheremix/synth.hpp"

namespace spheremix {

struct BenchmarkRow {
    int setting = 0;
    std::string cell;      // swept value, e.g. "L=3" or "kappa=150"
    int replication = 0;
    std::uint64_t seed = 0;
    std::string method;
    std::string metric;
    double value = 0.0;
};

struct BenchmarkOptions {
    int setting = 1;           // 1: L sweep, 2: kappa sweep, 3: K sweep, 4: pair-% sweep
    double scale = 1.0;        // n = round(1000*scale), K = round(50*scale)
    int replications = 20;
    int threads = 1;
    std::uint64_t seed = 0;
    CompositeWeights weights;
    bool grid_search = false;
};

// Evaluation of one fitted/baseline embedding+clustering against the truth.
// AMI is reported on the held-out (non-anchored) features.
EvalReport evaluate_against_truth(const std::string& method, int replication,
                                  const Eigen::MatrixXd& V, const Eigen::MatrixXd* mu,
                                  const Eigen::MatrixXd* R, const Eigen::VectorXi& labels,
                                  const Scenario& sc);

struct ReplicationOutcome {
    std::vector<EvalReport> reports;
    bool converged = true;
};

// One replication of one cell: generate, fit, run both baselines, evaluate.
ReplicationOutcome run_replication(const ScenarioConfig& scenario_cfg, FitConfig fit_cfg,
                                   int replication);

// Scenario/fit seeds depend only on (root seed, replication), not on the cell,
// so sweeps are paired across cells (common random numbers).
std::vector<std::string> benchmark_cells(int setting);
ScenarioConfig cell_config(int setting, const std::string& cell, double scale,
                           std::uint64_t root_seed, int replication);

struct ReplicationStatusLite {
    std::string cell;
    int replication = 0;
    bool converged = true;
};

struct BenchmarkResult {
    std::vector<BenchmarkRow> rows;
    std::vector<ReplicationStatusLite> statuses;
};

BenchmarkResult run_benchmark(const BenchmarkOptions& opts);

// Weight selection over {0.1, 1, 10}^3, scored by mean AUC on the held-out
// labeled pairs; ties keep the first candidate in grid order.
CompositeWeights select_weights_grid(const Scenario& sc, const FitConfig& base_cfg);

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows);
std::string summarize_to_csv(const std::vector<BenchmarkRow>& rows);  // medians + quartiles

}  // namespace spheremix
