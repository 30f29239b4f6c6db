#include "spheremix/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "spheremix/baselines.hpp"
#include "spheremix/io.hpp"
#include "spheremix/rng.hpp"

namespace spheremix {

namespace {

std::vector<int> restrict_ids(const Eigen::VectorXi& labels, const std::vector<int>& ids,
                              Eigen::VectorXi& out) {
    out.resize(static_cast<int>(ids.size()));
    for (size_t t = 0; t < ids.size(); ++t) out[static_cast<int>(t)] = labels[ids[t]];
    return ids;
}

void try_auc(EvalReport& rep, const std::string& name, const std::vector<double>& scores,
             const std::vector<LabeledPair>& pairs) {
    if (pairs.empty()) return;
    std::vector<int> labels;
    labels.reserve(pairs.size());
    for (const auto& p : pairs) labels.push_back(p.label);
    try {
        rep.metrics[name] = auc(scores, labels);
    } catch (const std::invalid_argument&) {
        // single-class evaluation pairs: metric undefined, omit
    }
}

}  // namespace

EvalReport evaluate_against_truth(const std::string& method, int replication,
                                  const Eigen::MatrixXd& V, const Eigen::MatrixXd* mu,
                                  const Eigen::MatrixXd* R, const Eigen::VectorXi& labels,
                                  const Scenario& sc) {
    EvalReport rep;
    rep.method = method;
    rep.replication = replication;

    rep.metrics["rel_acc_v"] = rel_acc(V, sc.truth.V);
    ProcrustesResult pro = procrustes_align(V, sc.truth.V);
    rep.metrics["procrustes_mse_v"] = pro.mean_square_error;

    if (mu != nullptr && mu->rows() == sc.truth.mu.rows()) {
        // theorem ordering: the shared rotation from V first, then label matching
        Eigen::MatrixXd mu_rot = (*mu) * pro.rotation;
        PermutationResult perm = permutation_align(mu_rot, sc.truth.mu);
        rep.metrics["rel_acc_mu"] = rel_acc(perm.aligned, sc.truth.mu);
        rep.metrics["perm_mse_mu"] = perm.mean_square_error;
    }

    rep.metrics["ami_all"] = adjusted_mutual_information(labels, sc.truth.z);
    if (!sc.truth.eval_features.empty()) {
        Eigen::VectorXi est_h, true_h;
        restrict_ids(labels, sc.truth.eval_features, est_h);
        restrict_ids(sc.truth.z, sc.truth.eval_features, true_h);
        rep.metrics["ami"] = adjusted_mutual_information(est_h, true_h);
    }

    try_auc(rep, "auc_sim", score_pairs_cosine(V, sc.eval_pairs.sim), sc.eval_pairs.sim);
    if (R != nullptr) {
        try_auc(rep, "auc_rel", score_pairs_bilinear(V, *R, sc.eval_pairs.rel),
                sc.eval_pairs.rel);
    } else {
        try_auc(rep, "auc_rel", score_pairs_cosine(V, sc.eval_pairs.rel), sc.eval_pairs.rel);
    }
    return rep;
}

ReplicationOutcome run_replication(const ScenarioConfig& scenario_cfg, FitConfig fit_cfg,
                                   int replication) {
    Scenario sc = generate_scenario(scenario_cfg);
    fit_cfg.r = scenario_cfg.r;
    fit_cfg.K = scenario_cfg.K;
    fit_cfg.seed = substream(scenario_cfg.seed, 0x77);

    ReplicationOutcome out;
    FitResult fit = fit_alignment(sc.universe, sc.priors, sc.pairs, fit_cfg);
    out.converged = fit.converged;
    out.reports.push_back(evaluate_against_truth("spheremix", replication, fit.state.V,
                                                 &fit.state.mu, &fit.state.R, fit.state.z, sc));

    Eigen::MatrixXd base = svd_concat_embed(sc.universe, scenario_cfg.r);
    {
        KmeansResult km = kmeans_euclidean(base, scenario_cfg.K,
                                           substream(scenario_cfg.seed, 0xb0));
        ClusterCenters cc = cluster_centers(base, km.labels, scenario_cfg.K);
        const Eigen::MatrixXd* mu = cc.centers.rows() == scenario_cfg.K ? &cc.centers : nullptr;
        out.reports.push_back(
            evaluate_against_truth("svd_kmeans", replication, base, mu, nullptr, km.labels, sc));
    }
    {
        Eigen::VectorXi labels = hclust_average_cosine(base, scenario_cfg.K);
        ClusterCenters cc = cluster_centers(base, labels, scenario_cfg.K);
        const Eigen::MatrixXd* mu = cc.centers.rows() == scenario_cfg.K ? &cc.centers : nullptr;
        out.reports.push_back(
            evaluate_against_truth("svd_hclust", replication, base, mu, nullptr, labels, sc));
    }
    return out;
}

std::vector<std::string> benchmark_cells(int setting) {
    switch (setting) {
        case 1: return {"L=2", "L=3", "L=4"};
        case 2: return {"kappa=100", "kappa=150", "kappa=200"};
        case 3: return {"K=50", "K=100"};
        case 4: return {"pairs=4%", "pairs=6%", "pairs=8%"};
        default: throw std::invalid_argument("benchmark: setting must be in {1, 2, 3, 4}");
    }
}

ScenarioConfig cell_config(int setting, const std::string& cell, double scale,
                           std::uint64_t root_seed, int replication) {
    if (!(scale > 0.0)) throw std::invalid_argument("benchmark: scale must be positive");
    ScenarioConfig cfg;
    cfg.L = 3;
    cfg.apply_pair_preset(0.06);

    const auto scaled = [scale](int v) {
        return std::max(2, static_cast<int>(std::llround(v * scale)));
    };
    int K = 50;
    if (setting == 1) {
        cfg.L = std::stoi(cell.substr(2));
    } else if (setting == 2) {
        cfg.kappa = std::stod(cell.substr(6));
    } else if (setting == 3) {
        K = std::stoi(cell.substr(2));
    } else if (setting == 4) {
        cfg.apply_pair_preset(std::stod(cell.substr(6)) / 100.0);
    } else {
        throw std::invalid_argument("benchmark: setting must be in {1, 2, 3, 4}");
    }
    cfg.n = std::max(20, static_cast<int>(std::llround(1000 * scale)));
    cfg.K = scaled(K);
    // seeds are keyed by replication only, so cells share random numbers
    cfg.seed = substream(root_seed, static_cast<std::uint64_t>(replication));
    cfg.validate();
    return cfg;
}

BenchmarkResult run_benchmark(const BenchmarkOptions& opts) {
    if (opts.replications < 1)
        throw std::invalid_argument("benchmark: replications must be positive");
    if (opts.threads < 1) throw std::invalid_argument("benchmark: threads must be positive");
    const auto cells = benchmark_cells(opts.setting);

    struct Task {
        size_t cell_idx;
        int replication;
    };
    std::vector<Task> tasks;
    for (size_t c = 0; c < cells.size(); ++c)
        for (int rep = 0; rep < opts.replications; ++rep) tasks.push_back({c, rep});

    struct Slot {
        bool failed = false;
        bool converged = true;
        std::uint64_t seed = 0;
        std::vector<EvalReport> reports;
    };
    std::vector<Slot> slots(tasks.size());

    auto worker = [&](std::atomic<size_t>& next) {
        while (true) {
            const size_t t = next.fetch_add(1);
            if (t >= tasks.size()) break;
            const Task& task = tasks[t];
            Slot& slot = slots[t];
            try {
                ScenarioConfig cfg = cell_config(opts.setting, cells[task.cell_idx], opts.scale,
                                                 opts.seed, task.replication);
                slot.seed = cfg.seed;
                FitConfig fit_cfg;
                fit_cfg.weights = opts.weights;
                if (opts.grid_search) {
                    Scenario probe = generate_scenario(cfg);
                    fit_cfg.weights = select_weights_grid(probe, fit_cfg);
                }
                ReplicationOutcome outc = run_replication(cfg, fit_cfg, task.replication);
                slot.converged = outc.converged;
                slot.reports = std::move(outc.reports);
            } catch (const std::exception&) {
                slot.failed = true;  // recorded below; the sweep continues
            }
        }
    };

    std::atomic<size_t> next{0};
    if (opts.threads == 1) {
        worker(next);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < opts.threads; ++t) pool.emplace_back([&] { worker(next); });
        for (auto& th : pool) th.join();
    }

    // fixed-order assembly keeps the output identical for any thread count
    BenchmarkResult res;
    for (size_t t = 0; t < tasks.size(); ++t) {
        const Task& task = tasks[t];
        const Slot& slot = slots[t];
        res.statuses.push_back(
            {cells[task.cell_idx], task.replication, !slot.failed && slot.converged});
        if (slot.failed) continue;
        for (const auto& report : slot.reports)
            for (const auto& [metric, value] : report.metrics)
                res.rows.push_back({opts.setting, cells[task.cell_idx], task.replication,
                                    slot.seed, report.method, metric, value});
    }
    return res;
}

CompositeWeights select_weights_grid(const Scenario& sc, const FitConfig& base_cfg) {
    if (sc.eval_pairs.sim.empty() && sc.eval_pairs.rel.empty())
        throw std::invalid_argument("grid search: no held-out pairs to score on");
    const double grid[] = {0.1, 1.0, 10.0};
    CompositeWeights best_w;
    double best_score = -std::numeric_limits<double>::infinity();
    for (double wv : grid)
        for (double ws : grid)
            for (double wr : grid) {
                FitConfig cfg = base_cfg;
                cfg.weights = {wv, ws, wr};
                FitResult fit = fit_alignment(sc.universe, sc.priors, sc.pairs, cfg);
                double score = 0.0;
                int parts = 0;
                EvalReport scratch;
                try_auc(scratch, "s", score_pairs_cosine(fit.state.V, sc.eval_pairs.sim),
                        sc.eval_pairs.sim);
                try_auc(scratch, "r",
                        score_pairs_bilinear(fit.state.V, fit.state.R, sc.eval_pairs.rel),
                        sc.eval_pairs.rel);
                for (const auto& [k, v] : scratch.metrics) {
                    score += v;
                    ++parts;
                }
                if (parts == 0) continue;
                score /= parts;
                if (score > best_score) {
                    best_score = score;
                    best_w = cfg.weights;
                }
            }
    if (!(best_score > -std::numeric_limits<double>::infinity()))
        throw std::invalid_argument("grid search: no candidate produced a valid score");
    return best_w;
}

std::string rows_to_csv(const std::vector<BenchmarkRow>& rows) {
    std::ostringstream out;
    out << "setting,cell,replication,seed,method,metric,value\n";
    for (const auto& r : rows)
        out << r.setting << ',' << r.cell << ',' << r.replication << ',' << r.seed << ','
            << r.method << ',' << r.metric << ',' << format_double(r.value) << "\n";
    return out.str();
}

std::string summarize_to_csv(const std::vector<BenchmarkRow>& rows) {
    // group rows by (setting, cell, method, metric) preserving first-seen order
    std::vector<std::tuple<int, std::string, std::string, std::string>> keys;
    std::vector<std::vector<double>> groups;
    for (const auto& r : rows) {
        auto key = std::make_tuple(r.setting, r.cell, r.method, r.metric);
        size_t g = 0;
        for (; g < keys.size(); ++g)
            if (keys[g] == key) break;
        if (g == keys.size()) {
            keys.push_back(key);
            groups.emplace_back();
        }
        groups[g].push_back(r.value);
    }
    auto quantile = [](std::vector<double>& v, double q) {
        std::sort(v.begin(), v.end());
        const double pos = q * (v.size() - 1);
        const size_t lo = static_cast<size_t>(pos);
        const size_t hi = std::min(lo + 1, v.size() - 1);
        const double frac = pos - lo;
        return v[lo] * (1.0 - frac) + v[hi] * frac;
    };
    std::ostringstream out;
    out << "setting,cell,method,metric,median,q25,q75,n\n";
    for (size_t g = 0; g < keys.size(); ++g) {
        auto& v = groups[g];
        const auto& [setting, cell, method, metric] = keys[g];
        out << setting << ',' << cell << ',' << method << ',' << metric << ','
            << format_double(quantile(v, 0.5)) << ',' << format_double(quantile(v, 0.25)) << ','
            << format_double(quantile(v, 0.75)) << ',' << v.size() << "\n";
    }
    return out.str();
}

}  // namespace spheremix
