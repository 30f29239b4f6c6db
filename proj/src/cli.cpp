#include "spheremix/cli.hpp"

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>

#include "spheremix/baselines.hpp"
#include "spheremix/benchmark.hpp"
#include "spheremix/io.hpp"
#include "spheremix/rng.hpp"

namespace spheremix {

namespace fs = std::filesystem;

namespace {

ScenarioConfig load_scenario_config(const CliOptions& opts) {
    ScenarioConfig cfg;
    if (!opts.config_path.empty())
        cfg = scenario_config_from_json(read_text_file(opts.config_path));
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

FitConfig load_fit_config(const CliOptions& opts) {
    FitConfig cfg;
    if (!opts.config_path.empty())
        cfg = fit_config_from_json(read_text_file(opts.config_path));
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.weights) cfg.weights = *opts.weights;
    cfg.validate();
    return cfg;
}

// scenario dirs keep sources under sources/, plain data dirs at the top level
fs::path locate_sources(const fs::path& data_dir) {
    if (fs::exists(data_dir / "sources" / "source_0.csv")) return data_dir / "sources";
    if (fs::exists(data_dir / "source_0.csv")) return data_dir;
    throw InputError("no source_<l>.csv under " + data_dir.string() + " or its sources/");
}

void print_metric_table(const std::string& method,
                        const std::map<std::string, double>& metrics) {
    std::cout << "method: " << method << "\n";
    for (const auto& [name, value] : metrics)
        std::cout << "  " << std::left << std::setw(18) << name << format_double(value) << "\n";
}

}  // namespace

int cmd_simulate(const CliOptions& opts) {
    if (opts.out_dir.empty()) throw InputError("simulate: --out is required");
    if (opts.replications < 1) throw InputError("simulate: --reps must be positive");
    ScenarioConfig cfg = load_scenario_config(opts);

    RunManifest manifest;
    manifest.command = "simulate";
    manifest.digest = config_digest(scenario_config_to_json(cfg));
    for (int rep = 0; rep < opts.replications; ++rep) {
        ScenarioConfig rep_cfg = cfg;
        if (opts.replications > 1) rep_cfg.seed = substream(cfg.seed, rep);
        const fs::path dir = opts.replications == 1
                                 ? fs::path(opts.out_dir)
                                 : fs::path(opts.out_dir) / ("rep_" + std::to_string(rep));
        Scenario sc = generate_scenario(rep_cfg);
        write_scenario(dir, sc);
        manifest.seeds.push_back(rep_cfg.seed);
        manifest.replications.push_back({rep, "ok", {dir.string()}});
    }
    write_manifest(fs::path(opts.out_dir) / "manifest.json", manifest);
    return kExitOk;
}

int cmd_fit(const CliOptions& opts) {
    if (opts.data_dir.empty()) throw InputError("fit: --data is required");
    if (opts.out_dir.empty()) throw InputError("fit: --out is required");
    FitConfig cfg = load_fit_config(opts);

    const fs::path data(opts.data_dir);
    FeatureUniverse universe = read_universe(locate_sources(data), false);

    RelationalPairSet pairs;
    if (fs::exists(data / "pairs.csv")) {
        pairs = read_pairs_csv(data / "pairs.csv", universe.n);
    } else if (cfg.weights.sim > 0.0 || cfg.weights.rel > 0.0) {
        throw InputError(
            "fit: pairs.csv not found but w_sim/w_rel are positive; provide pairs or set "
            "both weights to zero");
    }

    PriorMatrix priors;
    if (fs::exists(data / "priors.csv")) {
        if (cfg.K > 0) {
            priors = read_priors_csv(data / "priors.csv", universe.n, cfg.K);
        } else {
            // infer K from the largest cluster id in the file
            PriorMatrix probe = read_priors_csv(data / "priors.csv", universe.n,
                                                std::numeric_limits<int>::max());
            int max_k = -1;
            for (int i = 0; i < probe.rows(); ++i)
                for (int pos = probe.support_begin(i); pos < probe.support_end(i); ++pos)
                    max_k = std::max(max_k, probe.cluster_at(pos));
            priors = read_priors_csv(data / "priors.csv", universe.n, max_k + 1);
        }
    } else {
        if (cfg.K < 1)
            throw InputError("fit: priors.csv not found; supply it or set K in the fit config");
        priors = PriorMatrix::uniform(universe.n, cfg.K);
    }

    if (opts.grid_search) {
        if (!fs::exists(data / "eval_pairs.csv"))
            throw InputError("fit: --grid-search needs eval_pairs.csv under the data dir");
        Scenario probe;
        probe.universe = universe;
        probe.pairs = pairs;
        probe.priors = priors;
        probe.eval_pairs = read_pairs_csv(data / "eval_pairs.csv", universe.n);
        cfg.weights = select_weights_grid(probe, cfg);
        std::cout << "grid-search weights: vmf=" << format_double(cfg.weights.vmf)
                  << " sim=" << format_double(cfg.weights.sim)
                  << " rel=" << format_double(cfg.weights.rel) << "\n";
    }

    FitResult fit = fit_alignment(universe, priors, pairs, cfg);

    const fs::path out(opts.out_dir);
    write_model(out / "model", fit.state, cfg.weights);
    write_trace_csv(out / "trace.csv", fit.trace);

    RunManifest manifest;
    manifest.command = "fit";
    manifest.digest = config_digest(fit_config_to_json(cfg));
    manifest.seeds.push_back(cfg.seed);
    manifest.replications.push_back({0, fit.converged ? "ok" : "nonconverged",
                                     {(out / "model").string(), (out / "trace.csv").string()}});
    write_manifest(out / "manifest.json", manifest);

    if (!fit.converged) {
        std::cerr << "fit: outer loop hit max_outer before tolerance; model written anyway\n";
        return kExitNonConverged;
    }
    return kExitOk;
}

int cmd_evaluate(const CliOptions& opts) {
    if (opts.model_dir.empty()) throw InputError("evaluate: --model is required");
    if (opts.data_dir.empty()) throw InputError("evaluate: --data is required");
    if (opts.out_dir.empty()) throw InputError("evaluate: --out is required");

    ModelState model = read_model(opts.model_dir);
    const fs::path data(opts.data_dir);
    const fs::path truth = fs::exists(data / "truth") ? data / "truth" : data;

    std::map<std::string, double> metrics;
    std::optional<ProcrustesResult> pro;

    if (fs::exists(truth / "V.csv")) {
        Eigen::MatrixXd v_true = read_matrix_csv(truth / "V.csv", "feature_id").second;
        if (v_true.rows() != model.V.rows() || v_true.cols() != model.V.cols())
            throw InputError("evaluate: model V and truth V shapes disagree");
        metrics["rel_acc_v"] = rel_acc(model.V, v_true);
        pro = procrustes_align(model.V, v_true);
        metrics["procrustes_mse_v"] = pro->mean_square_error;
        if (fs::exists(truth / "mu.csv")) {
            Eigen::MatrixXd mu_true = read_matrix_csv(truth / "mu.csv", "cluster_id").second;
            if (mu_true.rows() != model.mu.rows() || mu_true.cols() != model.mu.cols())
                throw InputError("evaluate: model mu and truth mu shapes disagree");
            Eigen::MatrixXd mu_rot = model.mu * pro->rotation;
            PermutationResult perm = permutation_align(mu_rot, mu_true);
            metrics["rel_acc_mu"] = rel_acc(perm.aligned, mu_true);
            metrics["perm_mse_mu"] = perm.mean_square_error;
        }
    }

    if (!fs::exists(truth / "z.csv"))
        throw InputError("evaluate: truth labels z.csv not found under " + truth.string());
    Eigen::VectorXi z_true = read_labels_csv(truth / "z.csv", "feature_id").second;
    if (z_true.size() != model.z.size())
        throw InputError("evaluate: label counts disagree");
    metrics["ami_all"] = adjusted_mutual_information(model.z, z_true);
    if (fs::exists(truth / "eval_features.csv")) {
        // bare id list: "feature_id" header, one id per line
        std::vector<int> ids;
        std::istringstream in(read_text_file(truth / "eval_features.csv"));
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (!line.empty()) ids.push_back(std::stoi(line));
        }
        if (!ids.empty()) {
            Eigen::VectorXi est(static_cast<int>(ids.size())), tru(static_cast<int>(ids.size()));
            for (size_t t = 0; t < ids.size(); ++t) {
                if (ids[t] < 0 || ids[t] >= model.z.size())
                    throw InputError("evaluate: eval feature id out of range");
                est[static_cast<int>(t)] = model.z[ids[t]];
                tru[static_cast<int>(t)] = z_true[ids[t]];
            }
            metrics["ami"] = adjusted_mutual_information(est, tru);
        }
    }

    if (fs::exists(data / "eval_pairs.csv")) {
        RelationalPairSet ev = read_pairs_csv(data / "eval_pairs.csv", model.n());
        auto add_auc = [&metrics](const std::string& name, const std::vector<double>& scores,
                                  const std::vector<LabeledPair>& ps) {
            if (ps.empty()) return;
            std::vector<int> labels;
            for (const auto& p : ps) labels.push_back(p.label);
            try {
                metrics[name] = auc(scores, labels);
            } catch (const std::invalid_argument&) {
            }
        };
        add_auc("auc_sim", score_pairs_cosine(model.V, ev.sim), ev.sim);
        add_auc("auc_rel", score_pairs_bilinear(model.V, model.R, ev.rel), ev.rel);
    }

    const fs::path out(opts.out_dir);
    fs::create_directories(out);
    std::string csv = "method,metric,value\n";
    for (const auto& [name, value] : metrics)
        csv += "model," + name + "," + format_double(value) + "\n";
    write_text_file(out / "evaluation.csv", csv);
    print_metric_table("model", metrics);
    return kExitOk;
}

int cmd_benchmark(const CliOptions& opts) {
    if (opts.out_dir.empty()) throw InputError("benchmark: --out is required");
    BenchmarkOptions bopts;
    bopts.setting = opts.setting;
    bopts.scale = opts.scale;
    bopts.replications = opts.replications;
    bopts.threads = opts.threads;
    bopts.seed = opts.seed.value_or(0);
    if (opts.weights) bopts.weights = *opts.weights;
    bopts.grid_search = opts.grid_search;
    benchmark_cells(bopts.setting);  // validates the setting id before any work

    BenchmarkResult res = run_benchmark(bopts);

    const fs::path out(opts.out_dir);
    fs::create_directories(out);
    write_text_file(out / "results.csv", rows_to_csv(res.rows));
    write_text_file(out / "summary.csv", summarize_to_csv(res.rows));

    RunManifest manifest;
    manifest.command = "benchmark";
    {
        std::string key = "{\"grid_search\":" + std::string(bopts.grid_search ? "true" : "false") +
                          ",\"replications\":" + std::to_string(bopts.replications) +
                          ",\"scale\":" + format_double(bopts.scale) +
                          ",\"seed\":" + std::to_string(bopts.seed) +
                          ",\"setting\":" + std::to_string(bopts.setting) +
                          ",\"weights\":[" + format_double(bopts.weights.vmf) + "," +
                          format_double(bopts.weights.sim) + "," +
                          format_double(bopts.weights.rel) + "]}";
        manifest.digest = config_digest(key);
    }
    int failed = 0;
    for (size_t t = 0; t < res.statuses.size(); ++t) {
        const auto& st = res.statuses[t];
        manifest.seeds.push_back(substream(bopts.seed, st.replication));
        manifest.replications.push_back({static_cast<int>(t),
                                         st.converged ? "ok" : "nonconverged",
                                         {st.cell + "/rep" + std::to_string(st.replication)}});
        if (!st.converged) ++failed;
    }
    write_manifest(out / "manifest.json", manifest);

    std::cout << "benchmark: " << res.statuses.size() - failed << "/" << res.statuses.size()
              << " replications converged; results in " << (out / "results.csv").string()
              << "\n";
    if (res.rows.empty()) {
        std::cerr << "benchmark: every replication failed\n";
        return kExitInternalError;
    }
    return kExitOk;
}

}  // namespace spheremix
