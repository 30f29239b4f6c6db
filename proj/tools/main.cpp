#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "spheremix/cli.hpp"
#include "spheremix/io.hpp"

namespace {

// --weights w_vmf,w_sim,w_rel
spheremix::CompositeWeights parse_weights(const std::string& s) {
    const auto c1 = s.find(',');
    const auto c2 = s.find(',', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw spheremix::InputError("--weights expects three comma-separated values");
    spheremix::CompositeWeights w;
    w.vmf = spheremix::parse_double(s.substr(0, c1));
    w.sim = spheremix::parse_double(s.substr(c1 + 1, c2 - c1 - 1));
    w.rel = spheremix::parse_double(s.substr(c2 + 1));
    w.validate();
    return w;
}

void add_common(CLI::App* cmd, spheremix::CliOptions& opts, std::string& weights,
                std::uint64_t& seed, bool& has_seed) {
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--seed", seed, "root RNG seed")->each([&](const std::string&) {
        has_seed = true;
    });
    cmd->add_option("--weights", weights, "composite weights w_vmf,w_sim,w_rel");
    cmd->add_flag("--grid-search", opts.grid_search,
                  "select weights over {0.1,1,10}^3 by held-out AUC");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spheremix: multi-source embedding alignment with synonym clustering"};
    app.require_subcommand(1);

    spheremix::CliOptions opts;
    std::string weights;
    std::uint64_t seed = 0;
    bool has_seed = false;

    CLI::App* simulate = app.add_subcommand("simulate", "generate a synthetic scenario");
    simulate->add_option("--config", opts.config_path, "scenario config JSON");
    simulate->add_option("--reps", opts.replications, "independent scenario replications");
    add_common(simulate, opts, weights, seed, has_seed);

    CLI::App* fit = app.add_subcommand("fit", "fit the alignment model to a data directory");
    fit->add_option("--config", opts.config_path, "fit config JSON");
    fit->add_option("--data", opts.data_dir, "input data directory")->required();
    add_common(fit, opts, weights, seed, has_seed);

    CLI::App* evaluate = app.add_subcommand("evaluate", "score a fitted model against truth");
    evaluate->add_option("--model", opts.model_dir, "fitted model directory")->required();
    evaluate->add_option("--data", opts.data_dir, "scenario or truth directory")->required();
    add_common(evaluate, opts, weights, seed, has_seed);

    CLI::App* benchmark = app.add_subcommand("benchmark", "run a simulation sweep");
    benchmark->add_option("--setting", opts.setting, "sweep id: 1=L 2=kappa 3=K 4=pair%");
    benchmark->add_option("--scale", opts.scale, "problem size multiplier on n and K");
    benchmark->add_option("--reps", opts.replications, "replications per cell");
    benchmark->add_option("--threads", opts.threads, "parallel replication workers");
    add_common(benchmark, opts, weights, seed, has_seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);  // --help / --version
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return spheremix::kExitInputError;
    }

    try {
        if (has_seed) opts.seed = seed;
        if (!weights.empty()) opts.weights = parse_weights(weights);
        if (simulate->parsed()) return spheremix::cmd_simulate(opts);
        if (fit->parsed()) return spheremix::cmd_fit(opts);
        if (evaluate->parsed()) return spheremix::cmd_evaluate(opts);
        return spheremix::cmd_benchmark(opts);
    } catch (const spheremix::InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return spheremix::kExitInputError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return spheremix::kExitInputError;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return spheremix::kExitInternalError;
    }
}
