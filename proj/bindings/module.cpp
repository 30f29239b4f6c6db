#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <tuple>

#include "spheremix/baselines.hpp"
#include "spheremix/benchmark.hpp"
#include "spheremix/directional.hpp"
#include "spheremix/fit.hpp"
#include "spheremix/io.hpp"
#include "spheremix/metrics.hpp"
#include "spheremix/synth.hpp"

namespace py = pybind11;
using namespace spheremix;

namespace {

using PairTuple = std::tuple<int, int, int>;

RelationalPairSet pairs_from_lists(const std::vector<PairTuple>& sim,
                                   const std::vector<PairTuple>& rel, int n) {
    RelationalPairSet out;
    for (const auto& [i, j, label] : sim) out.add(Channel::similarity, i, j, label, n);
    for (const auto& [i, j, label] : rel) out.add(Channel::relatedness, i, j, label, n);
    return out;
}

FeatureUniverse universe_from_lists(
    const std::vector<std::pair<std::vector<int>, Eigen::MatrixXd>>& sources, int n) {
    FeatureUniverse u;
    u.n = n;
    int sid = 0;
    for (const auto& [ids, m] : sources) {
        SourceSet s;
        s.source_id = sid++;
        s.feature_ids = ids;
        s.embeddings = m;
        u.sources.push_back(std::move(s));
    }
    u.validate(false);
    return u;
}

FitConfig fit_config_from_optional_json(const std::string& text) {
    return text.empty() ? FitConfig{} : fit_config_from_json(text);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "joint alignment of multi-source embeddings with spherical synonym clustering";
    m.attr("__version__") = kToolVersion;

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);

    // directional numerics
    m.def("log_bessel_i", &log_bessel_i, py::arg("nu"), py::arg("x"),
          "log of the modified Bessel function of the first kind");
    m.def("vmf_log_normalizer", &vmf_log_normalizer, py::arg("r"), py::arg("kappa"));
    m.def("mean_resultant_ratio", &mean_resultant_ratio, py::arg("r"), py::arg("kappa"));
    m.def("concentration_from_resultant", &concentration_from_resultant, py::arg("r"),
          py::arg("rbar"));
    m.def("sample_vmf", &sample_vmf, py::arg("mu"), py::arg("kappa"), py::arg("count"),
          py::arg("seed"), "rows are unit-norm draws; bit-stable given the seed");
    m.def(
        "spherical_kmeans",
        [](const Eigen::MatrixXd& points, int K, std::uint64_t seed, int max_iter) {
            SphericalKmeansResult res = spherical_kmeans(points, K, seed, max_iter);
            return py::make_tuple(res.centers, res.labels, res.objective, res.iterations);
        },
        py::arg("points"), py::arg("K"), py::arg("seed"), py::arg("max_iter") = 100,
        "returns (centers, labels, sum_of_cosines, iterations)");

    // scenario generation
    py::class_<Scenario, std::shared_ptr<Scenario>>(m, "Scenario")
        .def_property_readonly("n", [](const Scenario& s) { return s.config.n; })
        .def_property_readonly("config_json",
                               [](const Scenario& s) { return scenario_config_to_json(s.config); })
        .def_property_readonly("truth_v", [](const Scenario& s) { return s.truth.V; })
        .def_property_readonly("truth_mu", [](const Scenario& s) { return s.truth.mu; })
        .def_property_readonly("truth_z", [](const Scenario& s) { return s.truth.z; })
        .def_property_readonly("truth_r", [](const Scenario& s) { return s.truth.R; })
        .def_property_readonly("anchor_clusters",
                               [](const Scenario& s) { return s.truth.anchor_clusters; })
        .def_property_readonly("eval_features",
                               [](const Scenario& s) { return s.truth.eval_features; })
        .def("sources",
             [](const Scenario& s) {
                 py::list out;
                 for (const auto& src : s.universe.sources)
                     out.append(py::make_tuple(src.feature_ids, src.embeddings));
                 return out;
             })
        .def("pairs",
             [](const Scenario& s) {
                 auto dump = [](const std::vector<LabeledPair>& ps) {
                     py::list out;
                     for (const auto& p : ps) out.append(py::make_tuple(p.i, p.j, p.label));
                     return out;
                 };
                 return py::make_tuple(dump(s.pairs.sim), dump(s.pairs.rel));
             })
        .def("eval_pairs",
             [](const Scenario& s) {
                 auto dump = [](const std::vector<LabeledPair>& ps) {
                     py::list out;
                     for (const auto& p : ps) out.append(py::make_tuple(p.i, p.j, p.label));
                     return out;
                 };
                 return py::make_tuple(dump(s.eval_pairs.sim), dump(s.eval_pairs.rel));
             })
        .def("priors_dense", [](const Scenario& s) { return s.priors.dense(); });

    m.def(
        "simulate",
        [](const std::string& config_json) {
            auto sc = std::make_shared<Scenario>(
                generate_scenario(scenario_config_from_json(config_json)));
            return sc;
        },
        py::arg("config_json") = "{}");

    // fitting
    py::class_<FitResult, std::shared_ptr<FitResult>>(m, "FitResult")
        .def_property_readonly("v", [](const FitResult& f) { return f.state.V; })
        .def_property_readonly("mu", [](const FitResult& f) { return f.state.mu; })
        .def_property_readonly("kappa", [](const FitResult& f) { return f.state.kappa; })
        .def_property_readonly("beta1", [](const FitResult& f) { return f.state.beta1; })
        .def_property_readonly("beta2", [](const FitResult& f) { return f.state.beta2; })
        .def_property_readonly("beta3", [](const FitResult& f) { return f.state.beta3; })
        .def_property_readonly("r_matrix", [](const FitResult& f) { return f.state.R; })
        .def_property_readonly("labels", [](const FitResult& f) { return f.state.z; })
        .def_property_readonly("converged", [](const FitResult& f) { return f.converged; })
        .def_property_readonly("loadings",
                               [](const FitResult& f) {
                                   py::list out;
                                   for (const auto& w : f.state.W) out.append(w);
                                   return out;
                               })
        .def_property_readonly("composite_trace", [](const FitResult& f) {
            std::vector<double> trace;
            for (const auto& rec : f.trace.outer) trace.push_back(rec.composite);
            return trace;
        });

    m.def(
        "fit",
        [](std::shared_ptr<Scenario> sc, const std::string& config_json) {
            FitConfig cfg = fit_config_from_optional_json(config_json);
            cfg.r = sc->config.r;
            cfg.K = sc->config.K;
            return std::make_shared<FitResult>(
                fit_alignment(sc->universe, sc->priors, sc->pairs, cfg));
        },
        py::arg("scenario"), py::arg("config_json") = "");

    m.def(
        "fit_raw",
        [](const std::vector<std::pair<std::vector<int>, Eigen::MatrixXd>>& sources, int n,
           const std::vector<int>& prior_rows, const std::vector<int>& prior_cols,
           const std::vector<double>& prior_probs, int K, const std::vector<PairTuple>& sim,
           const std::vector<PairTuple>& rel, const std::string& config_json) {
            FeatureUniverse u = universe_from_lists(sources, n);
            PriorMatrix priors(n, K, prior_rows, prior_cols, prior_probs);
            RelationalPairSet pairs = pairs_from_lists(sim, rel, n);
            FitConfig cfg = fit_config_from_optional_json(config_json);
            cfg.K = K;
            return std::make_shared<FitResult>(fit_alignment(u, priors, pairs, cfg));
        },
        py::arg("sources"), py::arg("n"), py::arg("prior_rows"), py::arg("prior_cols"),
        py::arg("prior_probs"), py::arg("K"), py::arg("sim_pairs"), py::arg("rel_pairs"),
        py::arg("config_json") = "");

    m.def(
        "evaluate",
        [](std::shared_ptr<FitResult> fit, std::shared_ptr<Scenario> sc) {
            EvalReport rep = evaluate_against_truth("spheremix", 0, fit->state.V,
                                                    &fit->state.mu, &fit->state.R,
                                                    fit->state.z, *sc);
            return rep.metrics;
        },
        py::arg("fit_result"), py::arg("scenario"));

    // baselines on raw sources
    m.def(
        "svd_concat_embed",
        [](const std::vector<std::pair<std::vector<int>, Eigen::MatrixXd>>& sources, int n,
           int r) { return svd_concat_embed(universe_from_lists(sources, n), r); },
        py::arg("sources"), py::arg("n"), py::arg("r"));
    m.def(
        "kmeans_euclidean",
        [](const Eigen::MatrixXd& points, int K, std::uint64_t seed, int restarts) {
            KmeansResult res = kmeans_euclidean(points, K, seed, restarts);
            return py::make_tuple(res.centers, res.labels, res.objective);
        },
        py::arg("points"), py::arg("K"), py::arg("seed"), py::arg("restarts") = 10);
    m.def("hclust_average_cosine", &hclust_average_cosine, py::arg("points"), py::arg("K"));

    // metrics
    m.def("rel_acc", &rel_acc, py::arg("est"), py::arg("truth"));
    m.def("adjusted_mutual_information", &adjusted_mutual_information, py::arg("a"),
          py::arg("b"));
    m.def("auc", &auc, py::arg("scores"), py::arg("labels"));
}
