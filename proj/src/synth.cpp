#include "spheremix/synth.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "spheremix/directional.hpp"
#include "spheremix/rng.hpp"

namespace spheremix {

namespace {

// substream tags for the independent random blocks of a scenario
constexpr std::uint64_t kTagZ = 0x01, kTagMu = 0x02, kTagV = 0x03, kTagW = 0x10,
                        kTagEmbed = 0x20, kTagPairs = 0x30, kTagAnchor = 0x40,
                        kTagPrior = 0x50;

double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// partial Fisher-Yates: deterministically picks `take` entries to the front
void shuffle_prefix(std::vector<int>& v, size_t take, Rng& rng) {
    const size_t m = std::min(take, v.size());
    for (size_t t = 0; t < m; ++t) {
        size_t pick = t + static_cast<size_t>(
                              rng.uniform_int(0, static_cast<std::int64_t>(v.size() - t - 1)));
        std::swap(v[t], v[pick]);
    }
}

}  // namespace

void ScenarioConfig::validate() const {
    if (n < 2) throw std::invalid_argument("scenario: n must be >= 2");
    if (K < 1 || K > n) throw std::invalid_argument("scenario: K must be in [1, n]");
    if (r < 2) throw std::invalid_argument("scenario: r must be >= 2");
    if (!(kappa > 0.0)) throw std::invalid_argument("scenario: kappa must be positive");
    if (L < 1 || L > 4) throw std::invalid_argument("scenario: L must be in [1, 4]");
    if (source_dim < r) throw std::invalid_argument("scenario: source_dim must be >= r");
    if (!(source_concentration > 0.0))
        throw std::invalid_argument("scenario: source concentration must be positive");
    if (!(w_sd >= 0.0) || !(mu_sd >= 0.0))
        throw std::invalid_argument("scenario: sds must be nonnegative");
    if (!r_diag.empty() && static_cast<int>(r_diag.size()) != r)
        throw std::invalid_argument("scenario: r_diag size must equal r");
    for (double p : {sim_pos_pct, sim_neg_pct, rel_pos_pct, rel_neg_pct, eval_pair_pct})
        if (!(p >= 0.0) || p > 1.0)
            throw std::invalid_argument("scenario: pair percentages must lie in [0, 1]");
    if (!(anchor_fraction > 0.0) || anchor_fraction > 1.0)
        throw std::invalid_argument("scenario: anchor_fraction must lie in (0, 1]");
    if (!(gaussian_sd > 0.0))
        throw std::invalid_argument("scenario: gaussian_sd must be positive");
}

void ScenarioConfig::apply_pair_preset(double total_pct) {
    if (!(total_pct / 2.0 > 0.005))
        throw std::invalid_argument("pair preset: total percentage too small");
    sim_pos_pct = rel_pos_pct = total_pct / 2.0 - 0.005;
    sim_neg_pct = rel_neg_pct = total_pct / 2.0 + 0.005;
}

std::vector<std::pair<int, int>> source_windows(int n, int L) {
    if (L < 1 || L > 4) throw std::invalid_argument("source_windows: L must be in [1, 4]");
    std::vector<std::pair<int, int>> w = {
        {0, n}, {0, n / 2}, {(3 * n) / 10, (8 * n) / 10}, {n / 2, n}};
    w.resize(L);
    return w;
}

RelationalPairSet generate_relational_pairs(const ScenarioConfig& cfg, const ScenarioTruth& truth,
                                            const Eigen::MatrixXd& first_source,
                                            std::uint64_t seed, RelationalPairSet* eval_pairs) {
    const int n = cfg.n;
    if (first_source.rows() != n)
        throw std::invalid_argument("pairs: first source must cover every feature");
    const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;

    // cosine of first-source embeddings ranks the hard negatives
    Eigen::MatrixXd fs = normalize_rows(first_source);
    Eigen::MatrixXd cos_fs = fs * fs.transpose();

    Eigen::MatrixXd mu_gram = truth.mu * truth.mu.transpose();
    Eigen::MatrixXd rel_score = truth.V * truth.R * truth.V.transpose();

    RelationalPairSet out;
    for (int c = 0; c < 2; ++c) {
        const Channel ch = c == 0 ? Channel::similarity : Channel::relatedness;
        const double pos_pct = c == 0 ? cfg.sim_pos_pct : cfg.rel_pos_pct;
        const double neg_pct = c == 0 ? cfg.sim_neg_pct : cfg.rel_neg_pct;

        // true labels at the generating model, one Bernoulli per unordered pair
        Rng label_rng(substream(seed, 3 * c));
        std::vector<char> label(static_cast<size_t>(n) * n, 0);
        std::vector<int> positives, negatives;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                const double t = c == 0
                                     ? truth.beta1 + truth.beta2 * mu_gram(truth.z[i], truth.z[j])
                                     : truth.beta3 + rel_score(i, j);
                const bool pos = label_rng.uniform() < sigmoid(t);
                const int id = i * n + j;
                label[id] = pos ? 1 : 0;
                (pos ? positives : negatives).push_back(id);
            }

        const auto want_pos = static_cast<size_t>(std::llround(pos_pct * total));
        const auto want_neg = static_cast<size_t>(std::llround(neg_pct * total));
        if (want_pos > positives.size() || want_neg > negatives.size())
            throw std::invalid_argument("pairs: requested more pairs than the model generated");

        Rng pick_rng(substream(seed, 3 * c + 1));
        shuffle_prefix(positives, want_pos, pick_rng);

        // hard negatives: highest first-source cosine, ties to the lowest (i, j)
        std::sort(negatives.begin(), negatives.end(), [&](int a, int b) {
            const double ca = cos_fs(a / n, a % n), cb = cos_fs(b / n, b % n);
            if (ca != cb) return ca > cb;
            return a < b;
        });

        std::vector<char> taken(static_cast<size_t>(n) * n, 0);
        for (size_t t = 0; t < want_pos; ++t) {
            out.add(ch, positives[t] / n, positives[t] % n, 1, n);
            taken[positives[t]] = 1;
        }
        for (size_t t = 0; t < want_neg; ++t) {
            out.add(ch, negatives[t] / n, negatives[t] % n, 0, n);
            taken[negatives[t]] = 1;
        }

        if (eval_pairs != nullptr && cfg.eval_pair_pct > 0.0) {
            std::vector<int> rest;
            rest.reserve(static_cast<size_t>(total) - want_pos - want_neg);
            for (int i = 0; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (!taken[i * n + j]) rest.push_back(i * n + j);
            const auto want_eval = std::min(
                static_cast<size_t>(std::llround(cfg.eval_pair_pct * total)), rest.size());
            Rng eval_rng(substream(seed, 3 * c + 2));
            shuffle_prefix(rest, want_eval, eval_rng);
            for (size_t t = 0; t < want_eval; ++t)
                eval_pairs->add(ch, rest[t] / n, rest[t] % n, label[rest[t]], n);
        }
    }
    return out;
}

PriorMatrix build_anchor_priors(const ScenarioConfig& cfg, const Eigen::VectorXi& z,
                                const std::vector<int>& anchor_clusters,
                                const std::vector<LabeledPair>* candidate_pairs,
                                std::uint64_t seed) {
    const int n = static_cast<int>(z.size());
    const int K = cfg.K;
    std::vector<char> is_anchor(K, 0);
    for (int k : anchor_clusters) {
        if (k < 0 || k >= K) throw std::invalid_argument("priors: anchor cluster out of range");
        is_anchor[k] = 1;
    }
    std::vector<int> non_anchor;
    for (int k = 0; k < K; ++k)
        if (!is_anchor[k]) non_anchor.push_back(k);

    std::vector<int> eval_features;
    for (int i = 0; i < n; ++i)
        if (!is_anchor[z[i]]) eval_features.push_back(i);

    if (non_anchor.empty() && !eval_features.empty())
        throw std::logic_error("priors: features outside anchor clusters but none available");
    if (non_anchor.empty())
        std::cerr << "warning: every cluster is anchored; evaluation set is empty\n";

    std::vector<int> row, col;
    std::vector<double> prob;
    for (int i = 0; i < n; ++i)
        if (is_anchor[z[i]]) {
            row.push_back(i);
            col.push_back(z[i]);
            prob.push_back(1.0);
        }

    // soft rows for features in non-anchor clusters
    const int m = static_cast<int>(eval_features.size());
    bool spectral = candidate_pairs != nullptr && !candidate_pairs->empty() && m > 0;
    Eigen::MatrixXd soft;  // m x |non_anchor| when spectral
    if (spectral) {
        std::vector<int> local(n, -1);
        for (int t = 0; t < m; ++t) local[eval_features[t]] = t;
        Eigen::MatrixXd adj = Eigen::MatrixXd::Zero(m, m);
        int edges = 0;
        for (const auto& p : *candidate_pairs) {
            if (p.label != 1) continue;
            const int a = local[p.i], b = local[p.j];
            if (a < 0 || b < 0) continue;
            if (adj(a, b) == 0.0) ++edges;
            adj(a, b) = adj(b, a) = 1.0;
        }
        if (edges == 0) {
            spectral = false;
        } else {
            // normalized spectral embedding of the candidate graph, self-loops
            // keep isolated rows well-defined
            adj.diagonal().array() += 1.0;
            Eigen::VectorXd dinv = adj.rowwise().sum().array().rsqrt();
            Eigen::MatrixXd sym = dinv.asDiagonal() * adj * dinv.asDiagonal();
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (sym + sym.transpose()));
            const int dim = std::min<int>(static_cast<int>(non_anchor.size()), m);
            // eigenvalues ascend; take the top `dim` columns, sign-fixed
            Eigen::MatrixXd emb = eig.eigenvectors().rightCols(dim).rowwise().reverse();
            for (int ccol = 0; ccol < emb.cols(); ++ccol) {
                int arg = 0;
                emb.col(ccol).cwiseAbs().maxCoeff(&arg);
                if (emb(arg, ccol) < 0.0) emb.col(ccol) = -emb.col(ccol);
            }
            // rows with no mass in the kept eigenvectors (extra graph
            // components) stay zero and softmax to a flat row below
            for (int t = 0; t < m; ++t) {
                const double nrm = emb.row(t).norm();
                if (nrm > 1e-12) emb.row(t) /= nrm;
            }
            const int Kc = std::min<int>(static_cast<int>(non_anchor.size()), m);
            SphericalKmeansResult km = spherical_kmeans(emb, Kc, substream(seed, 7));
            soft = Eigen::MatrixXd::Zero(m, static_cast<int>(non_anchor.size()));
            Eigen::MatrixXd cosc = emb * km.centers.transpose();  // m x Kc
            for (int t = 0; t < m; ++t) {
                const double mx = cosc.row(t).maxCoeff();
                double total = 0.0;
                for (int c = 0; c < Kc; ++c) total += std::exp(cosc(t, c) - mx);
                for (int c = 0; c < Kc; ++c)
                    soft(t, c) = std::exp(cosc(t, c) - mx) / total;
            }
        }
    }

    for (int t = 0; t < m; ++t) {
        const int i = eval_features[t];
        if (spectral) {
            for (size_t c = 0; c < non_anchor.size(); ++c)
                if (soft(t, static_cast<int>(c)) > 0.0) {
                    row.push_back(i);
                    col.push_back(non_anchor[c]);
                    prob.push_back(soft(t, static_cast<int>(c)));
                }
        } else {
            const double p = 1.0 / static_cast<double>(non_anchor.size());
            for (int k : non_anchor) {
                row.push_back(i);
                col.push_back(k);
                prob.push_back(p);
            }
        }
    }
    return PriorMatrix(n, K, row, col, prob);
}

Scenario generate_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Scenario scn;
    scn.config = cfg;
    ScenarioTruth& truth = scn.truth;
    const int n = cfg.n, K = cfg.K, r = cfg.r;

    {
        Rng rng(substream(cfg.seed, kTagZ));
        truth.z.resize(n);
        for (int i = 0; i < n; ++i) truth.z[i] = static_cast<int>(rng.uniform_int(0, K - 1));
    }
    {
        Rng rng(substream(cfg.seed, kTagMu));
        const double mean = cfg.mu_mean > 0.0 ? cfg.mu_mean : 1.0 / std::sqrt(double(r));
        Eigen::MatrixXd mu(K, r);
        for (int k = 0; k < K; ++k)
            for (int d = 0; d < r; ++d) mu(k, d) = mean + cfg.mu_sd * rng.normal();
        truth.mu = normalize_rows(mu);
    }
    truth.V.resize(n, r);
    for (int i = 0; i < n; ++i)
        truth.V.row(i) = sample_vmf(truth.mu.row(truth.z[i]).transpose(), cfg.kappa, 1,
                                    substream(cfg.seed, kTagV, i));

    truth.W.resize(cfg.L);
    for (int l = 0; l < cfg.L; ++l) {
        Rng rng(substream(cfg.seed, kTagW, l));
        Eigen::MatrixXd w(cfg.source_dim, r);
        for (int a = 0; a < cfg.source_dim; ++a)
            for (int b = 0; b < r; ++b) w(a, b) = cfg.w_mean + cfg.w_sd * rng.normal();
        truth.W[l] = w;
    }

    truth.R = Eigen::MatrixXd::Zero(r, r);
    for (int d = 0; d < r; ++d)
        truth.R(d, d) = cfg.r_diag.empty() ? 5.0 : cfg.r_diag[static_cast<size_t>(d)];
    truth.kappa = cfg.kappa;
    truth.beta1 = cfg.beta1;
    truth.beta2 = cfg.beta2;
    truth.beta3 = cfg.beta3;

    scn.universe.n = n;
    const auto windows = source_windows(n, cfg.L);
    for (int l = 0; l < cfg.L; ++l) {
        SourceSet src;
        src.source_id = l;
        const auto [lo, hi] = windows[static_cast<size_t>(l)];
        src.embeddings.resize(hi - lo, cfg.source_dim);
        for (int id = lo; id < hi; ++id) {
            src.feature_ids.push_back(id);
            Eigen::VectorXd mean = truth.W[l] * truth.V.row(id).transpose();
            const std::uint64_t s = substream(cfg.seed, kTagEmbed, l * n + id);
            if (cfg.noise == NoiseModel::vmf) {
                double nm = mean.norm();
                Eigen::VectorXd dir;
                if (nm > 1e-12) {
                    dir = mean / nm;
                } else {
                    dir = Eigen::VectorXd::Zero(cfg.source_dim);
                    dir[0] = 1.0;
                }
                src.embeddings.row(id - lo) =
                    sample_vmf(dir, cfg.source_concentration, 1, s);
            } else {
                Rng rng(s);
                for (int d = 0; d < cfg.source_dim; ++d)
                    mean[d] += cfg.gaussian_sd * rng.normal();
                src.embeddings.row(id - lo) = mean.transpose();
            }
        }
        scn.universe.sources.push_back(std::move(src));
    }
    scn.universe.validate(cfg.noise == NoiseModel::vmf);

    scn.pairs = generate_relational_pairs(cfg, truth, scn.universe.sources[0].embeddings,
                                          substream(cfg.seed, kTagPairs), &scn.eval_pairs);

    {
        std::vector<int> ids(K);
        for (int k = 0; k < K; ++k) ids[k] = k;
        Rng rng(substream(cfg.seed, kTagAnchor));
        const auto want = static_cast<size_t>(std::llround(cfg.anchor_fraction * K));
        shuffle_prefix(ids, want, rng);
        truth.anchor_clusters.assign(ids.begin(), ids.begin() + static_cast<long>(want));
        std::sort(truth.anchor_clusters.begin(), truth.anchor_clusters.end());
    }
    std::vector<char> is_anchor(K, 0);
    for (int k : truth.anchor_clusters) is_anchor[k] = 1;
    for (int i = 0; i < n; ++i)
        if (!is_anchor[truth.z[i]]) truth.eval_features.push_back(i);

    scn.priors = build_anchor_priors(cfg, truth.z, truth.anchor_clusters,
                                     cfg.spectral_priors ? &scn.pairs.sim : nullptr,
                                     substream(cfg.seed, kTagPrior));
    return scn;
}

}  // namespace spheremix
