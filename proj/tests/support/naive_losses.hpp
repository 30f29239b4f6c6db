#pragma once

// Literal-formula loss evaluations with explicit loops and dense priors,
// written against the formulas rather than the production code. The vMF
// normalizer comes from the MPFR oracle.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spheremix/types.hpp"

namespace oracle {

inline double clamped_bernoulli_logp(double t, int label) {
    const double log_sig = t >= 0.0 ? -std::log1p(std::exp(-t)) : t - std::log1p(std::exp(t));
    const double logp = label == 1 ? log_sig : log_sig - t;
    return std::max(logp, std::log(1e-12));
}

inline double naive_loss_lr(const spheremix::FeatureUniverse& u, const Eigen::MatrixXd& V,
                            const std::vector<Eigen::MatrixXd>& W) {
    double total = 0.0;
    long N = 0;
    for (const auto& s : u.sources) N += s.size();
    for (size_t l = 0; l < u.sources.size(); ++l) {
        const auto& s = u.sources[l];
        for (int row = 0; row < s.size(); ++row) {
            double sq = 0.0;
            for (int d = 0; d < s.dim(); ++d) {
                double pred = 0.0;
                for (int c = 0; c < V.cols(); ++c) pred += W[l](d, c) * V(s.feature_ids[row], c);
                const double diff = pred - s.embeddings(row, d);
                sq += diff * diff;
            }
            total += sq / static_cast<double>(s.dim());
        }
    }
    return total / static_cast<double>(N);
}

inline double naive_loss_vmf(const Eigen::MatrixXd& V, const Eigen::MatrixXd& mu, double kappa,
                             const Eigen::MatrixXd& pi) {
    const int n = static_cast<int>(V.rows()), K = static_cast<int>(mu.rows());
    const double logc = log_vmf_normalizer(static_cast<int>(V.cols()), kappa);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        double best = -1e308;
        std::vector<double> lt;
        for (int k = 0; k < K; ++k) {
            if (pi(i, k) <= 0.0) continue;
            double dot = 0.0;
            for (int c = 0; c < V.cols(); ++c) dot += mu(k, c) * V(i, c);
            lt.push_back(std::log(pi(i, k)) + logc + kappa * dot);
            best = std::max(best, lt.back());
        }
        double acc = 0.0;
        for (double v : lt) acc += std::exp(v - best);
        total += best + std::log(acc);
    }
    return -total / (static_cast<double>(n) * kappa);
}

inline double naive_loss_sim(const Eigen::MatrixXd& mu, double b1, double b2,
                             const Eigen::MatrixXd& pi,
                             const std::vector<spheremix::LabeledPair>& pairs) {
    const int K = static_cast<int>(mu.rows());
    double total = 0.0;
    for (const auto& p : pairs) {
        double best = -1e308;
        std::vector<double> lt;
        for (int k1 = 0; k1 < K; ++k1) {
            if (pi(p.i, k1) <= 0.0) continue;
            for (int k2 = 0; k2 < K; ++k2) {
                if (pi(p.j, k2) <= 0.0) continue;
                double dot = 0.0;
                for (int c = 0; c < mu.cols(); ++c) dot += mu(k1, c) * mu(k2, c);
                lt.push_back(std::log(pi(p.i, k1)) + std::log(pi(p.j, k2)) +
                             clamped_bernoulli_logp(b1 + b2 * dot, p.label));
                best = std::max(best, lt.back());
            }
        }
        double acc = 0.0;
        for (double v : lt) acc += std::exp(v - best);
        total -= best + std::log(acc);
    }
    return total / static_cast<double>(pairs.size());
}

inline double naive_loss_rel(const Eigen::MatrixXd& V, double b3, const Eigen::MatrixXd& R,
                             const std::vector<spheremix::LabeledPair>& pairs) {
    double total = 0.0;
    for (const auto& p : pairs) {
        double t = b3;
        for (int a = 0; a < V.cols(); ++a)
            for (int b = 0; b < V.cols(); ++b) t += V(p.i, a) * R(a, b) * V(p.j, b);
        total -= clamped_bernoulli_logp(t, p.label);
    }
    return total / static_cast<double>(pairs.size());
}

}  // namespace oracle
