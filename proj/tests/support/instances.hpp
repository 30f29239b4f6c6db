#pragma once

// Random model instances and small test utilities shared across test files.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "spheremix/types.hpp"

namespace testutil {

struct RandomInstance {
    spheremix::FeatureUniverse u;
    spheremix::ModelState s;
    spheremix::PriorMatrix priors;
    Eigen::MatrixXd dense_priors;
    spheremix::RelationalPairSet pairs;
};

inline Eigen::MatrixXd random_unit_rows(int rows, int cols, std::mt19937_64& gen) {
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        do {
            for (int j = 0; j < cols; ++j) m(i, j) = nd(gen);
        } while (m.row(i).norm() < 1e-8);
        m.row(i) /= m.row(i).norm();
    }
    return m;
}

// Overlapping source windows covering [0, n), dense priors with `support`
// clusters per row (0 = full support), random labeled pairs on both channels.
inline RandomInstance make_random_instance(int n, int K, int r, int L, std::uint64_t seed,
                                           int support = 0, int pairs_per_channel = -1) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    RandomInstance inst;

    inst.s.V = random_unit_rows(n, r, gen);
    inst.s.mu = random_unit_rows(K, r, gen);
    inst.s.kappa = 5.0 + 20.0 * std::uniform_real_distribution<double>()(gen);
    inst.s.beta1 = -0.2 + 0.1 * nd(gen);
    inst.s.beta2 = 1.5 + 0.2 * nd(gen);
    inst.s.beta3 = 0.1 * nd(gen);
    Eigen::MatrixXd a(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) a(i, j) = nd(gen);
    inst.s.R = 0.5 * (a + a.transpose());
    inst.s.z = Eigen::VectorXi::Zero(n);

    inst.u.n = n;
    const int len = L == 1 ? n : (2 * n) / (L + 1);
    for (int l = 0; l < L; ++l) {
        const int start = L == 1 ? 0 : l * (n - len) / (L - 1);
        spheremix::SourceSet src;
        src.source_id = l;
        const int rl = r + 2 + 3 * l;
        Eigen::MatrixXd w(rl, r);
        for (int i = 0; i < rl; ++i)
            for (int j = 0; j < r; ++j) w(i, j) = 0.6 * nd(gen);
        inst.s.W.push_back(w);
        src.embeddings.resize(std::min(n, start + len) - start, rl);
        for (int id = start; id < std::min(n, start + len); ++id) {
            const int row = id - start;
            src.feature_ids.push_back(id);
            Eigen::VectorXd e = w * inst.s.V.row(id).transpose();
            for (int d = 0; d < rl; ++d) e[d] += 0.2 * nd(gen);
            src.embeddings.row(row) = e.transpose() / e.norm();
        }
        inst.u.sources.push_back(std::move(src));
    }
    inst.u.validate();

    inst.dense_priors = Eigen::MatrixXd::Zero(n, K);
    std::vector<int> ks(K);
    std::iota(ks.begin(), ks.end(), 0);
    for (int i = 0; i < n; ++i) {
        std::shuffle(ks.begin(), ks.end(), gen);
        const int m = support <= 0 ? K : std::min(support, K);
        double total = 0.0;
        for (int t = 0; t < m; ++t) {
            const double p = 0.1 + std::uniform_real_distribution<double>()(gen);
            inst.dense_priors(i, ks[t]) = p;
            total += p;
        }
        inst.dense_priors.row(i) /= total;
    }
    inst.priors = spheremix::PriorMatrix::from_dense(inst.dense_priors);

    const int want = pairs_per_channel < 0 ? 3 * n : pairs_per_channel;
    std::vector<long> flat(static_cast<size_t>(n) * (n - 1) / 2);
    long pos = 0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) flat[pos++] = static_cast<long>(i) * n + j;
    for (auto ch : {spheremix::Channel::similarity, spheremix::Channel::relatedness}) {
        std::shuffle(flat.begin(), flat.end(), gen);
        for (int t = 0; t < want && t < static_cast<int>(flat.size()); ++t) {
            const int i = static_cast<int>(flat[t] / n), j = static_cast<int>(flat[t] % n);
            const int label = t < 2 ? t : (gen() & 1);  // both labels always present
            inst.pairs.add(ch, i, j, label, n);
        }
    }
    return inst;
}

// f evaluated at +/- eps along one scalar knob; central difference
template <typename F>
double central_diff(F&& f, double eps = 1e-5) {
    return (f(eps) - f(-eps)) / (2.0 * eps);
}

inline double rel_gap(double a, double b, double floor = 1e-6) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        std::random_device rd;
        path_ = std::filesystem::temp_directory_path() /
                (tag + "_" + std::to_string(rd()) + std::to_string(rd()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& sub = "") const {
        return sub.empty() ? path_.string() : (path_ / sub).string();
    }

  private:
    std::filesystem::path path_;
};

}  // namespace testutil
