#include "spheremix/types.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spheremix {

int FeatureUniverse::total_rows() const {
    int total = 0;
    for (const auto& s : sources) total += s.size();
    return total;
}

std::vector<int> FeatureUniverse::coverage() const {
    std::vector<int> d(n, 0);
    for (const auto& s : sources)
        for (int id : s.feature_ids) ++d[id];
    return d;
}

void FeatureUniverse::validate(bool require_unit_rows) const {
    if (n <= 0) throw std::invalid_argument("universe: n must be positive");
    if (sources.empty()) throw std::invalid_argument("universe: no sources");
    for (const auto& s : sources) {
        if (s.size() == 0) throw std::invalid_argument("universe: empty source");
        if (s.embeddings.rows() != s.size())
            throw std::invalid_argument("universe: embeddings/feature_ids row mismatch");
        for (size_t i = 0; i < s.feature_ids.size(); ++i) {
            int id = s.feature_ids[i];
            if (id < 0 || id >= n)
                throw std::invalid_argument("universe: feature id out of range");
            if (i > 0 && id <= s.feature_ids[i - 1])
                throw std::invalid_argument("universe: feature ids must be strictly increasing");
        }
        if (require_unit_rows) {
            for (int i = 0; i < s.embeddings.rows(); ++i)
                if (std::abs(s.embeddings.row(i).norm() - 1.0) > 1e-6)
                    throw std::invalid_argument("universe: embedding rows must be unit-norm");
        }
    }
    std::vector<int> d = coverage();
    if (std::any_of(d.begin(), d.end(), [](int c) { return c == 0; }))
        throw std::invalid_argument("universe: sources must jointly cover every feature");
}

PriorMatrix::PriorMatrix(int n, int K, const std::vector<int>& row, const std::vector<int>& col,
                         const std::vector<double>& prob)
    : n_(n), K_(K) {
    if (n <= 0 || K <= 0) throw std::invalid_argument("priors: empty shape");
    if (row.size() != col.size() || row.size() != prob.size())
        throw std::invalid_argument("priors: triplet arrays must have equal length");
    std::vector<std::vector<std::pair<int, double>>> per_row(n);
    for (size_t t = 0; t < row.size(); ++t) {
        int i = row[t], k = col[t];
        double p = prob[t];
        if (i < 0 || i >= n || k < 0 || k >= K)
            throw std::invalid_argument("priors: index out of range");
        if (!(p >= 0.0)) throw std::invalid_argument("priors: negative probability");
        if (p > 0.0) per_row[i].emplace_back(k, p);
    }
    offsets_.assign(n + 1, 0);
    for (int i = 0; i < n; ++i) {
        auto& entries = per_row[i];
        std::sort(entries.begin(), entries.end());
        for (size_t t = 1; t < entries.size(); ++t)
            if (entries[t].first == entries[t - 1].first)
                throw std::invalid_argument("priors: duplicate (feature, cluster) entry");
        double sum = 0.0;
        for (auto& [k, p] : entries) sum += p;
        if (std::abs(sum - 1.0) > 1e-10)
            throw std::invalid_argument("priors: row must sum to 1");
        offsets_[i + 1] = offsets_[i] + static_cast<int>(entries.size());
        for (auto& [k, p] : entries) {
            cols_.push_back(k);
            vals_.push_back(p);
            logs_.push_back(std::log(p));
        }
    }
}

PriorMatrix PriorMatrix::uniform(int n, int K) {
    std::vector<int> row, col;
    std::vector<double> prob;
    row.reserve(static_cast<size_t>(n) * K);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < K; ++k) {
            row.push_back(i);
            col.push_back(k);
            prob.push_back(1.0 / K);
        }
    return PriorMatrix(n, K, row, col, prob);
}

PriorMatrix PriorMatrix::from_dense(const Eigen::MatrixXd& dense) {
    std::vector<int> row, col;
    std::vector<double> prob;
    for (int i = 0; i < dense.rows(); ++i)
        for (int k = 0; k < dense.cols(); ++k)
            if (dense(i, k) != 0.0) {
                row.push_back(i);
                col.push_back(k);
                prob.push_back(dense(i, k));
            }
    return PriorMatrix(static_cast<int>(dense.rows()), static_cast<int>(dense.cols()),
                       row, col, prob);
}

double PriorMatrix::prob(int i, int k) const {
    for (int pos = offsets_[i]; pos < offsets_[i + 1]; ++pos)
        if (cols_[pos] == k) return vals_[pos];
    return 0.0;
}

Eigen::MatrixXd PriorMatrix::dense() const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n_, K_);
    for (int i = 0; i < n_; ++i)
        for (int pos = offsets_[i]; pos < offsets_[i + 1]; ++pos)
            m(i, cols_[pos]) = vals_[pos];
    return m;
}

void RelationalPairSet::add(Channel ch, int i, int j, int label, int n) {
    if (i == j) throw std::invalid_argument("pairs: self-pair rejected");
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw std::invalid_argument("pairs: feature index out of range");
    if (label != 0 && label != 1) throw std::invalid_argument("pairs: label must be 0 or 1");
    auto& v = (ch == Channel::similarity) ? sim : rel;
    v.push_back({std::min(i, j), std::max(i, j), label});
}

void RelationalPairSet::validate(int n) const {
    auto check = [n](const std::vector<LabeledPair>& v, const char* name) {
        std::set<std::pair<int, int>> seen;
        for (const auto& p : v) {
            if (p.i == p.j) throw std::invalid_argument(std::string(name) + ": self-pair");
            if (p.i < 0 || p.j < 0 || p.i >= n || p.j >= n)
                throw std::invalid_argument(std::string(name) + ": index out of range");
            if (p.label != 0 && p.label != 1)
                throw std::invalid_argument(std::string(name) + ": bad label");
            auto key = std::minmax(p.i, p.j);
            if (!seen.insert(key).second)
                throw std::invalid_argument(std::string(name) + ": duplicate unordered pair");
        }
    };
    check(sim, "sim pairs");
    check(rel, "rel pairs");
}

void CompositeWeights::validate() const {
    if (!(vmf >= 0.0) || !(sim >= 0.0) || !(rel >= 0.0))
        throw std::invalid_argument("weights must be nonnegative");
}

void ModelState::validate(const FeatureUniverse& universe) const {
    if (V.rows() != universe.n) throw std::invalid_argument("model: V row count != n");
    const int rr = r();
    if (mu.cols() != rr || R.rows() != rr || R.cols() != rr)
        throw std::invalid_argument("model: dimension mismatch");
    if (W.size() != universe.sources.size())
        throw std::invalid_argument("model: W count != source count");
    for (size_t l = 0; l < W.size(); ++l)
        if (W[l].rows() != universe.sources[l].dim() || W[l].cols() != rr)
            throw std::invalid_argument("model: W_l shape mismatch");
    for (int i = 0; i < V.rows(); ++i)
        if (std::abs(V.row(i).norm() - 1.0) > 1e-6)
            throw std::invalid_argument("model: V rows must be unit-norm");
    for (int k = 0; k < mu.rows(); ++k)
        if (std::abs(mu.row(k).norm() - 1.0) > 1e-6)
            throw std::invalid_argument("model: mu rows must be unit-norm");
    if (!(kappa >= 0.0)) throw std::invalid_argument("model: kappa must be >= 0");
    if ((R - R.transpose()).cwiseAbs().maxCoeff() > 1e-10)
        throw std::invalid_argument("model: R must be symmetric");
    if (z.size() != universe.n) throw std::invalid_argument("model: z length != n");
    for (int i = 0; i < z.size(); ++i)
        if (z[i] < 0 || z[i] >= K()) throw std::invalid_argument("model: label out of range");
}

Eigen::MatrixXd normalize_rows(const Eigen::MatrixXd& m, double floor) {
    Eigen::MatrixXd out = m;
    for (int i = 0; i < out.rows(); ++i) {
        double nrm = out.row(i).norm();
        if (nrm < floor) throw std::invalid_argument("normalize_rows: near-zero row");
        out.row(i) /= nrm;
    }
    return out;
}

}  // namespace spheremix
