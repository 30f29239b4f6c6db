#include "spheremix/directional.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "spheremix/rng.hpp"
#include "spheremix/types.hpp"

namespace spheremix {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLog2Pi = 1.8378770664093454836;

// log of sum_{m>=0} (x^2/4)^m / (m! (nu+1)_m), accumulated with periodic
// rescaling so arguments up to the regime boundary cannot overflow. The tail
// past the leading 1 is kept separate and finished with log1p, which keeps
// full relative precision when the whole sum is close to 1 (tiny x).
double log_series_sum(double nu, double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, tail = 0.0, offset = 0.0;
    for (int m = 1; m < 40000; ++m) {
        term *= q / (m * (nu + m));
        tail += term;
        if (term < (1.0 + tail) * 1e-18) break;
        if (tail > 1e250) {
            const double sum = 1.0 + tail;
            offset += std::log(sum);
            term /= sum;
            tail = 0.0;
        }
    }
    return offset + std::log1p(tail);
}

// DLMF 10.40.1 large-argument expansion, truncated at the smallest term.
double log_asymptotic(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double term = 1.0, sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 60; ++k) {
        double num = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
        term *= -num / (8.0 * x * k);
        double mag = std::abs(term);
        if (mag >= prev) break;  // divergent tail reached
        sum += term;
        prev = mag;
        if (mag < 1e-18 * std::abs(sum)) break;
    }
    return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

}  // namespace

double log_bessel_i(double order, double argument) {
    if (!(order >= 0.0) || !(argument >= 0.0))
        throw std::invalid_argument("log_bessel_i: order and argument must be nonnegative");
    if (argument == 0.0) {
        if (order == 0.0) return 0.0;
        return -std::numeric_limits<double>::infinity();
    }
    const double boundary = std::max(20.0, 0.5 * order * order);
    if (argument < boundary) {
        return order * std::log(0.5 * argument) - std::lgamma(order + 1.0) +
               log_series_sum(order, argument);
    }
    return log_asymptotic(order, argument);
}

double vmf_log_normalizer(int r, double kappa) {
    if (r < 2) throw std::invalid_argument("vmf_log_normalizer: r must be >= 2");
    if (!(kappa >= 0.0)) throw std::invalid_argument("vmf_log_normalizer: kappa must be >= 0");
    const double nu = 0.5 * r - 1.0;
    if (kappa < 1e-8) {
        // limit: uniform density on S^{r-1}, area 2 pi^{r/2} / Gamma(r/2)
        return nu * std::log(2.0) - 0.5 * r * kLog2Pi + std::lgamma(0.5 * r);
    }
    return nu * std::log(kappa) - 0.5 * r * kLog2Pi - log_bessel_i(nu, kappa);
}

double vmf_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, double kappa) {
    if (x.size() != mu.size() || x.size() < 2)
        throw std::invalid_argument("vmf_log_density: dimension mismatch");
    const int r = static_cast<int>(x.size());
    return vmf_log_normalizer(r, kappa) + kappa * mu.dot(x);
}

double mean_resultant_ratio(int r, double kappa) {
    if (r < 2) throw std::invalid_argument("mean_resultant_ratio: r must be >= 2");
    if (!(kappa >= 0.0)) throw std::invalid_argument("mean_resultant_ratio: kappa must be >= 0");
    if (kappa == 0.0) return 0.0;
    const double nu = 0.5 * r - 1.0;
    return std::exp(log_bessel_i(nu + 1.0, kappa) - log_bessel_i(nu, kappa));
}

double concentration_from_resultant(int r, double rbar) {
    if (r < 2) throw std::invalid_argument("concentration_from_resultant: r must be >= 2");
    if (!(rbar >= 0.0) || rbar >= 1.0)
        throw std::invalid_argument("concentration_from_resultant: rbar must be in [0, 1)");
    if (rbar == 0.0) return 0.0;
    double kappa = rbar * (r - rbar * rbar) / (1.0 - rbar * rbar);
    for (int it = 0; it < 20; ++it) {
        double a = mean_resultant_ratio(r, kappa);
        double f = a - rbar;
        if (std::abs(f) <= 1e-8) break;
        // A'(kappa) = 1 - A^2 - (r-1) A / kappa, limit 1/r at kappa -> 0
        double da = (kappa > 1e-12) ? 1.0 - a * a - (r - 1.0) * a / kappa : 1.0 / r;
        if (da <= 0.0) da = 1e-12;
        double next = kappa - f / da;
        if (next <= 0.0) next = 0.5 * kappa;
        kappa = next;
    }
    return kappa;
}

Eigen::MatrixXd sample_vmf(const Eigen::VectorXd& mu, double kappa, int count,
                           std::uint64_t seed) {
    const int r = static_cast<int>(mu.size());
    if (r < 2) throw std::invalid_argument("sample_vmf: dimension must be >= 2");
    if (!(kappa >= 0.0)) throw std::invalid_argument("sample_vmf: kappa must be >= 0");
    if (count < 0) throw std::invalid_argument("sample_vmf: count must be >= 0");
    if (std::abs(mu.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("sample_vmf: mu must be unit-norm");

    const double m1 = r - 1.0;
    const double b = m1 / (2.0 * kappa + std::sqrt(4.0 * kappa * kappa + m1 * m1));
    const double x0 = (1.0 - b) / (1.0 + b);
    const double c = kappa * x0 + m1 * std::log(1.0 - x0 * x0);

    Eigen::MatrixXd out(count, r);
    for (int i = 0; i < count; ++i) {
        Rng rng(substream(seed, static_cast<std::uint64_t>(i)));
        double w;
        for (;;) {
            double zb = rng.beta(0.5 * m1, 0.5 * m1);
            w = (1.0 - (1.0 + b) * zb) / (1.0 - (1.0 - b) * zb);
            double u = rng.uniform_pos();
            if (kappa * w + m1 * std::log(1.0 - x0 * w) - c >= std::log(u)) break;
        }
        // tangent direction: gaussian projected off mu, renormalized
        Eigen::VectorXd t(r);
        double tn = 0.0;
        do {
            for (int d = 0; d < r; ++d) t[d] = rng.normal();
            t -= t.dot(mu) * mu;
            tn = t.norm();
        } while (tn < 1e-12);
        out.row(i) = (w * mu + std::sqrt(std::max(0.0, 1.0 - w * w)) * (t / tn)).transpose();
    }
    return out;
}

SphericalKmeansResult spherical_kmeans(const Eigen::MatrixXd& points, int K,
                                       std::uint64_t seed, int max_iter) {
    const int n = static_cast<int>(points.rows());
    const int r = static_cast<int>(points.cols());
    if (K < 1 || K > n) throw std::invalid_argument("spherical_kmeans: need 1 <= K <= n");

    Rng rng(substream(seed, 0x6b6d /* km */));
    Eigen::MatrixXd centers(K, r);

    // k-means++ on cosine distance 1 - x'c
    std::vector<double> d2(n);
    centers.row(0) = points.row(rng.uniform_int(0, n - 1));
    for (int i = 0; i < n; ++i) {
        double d = 1.0 - points.row(i).dot(centers.row(0));
        d2[i] = d * d;
    }
    for (int k = 1; k < K; ++k) {
        double total = 0.0;
        for (double v : d2) total += v;
        int pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total, cum = 0.0;
            pick = n - 1;
            for (int i = 0; i < n; ++i) {
                cum += d2[i];
                if (cum > target) { pick = i; break; }
            }
        } else {
            pick = static_cast<int>(rng.uniform_int(0, n - 1));
        }
        centers.row(k) = points.row(pick);
        for (int i = 0; i < n; ++i) {
            double d = 1.0 - points.row(i).dot(centers.row(k));
            d2[i] = std::min(d2[i], d * d);
        }
    }

    SphericalKmeansResult res;
    res.labels = Eigen::VectorXi::Zero(n);
    double prev_obj = -std::numeric_limits<double>::infinity();
    for (int it = 0; it < max_iter; ++it) {
        // assignment: highest cosine, ties to the lowest cluster index
        Eigen::MatrixXd sims = points * centers.transpose();  // n x K
        bool changed = false;
        for (int i = 0; i < n; ++i) {
            int best = 0;
            double bv = sims(i, 0);
            for (int k = 1; k < K; ++k)
                if (sims(i, k) > bv) { bv = sims(i, k); best = k; }
            if (res.labels[i] != best) { res.labels[i] = best; changed = true; }
        }
        // centers: normalized means; empty cluster grabs the worst-fit point
        for (int k = 0; k < K; ++k) {
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(r);
            int cnt = 0;
            for (int i = 0; i < n; ++i)
                if (res.labels[i] == k) { sum += points.row(i).transpose(); ++cnt; }
            if (cnt == 0) {
                int worst = 0;
                double wv = std::numeric_limits<double>::infinity();
                for (int i = 0; i < n; ++i) {
                    double s = points.row(i).dot(centers.row(res.labels[i]));
                    if (s < wv) { wv = s; worst = i; }
                }
                centers.row(k) = points.row(worst);
                res.labels[worst] = k;
                changed = true;
            } else if (sum.norm() > 1e-12) {
                centers.row(k) = (sum / sum.norm()).transpose();
            }  // near-cancelling cluster: keep the previous center
        }
        double obj = 0.0;
        for (int i = 0; i < n; ++i) obj += points.row(i).dot(centers.row(res.labels[i]));
        if (obj < prev_obj - 1e-9)
            throw std::logic_error("spherical_kmeans: objective decreased");
        res.iterations = it + 1;
        bool converged = !changed && it > 0;
        prev_obj = obj;
        res.objective = obj;
        if (converged) break;
    }
    res.centers = centers;
    return res;
}

}  // namespace spheremix
