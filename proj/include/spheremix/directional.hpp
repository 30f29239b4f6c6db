#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace spheremix {

// log I_nu(x) for nu >= 0, x >= 0. Power series below max(20, nu^2/2),
// large-argument asymptotic expansion above; relative accuracy ~1e-12.
double log_bessel_i(double order, double argument);

// log of the vMF normalizer C_r(kappa) = kappa^{r/2-1} / ((2*pi)^{r/2} I_{r/2-1}(kappa)),
// continuous at kappa = 0 (uniform density on the sphere).
double vmf_log_normalizer(int r, double kappa);

// log f_r(x; mu, kappa); mu and x unit vectors of dimension r >= 2
double vmf_log_density(const Eigen::VectorXd& x, const Eigen::VectorXd& mu, double kappa);

// A_r(kappa) = I_{r/2}(kappa) / I_{r/2-1}(kappa), the mean resultant length
double mean_resultant_ratio(int r, double kappa);

// Inverse of A_r: Banerjee-style closed-form start, then Newton until
// |A_r(kappa) - rbar| <= 1e-8. Requires 0 <= rbar < 1.
double concentration_from_resultant(int r, double rbar);

// Wood rejection sampler. Draw index i uses substream(seed, i), so batches are
// reproducible independently of evaluation order or thread count.
Eigen::MatrixXd sample_vmf(const Eigen::VectorXd& mu, double kappa, int count,
                           std::uint64_t seed);

struct SphericalKmeansResult {
    Eigen::MatrixXd centers;        // K x r, unit rows
    Eigen::VectorXi labels;         // n
    double objective = 0.0;         // sum of cosines to assigned center
    int iterations = 0;
};

// k-means++ seeding on cosine distance + Lloyd iterations. Deterministic given
// seed; all ties resolved toward the lowest index; empty clusters re-seeded at
// the currently worst-fit point.
SphericalKmeansResult spherical_kmeans(const Eigen::MatrixXd& points, int K,
                                       std::uint64_t seed, int max_iter = 100);

}  // namespace spheremix
