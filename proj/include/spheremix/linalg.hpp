#pragma once

#include <Eigen/Dense>

namespace spheremix {

struct TruncatedSvd {
    Eigen::MatrixXd U;  // m x rank
    Eigen::VectorXd S;  // rank
    Eigen::MatrixXd V;  // p x rank
};

// Thin SVD truncated to `rank`, sign-fixed so each left singular vector's
// largest-magnitude entry is positive (deterministic output).
TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, int rank);

struct ProcrustesMap {
    Eigen::MatrixXd Q;   // p x q, Q Q' = I_p (requires p <= q)
    double scale = 1.0;  // argmin_s ||s X Q - Y||_F
};

// min over row-orthonormal Q of ||X Q - Y||_F given paired rows X (m x p), Y (m x q)
ProcrustesMap orthogonal_procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y);

// Haar-ish random orthogonal matrix via QR of a Gaussian matrix, sign-fixed.
Eigen::MatrixXd random_orthogonal(int r, std::uint64_t seed);

// Symmetric PSD-projected square root: eigendecompose (A+A')/2, clip negative
// eigenvalues to zero, rebuild with square-rooted spectrum.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& A);

}  // namespace spheremix
