#include "spheremix/linalg.hpp"

#include <stdexcept>

#include "spheremix/rng.hpp"

namespace spheremix {

TruncatedSvd truncated_svd(const Eigen::MatrixXd& m, int rank) {
    if (rank < 1 || rank > std::min(m.rows(), m.cols()))
        throw std::invalid_argument("truncated_svd: rank out of range");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
    TruncatedSvd out;
    out.U = svd.matrixU().leftCols(rank);
    out.S = svd.singularValues().head(rank);
    out.V = svd.matrixV().leftCols(rank);
    for (int k = 0; k < rank; ++k) {
        int arg = 0;
        out.U.col(k).cwiseAbs().maxCoeff(&arg);
        if (out.U(arg, k) < 0.0) {
            out.U.col(k) = -out.U.col(k);
            out.V.col(k) = -out.V.col(k);
        }
    }
    return out;
}

ProcrustesMap orthogonal_procrustes(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
    if (X.rows() != Y.rows()) throw std::invalid_argument("procrustes: row mismatch");
    if (X.cols() > Y.cols()) throw std::invalid_argument("procrustes: need p <= q");
    Eigen::MatrixXd C = X.transpose() * Y;  // p x q
    Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinU | Eigen::ComputeThinV);
    ProcrustesMap out;
    out.Q = svd.matrixU() * svd.matrixV().transpose();
    double xnorm = X.squaredNorm();
    out.scale = xnorm > 0.0 ? svd.singularValues().sum() / xnorm : 1.0;
    return out;
}

Eigen::MatrixXd random_orthogonal(int r, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd g(r, r);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < r; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(r, r);
    Eigen::MatrixXd rr = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < r; ++j)
        if (rr(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols()) throw std::invalid_argument("psd_sqrt: square matrix required");
    Eigen::MatrixXd sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
    Eigen::VectorXd lam = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace spheremix
