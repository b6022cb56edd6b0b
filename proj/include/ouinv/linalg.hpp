#pragma once

#include <Eigen/Dense>

namespace ouinv {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// <M v, v> for symmetric M.
inline double qform(const Mat& M, const Vec& v) {
    return v.dot(M * v);
}

inline Mat symmetrize(const Mat& M) {
    return 0.5 * (M + M.transpose());
}

/// Symmetric square root of an SPD matrix via eigendecomposition.
inline Mat spd_sqrt(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    return es.operatorSqrt();
}

inline Mat spd_inv_sqrt(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    return es.operatorInverseSqrt();
}

/// log(det M) for SPD M, via Cholesky.
inline double spd_log_det(const Mat& M) {
    Eigen::LLT<Mat> llt(M);
    return 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
}

inline double min_eigenvalue(const Mat& Msym) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Msym);
    return es.eigenvalues().minCoeff();
}

/// Factor F with F F^T = M for symmetric PSD M, robust to extreme
/// conditioning (negative roundoff eigenvalues are clamped). Returns
/// {F, log det F}.
inline std::pair<Mat, double> psd_factor(const Mat& M) {
    Eigen::SelfAdjointEigenSolver<Mat> es(M);
    Vec lam = es.eigenvalues();
    double floor = lam.maxCoeff() * 1e-30;
    double logDet = 0.0;
    Vec root(lam.size());
    for (int i = 0; i < lam.size(); ++i) {
        double l = std::max(lam[i], floor);
        root[i] = std::sqrt(l);
        logDet += 0.5 * std::log(l);
    }
    return {es.eigenvectors() * root.asDiagonal(), logDet};
}

inline double max_eigenvalue(const Mat& Msym) {
    Eigen::SelfAdjointEigenSolver<Mat> es(Msym);
    return es.eigenvalues().maxCoeff();
}

} // namespace ouinv
