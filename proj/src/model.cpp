#include "ouinv/model.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <vector>

#include "ouinv/quadrature.hpp"
#include "ouinv/rng.hpp"

namespace ouinv {

namespace {

/// Solve B X + X B^T = -Q for X, B Hurwitz, Q symmetric.
Mat solve_lyapunov(const Mat& B, const Mat& Q) {
    const int n = static_cast<int>(B.rows());
    Eigen::ComplexSchur<Mat> schur(B);
    const CMat U = schur.matrixU();
    const CMat T = schur.matrixT();
    CMat Qt = U.adjoint() * Q.cast<std::complex<double>>() * U;

    // T Y + Y T^H = -Qt, T upper triangular; sweep from the last row/column.
    CMat Y = CMat::Zero(n, n);
    for (int i = n - 1; i >= 0; --i) {
        for (int j = n - 1; j >= 0; --j) {
            std::complex<double> rhs = -Qt(i, j);
            for (int k = i + 1; k < n; ++k) rhs -= T(i, k) * Y(k, j);
            for (int k = j + 1; k < n; ++k) rhs -= Y(i, k) * std::conj(T(j, k));
            Y(i, j) = rhs / (T(i, i) + std::conj(T(j, j)));
        }
    }
    Mat X = (U * Y * U.adjoint()).real();
    return symmetrize(X);
}

} // namespace

Mat matrix_exp(const Mat& M) {
    if (!M.allFinite()) throw Overflow("matrix_exp: non-finite input");
    Mat E = M.exp();
    if (!E.allFinite()) throw Overflow("matrix_exp: result exceeds double range");
    return E;
}

Model build_model(const Mat& Q, const Mat& B) {
    if (Q.rows() != Q.cols() || B.rows() != B.cols() || Q.rows() != B.rows())
        throw MalformedMatrix("build_model: Q and B must be square and of equal size");
    if (!Q.allFinite() || !B.allFinite())
        throw MalformedMatrix("build_model: non-finite entries");

    const int n = static_cast<int>(Q.rows());
    const double qScale = Q.norm();
    if ((Q - Q.transpose()).norm() > 1e-12 * std::max(1.0, qScale))
        throw NonSymmetric("build_model: Q is not symmetric");

    Eigen::LLT<Mat> llt(symmetrize(Q));
    if (llt.info() != Eigen::Success)
        throw NonPositiveDefinite("build_model: Q is not positive definite");

    Eigen::EigenSolver<Mat> esB(B);
    for (int i = 0; i < n; ++i) {
        if (esB.eigenvalues()[i].real() >= -1e-12)
            throw NonHurwitz("build_model: eigenvalue of B with nonnegative real part");
    }

    Model m;
    m.dim = n;
    m.Q = symmetrize(Q);
    m.B = B;
    m.traceB = B.trace();
    m.Qinf = solve_lyapunov(B, m.Q);

    const double residual = (B * m.Qinf + m.Qinf * B.transpose() + m.Q).norm();
    if (residual > 1e-10 * m.Q.norm())
        throw Error("build_model: Lyapunov residual too large");

    Eigen::LLT<Mat> lltInf(m.Qinf);
    if (lltInf.info() != Eigen::Success)
        throw NonPositiveDefinite("build_model: Q_inf not positive definite");

    m.QinfInv = lltInf.solve(Mat::Identity(n, n));
    m.QinfInv = symmetrize(m.QinfInv);
    m.logDetQinf = spd_log_det(m.Qinf);
    m.QinfSqrt = spd_sqrt(m.Qinf);
    m.QinfInvSqrt = spd_inv_sqrt(m.Qinf);
    m.QSqrt = spd_sqrt(m.Q);
    m.lambdaMinQinfInv = min_eigenvalue(m.QinfInv);
    m.lambdaMaxQinfInv = max_eigenvalue(m.QinfInv);

    // flow eigendecomposition of B^T, kept only when V is well conditioned
    Eigen::EigenSolver<Mat> esBT(B.transpose());
    CMat V = esBT.eigenvectors();
    Eigen::JacobiSVD<CMat> svd(V);
    double cond = svd.singularValues()(0) / svd.singularValues()(n - 1);
    if (std::isfinite(cond) && cond < 1e8) {
        m.flowDiagonalizable = true;
        m.flowV = V;
        m.flowVinv = V.inverse();
        m.flowLambda = esBT.eigenvalues();
    }
    return m;
}

Mat cov_t(const Model& model, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw NonPositiveTime("cov_t: t must be positive and finite");
    Mat E = matrix_exp(t * model.B);
    Mat Qt = model.Qinf - E * model.Qinf * E.transpose();
    return symmetrize(Qt);
}

Mat cov_t_oracle(const Model& model, double t, double tol) {
    if (!(t >= 0.0)) throw NonPositiveTime("cov_t_oracle: t must be nonnegative");
    if (t == 0.0) return Mat::Zero(model.dim, model.dim);
    auto integrand = [&](double s) -> Mat {
        Mat E = matrix_exp(s * model.B);
        return E * model.Q * E.transpose();
    };
    return symmetrize(adaptive_simpson_matrix(integrand, 0.0, t, tol));
}

Mat D_matrix(const Model& model, double t) {
    Mat E = matrix_exp(-t * model.B.transpose());
    return model.Qinf * E * model.QinfInv;
}

Vec D_apply(const Model& model, double t, const Vec& x) {
    return D_matrix(model, t) * x;
}

double R_form(const Model& model, const Vec& x) {
    return 0.5 * (model.QinfInvSqrt * x).squaredNorm();
}

double norm_Q(const Model& model, const Vec& x) {
    return (model.QinfInvSqrt * x).norm();
}

double R_flow_derivative(const Model& model, const Vec& y) {
    return 0.5 * (model.QSqrt * (model.QinfInv * y)).squaredNorm();
}

FlowEvaluator::FlowEvaluator(const Model& model, const Vec& x) : model_(&model), x_(x) {
    if (model.flowDiagonalizable) {
        diag_ = true;
        w_ = model.flowVinv * (model.QinfInv * x).cast<std::complex<double>>();
        P_ = model.Qinf.cast<std::complex<double>>() * model.flowV;
        G_ = model.QinfInvSqrt.cast<std::complex<double>>() * P_;
    }
}

Vec FlowEvaluator::point(double s) const {
    if (diag_) {
        CVec y = w_;
        for (int i = 0; i < y.size(); ++i)
            y[i] *= std::exp(-s * model_->flowLambda[i]);
        return (P_ * y).real();
    }
    return D_apply(*model_, s, x_);
}

double FlowEvaluator::r_of(double s) const {
    if (diag_) {
        CVec y = w_;
        for (int i = 0; i < y.size(); ++i)
            y[i] *= std::exp(-s * model_->flowLambda[i]);
        return 0.5 * (G_ * y).squaredNorm();
    }
    Mat E = (-s * model_->B.transpose()).eval().exp();
    if (!E.allFinite()) return std::numeric_limits<double>::infinity();
    Vec y = model_->Qinf * (E * (model_->QinfInv * x_));
    return R_form(*model_, y);
}

double FlowEvaluator::r_prime(double s) const {
    return R_flow_derivative(*model_, point(s));
}

GrowthReport fit_growth_constants(const Model& model, int sampleCount, std::uint64_t seed) {
    if (sampleCount < 100) throw Error("fit_growth_constants: sampleCount >= 100 required");
    GrowthReport rep;
    rep.sampleCount = sampleCount;
    rep.seed = seed;

    std::vector<double> tsSmall, tsLarge;
    for (int i = 0; i < 24; ++i)
        tsSmall.push_back(std::pow(10.0, -3.0 + 3.0 * i / 23.0)); // (0,1]
    for (int i = 0; i < 12; ++i)
        tsLarge.push_back(std::pow(10.0, i / 11.0)); // [1,10]

    std::vector<double> ts = tsSmall;
    ts.insert(ts.end(), tsLarge.begin(), tsLarge.end());

    Rng rng = make_rng(seed);
    std::vector<Vec> xs;
    for (int i = 0; i < sampleCount; ++i) xs.push_back(unit_sphere(rng, model.dim));

    double cLo = std::numeric_limits<double>::infinity();
    double cHi = -std::numeric_limits<double>::infinity();
    double dLo = std::numeric_limits<double>::infinity();
    double dHi = -std::numeric_limits<double>::infinity();

    for (double t : ts) {
        Mat Dt = D_matrix(model, t);
        for (const Vec& x : xs) {
            Vec y = Dt * x;
            double g = std::log(y.norm()) / t; // |x| = 1
            cLo = std::min(cLo, g);
            cHi = std::max(cHi, g);
            if (t <= 1.0) {
                double ratio = (x - y).norm() / t;
                dLo = std::min(dLo, ratio);
                dHi = std::max(dHi, ratio);
            }
        }
    }
    rep.cLower = cLo;
    rep.CUpper = cHi;
    rep.driftRatioMin = dLo;
    rep.driftRatioMax = dHi;
    if (!std::isfinite(cLo) || !std::isfinite(cHi) || !(dLo > 0.0) || !std::isfinite(dHi))
        throw Error("fit_growth_constants: degenerate envelope");
    return rep;
}

} // namespace ouinv
