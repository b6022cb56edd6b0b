#pragma once

#include <cstdint>

#include "ouinv/errors.hpp"
#include "ouinv/linalg.hpp"

namespace ouinv {

/// Validated (Q, B) pair with the solved stationary covariance and cached
/// spectral helpers. Immutable after build_model; safe to share across
/// threads.
struct Model {
    int dim = 0;
    Mat Q, B;
    Mat Qinf, QinfInv;
    double logDetQinf = 0.0;
    double traceB = 0.0;

    // cached factorizations
    Mat QinfSqrt, QinfInvSqrt;
    Mat QSqrt;
    double lambdaMinQinfInv = 0.0, lambdaMaxQinfInv = 0.0;

    // eigendecomposition of B^T for the fast flow path; unavailable when
    // B^T is too close to defective
    bool flowDiagonalizable = false;
    CMat flowV, flowVinv;
    CVec flowLambda;
};

/// Solves B X + X B^T = -Q (Bartels-Stewart via complex Schur), validates
/// (H1)/(H2) and the Lyapunov residual.
Model build_model(const Mat& Q, const Mat& B);

/// Matrix exponential, scaling-and-squaring with Pade approximant.
Mat matrix_exp(const Mat& M);

/// Covariance Q_t = Qinf - e^{tB} Qinf e^{tB^T}, t > 0.
Mat cov_t(const Model& model, double t);

/// Independent oracle: entrywise adaptive quadrature of the defining
/// integral of Q_t. Estimated error <= tol (Frobenius).
Mat cov_t_oracle(const Model& model, double t, double tol);

/// D_t = Qinf e^{-t B^T} Qinf^{-1}; one-parameter group, both signs of t.
Mat D_matrix(const Model& model, double t);

Vec D_apply(const Model& model, double t, const Vec& x);

/// R(x) = 0.5 <Qinf^{-1} x, x> = 0.5 |x|_Q^2.
double R_form(const Model& model, const Vec& x);

/// |x|_Q = |Qinf^{-1/2} x|.
double norm_Q(const Model& model, const Vec& x);

/// d/ds R(D_s x) evaluated at s = 0 offset, i.e. 0.5 |Q^{1/2} Qinf^{-1} y|^2
/// at y = D_s x.
double R_flow_derivative(const Model& model, const Vec& y);

/// Fast evaluation of s -> D_s x along one trajectory. Uses the cached
/// eigendecomposition of B^T when available, otherwise one matrix
/// exponential per call.
class FlowEvaluator {
public:
    FlowEvaluator(const Model& model, const Vec& x);
    double r_of(double s) const;   // R(D_s x); +inf if it overflows
    Vec point(double s) const;     // D_s x
    double r_prime(double s) const;

private:
    const Model* model_;
    Vec x_;
    bool diag_ = false;
    CVec w_;   // V^{-1} Qinf^{-1} x
    CMat G_;   // QinfInvSqrt Qinf V, so R(D_s x) = 0.5 |G e^{-s Lambda} w|^2
    CMat P_;   // Qinf V
};

/// Empirical envelopes for the growth of |D_t x| and of |x - D_t x|.
struct GrowthReport {
    double cLower = 0.0, CUpper = 0.0;           // exponent envelope of |D_t x|/|x|
    double driftRatioMin = 0.0, driftRatioMax = 0.0; // |x - D_t x|/(t |x|), t <= 1
    int sampleCount = 0;
    std::uint64_t seed = 0;
};

GrowthReport fit_growth_constants(const Model& model, int sampleCount, std::uint64_t seed);

} // namespace ouinv
