#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ouinv/model.hpp"

namespace ouinv {

/// A strictly positive quantity stored as its natural log. The inverse
/// Gaussian density grows like e^{R(x)} and the kernels decay accordingly;
/// nothing here is ever exponentiated except O(1) differences.
struct LogDensity {
    double logValue = 0.0;
    double value() const { return std::exp(logValue); }
};

/// Per-(model, t) kernel data. Immutable once built; shareable across
/// threads.
struct KernelCache {
    double t = 0.0;
    Mat Dt, Dmt;       // D_t, D_{-t}
    Mat expTB, expMTB; // e^{tB}, e^{-tB}
    Mat Qt, QtInv;
    double logDetQt = 0.0;
    // Stable factorization of the kernel quadratic form. With the whitened
    // propagator W = Qinf^{-1/2} e^{tB} Qinf^{1/2} one has
    //   <(Q_t^{-1}-Qinf^{-1})(x - D_t u), x - D_t u> = |C^T (W^T xw - uw)|^2,
    // xw = Qinf^{-1/2} x, uw = Qinf^{-1/2} u, C C^T = (I - W^T W)^{-1}.
    // Every factor here is bounded or decaying, so the form stays accurate
    // for nonnormal B at large t, where Q_t^{-1} - Qinf^{-1} is hopeless.
    Mat Wt;  // whitened propagator
    Mat CtT; // C^T = chol(I - W^T W) lower factor, inverted
    // Gaussian frame of the Lebesgue kernel in u: mean e^{-tB}x,
    // covariance Sigma = e^{-tB} Qt e^{-tB^T}. sigmaHalf is a PSD factor
    // (Sigma can be arbitrarily ill-conditioned for nonnormal B at large t).
    Mat sigma, sigmaHalf;
    double logDetSigmaHalf = 0.0;
    Mat qtChol;
    double lambdaMinQtInv = 0.0;
    double normExpTB = 0.0; // spectral norm
};

KernelCache make_kernel_cache(const Model& model, double t);

LogDensity log_gamma_inf(const Model& model, const Vec& x);
LogDensity log_gamma_minus_inf(const Model& model, const Vec& x);

/// Mehler kernel of the OU semigroup w.r.t. gamma_inf.
LogDensity log_kernel_ou(const Model& model, const KernelCache& c, const Vec& x, const Vec& u);

/// Kernel of the inverse OU semigroup w.r.t. gamma_{-inf}.
LogDensity log_kernel_uo(const Model& model, const KernelCache& c, const Vec& x, const Vec& u);

/// Kernel of the inverse OU semigroup w.r.t. Lebesgue measure.
LogDensity log_kernel_uo_lebesgue(const Model& model, const KernelCache& c, const Vec& x, const Vec& u);

/// Same kernel evaluated through its plain Gaussian form
/// (Kolmogorov route); independent code path used for cross-checks.
LogDensity log_kernel_uo_lebesgue_gauss(const Model& model, const KernelCache& c, const Vec& x, const Vec& u);

// convenience overloads building the cache on the fly
LogDensity log_kernel_ou(const Model& model, double t, const Vec& x, const Vec& u);
LogDensity log_kernel_uo(const Model& model, double t, const Vec& x, const Vec& u);
LogDensity log_kernel_uo_lebesgue(const Model& model, double t, const Vec& x, const Vec& u);

/// Envelope fit of the two-sided kernel bounds on one t-regime.
struct BoundFitReport {
    double tMin = 0.0, tMax = 0.0;
    double cLower = 0.0, CUpper = 0.0; // envelope of the exponent slope
    double minRatio = 0.0, maxRatio = 0.0;
    int sampleCount = 0;
    std::uint64_t seed = 0;
};

/// Fits the decay envelopes of the kernel bounds on the small-time grid
/// (subset of (0,1]) and the large-time grid (subset of [1, 20]).
std::pair<BoundFitReport, BoundFitReport> fit_kernel_bounds(const Model& model,
                                                            const std::vector<double>& tGridSmall,
                                                            const std::vector<double>& tGridLarge,
                                                            int samplesPerT, std::uint64_t seed);

/// Log prefactor of the small-time bound form: value of
/// log K_t^{UO}(x, D_{-t}x) + R(x) + (n/2) log t  (x-independent).
double small_time_log_prefactor(const Model& model, const KernelCache& c);

/// Log prefactor of the large-time bound form: value of
/// log K_t^{UO}(x, D_{-t}x) + R(x) + |tr B| t.
double large_time_log_prefactor(const Model& model, const KernelCache& c);

} // namespace ouinv
