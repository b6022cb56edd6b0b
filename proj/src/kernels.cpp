#include "ouinv/kernels.hpp"

#include <cmath>

#include "ouinv/rng.hpp"

namespace ouinv {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

KernelCache make_kernel_cache(const Model& model, double t) {
    if (!(t > 0.0) || !std::isfinite(t))
        throw NonPositiveTime("make_kernel_cache: t must be positive");
    if (t < 1e-14)
        throw SingularCovariance("make_kernel_cache: Q_t numerically singular");

    KernelCache c;
    c.t = t;
    c.expTB = matrix_exp(t * model.B);
    c.expMTB = matrix_exp(-t * model.B);
    c.Dt = model.Qinf * matrix_exp(-t * model.B.transpose()) * model.QinfInv;
    c.Dmt = model.Qinf * matrix_exp(t * model.B.transpose()) * model.QinfInv;
    c.Qt = symmetrize(model.Qinf - c.expTB * model.Qinf * c.expTB.transpose());

    Eigen::LLT<Mat> llt(c.Qt);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("make_kernel_cache: Cholesky of Q_t failed");
    c.qtChol = llt.matrixL();
    c.logDetQt = 2.0 * c.qtChol.diagonal().array().log().sum();
    c.QtInv = symmetrize(llt.solve(Mat::Identity(model.dim, model.dim)));

    c.Wt = model.QinfInvSqrt * c.expTB * model.QinfSqrt;
    Mat G = symmetrize(Mat::Identity(model.dim, model.dim) - c.Wt.transpose() * c.Wt);
    Eigen::LLT<Mat> lltG(G);
    if (lltG.info() != Eigen::Success)
        throw SingularCovariance("make_kernel_cache: I - W^T W not positive definite");
    Mat L = lltG.matrixL();
    c.CtT = L.triangularView<Eigen::Lower>().solve(Mat::Identity(model.dim, model.dim));

    c.sigma = symmetrize(c.expMTB * c.Qt * c.expMTB.transpose());
    std::tie(c.sigmaHalf, c.logDetSigmaHalf) = psd_factor(c.sigma);

    c.lambdaMinQtInv = min_eigenvalue(c.QtInv);
    Eigen::JacobiSVD<Mat> svd(c.expTB);
    c.normExpTB = svd.singularValues()(0);
    return c;
}

LogDensity log_gamma_inf(const Model& model, const Vec& x) {
    double lg = -0.5 * model.dim * kLog2Pi - 0.5 * model.logDetQinf - R_form(model, x);
    return {lg};
}

LogDensity log_gamma_minus_inf(const Model& model, const Vec& x) {
    double lg = 0.5 * model.dim * kLog2Pi + 0.5 * model.logDetQinf + R_form(model, x);
    return {lg};
}

namespace {

// <(Q_t^{-1}-Qinf^{-1}) (b - D_t a), b - D_t a> in the stable factored form
double mehler_qform(const Model& model, const KernelCache& c, const Vec& a, const Vec& b) {
    Vec aw = model.QinfInvSqrt * a;
    Vec bw = model.QinfInvSqrt * b;
    return (c.CtT * (c.Wt.transpose() * bw - aw)).squaredNorm();
}

} // namespace

LogDensity log_kernel_ou(const Model& model, const KernelCache& c, const Vec& x, const Vec& u) {
    double lg = 0.5 * (model.logDetQinf - c.logDetQt) + R_form(model, x) -
                0.5 * mehler_qform(model, c, x, u);
    return {lg};
}

LogDensity log_kernel_uo(const Model& model, const KernelCache& c, const Vec& x, const Vec& u) {
    double lg = -model.dim * kLog2Pi - 0.5 * (model.logDetQinf + c.logDetQt) +
                c.t * model.traceB - R_form(model, x) - 0.5 * mehler_qform(model, c, u, x);
    return {lg};
}

LogDensity log_kernel_uo_lebesgue(const Model& model, const KernelCache& c, const Vec& x, const Vec& u) {
    double lg = -0.5 * model.dim * kLog2Pi - 0.5 * c.logDetQt + c.t * model.traceB +
                R_form(model, u) - R_form(model, x) - 0.5 * mehler_qform(model, c, u, x);
    return {lg};
}

LogDensity log_kernel_uo_lebesgue_gauss(const Model& model, const KernelCache& c, const Vec& x, const Vec& u) {
    Vec w = c.expTB * u - x;
    double lg = -0.5 * model.dim * kLog2Pi - 0.5 * c.logDetQt + c.t * model.traceB -
                0.5 * qform(c.QtInv, w);
    return {lg};
}

LogDensity log_kernel_ou(const Model& model, double t, const Vec& x, const Vec& u) {
    return log_kernel_ou(model, make_kernel_cache(model, t), x, u);
}
LogDensity log_kernel_uo(const Model& model, double t, const Vec& x, const Vec& u) {
    return log_kernel_uo(model, make_kernel_cache(model, t), x, u);
}
LogDensity log_kernel_uo_lebesgue(const Model& model, double t, const Vec& x, const Vec& u) {
    return log_kernel_uo_lebesgue(model, make_kernel_cache(model, t), x, u);
}

double small_time_log_prefactor(const Model& model, const KernelCache& c) {
    return -model.dim * kLog2Pi - 0.5 * (model.logDetQinf + c.logDetQt) + c.t * model.traceB +
           0.5 * model.dim * std::log(c.t);
}

double large_time_log_prefactor(const Model& model, const KernelCache& c) {
    return -model.dim * kLog2Pi - 0.5 * (model.logDetQinf + c.logDetQt) + c.t * model.traceB +
           std::abs(model.traceB) * c.t;
}

namespace {

BoundFitReport fit_regime(const Model& model, const std::vector<double>& tGrid, bool smallTime,
                          int samplesPerT, std::uint64_t seed) {
    BoundFitReport rep;
    rep.tMin = tGrid.front();
    rep.tMax = tGrid.back();
    rep.sampleCount = samplesPerT * static_cast<int>(tGrid.size());
    rep.seed = seed;

    std::vector<double> slopes;
    std::vector<double> rs, ds; // residual statistic and distance statistic
    for (size_t ti = 0; ti < tGrid.size(); ++ti) {
        const double t = tGrid[ti];
        KernelCache c = make_kernel_cache(model, t);
        const double pref = smallTime ? small_time_log_prefactor(model, c)
                                      : large_time_log_prefactor(model, c);
        Rng rng = make_rng(seed, ti);
        for (int i = 0; i < samplesPerT; ++i) {
            Vec x = uniform_ball(rng, Vec::Zero(model.dim), 4.0);
            Vec g = standard_normal(rng, model.dim);
            Vec base = c.Dmt * x;
            Vec u = smallTime ? Vec(base + std::sqrt(t) * g) : Vec(base + g);
            double d = smallTime ? (base - u).squaredNorm() / t : (base - u).squaredNorm();
            double r = log_kernel_uo(model, c, x, u).logValue + R_form(model, x) +
                       (smallTime ? 0.5 * model.dim * std::log(t)
                                  : std::abs(model.traceB) * t);
            rs.push_back(r - pref);
            ds.push_back(d);
            if (d > 0.25) slopes.push_back((pref - r) / d);
        }
    }
    if (slopes.size() < 8) throw DegenerateSample("fit_kernel_bounds: too few spread samples");
    double dMin = *std::min_element(ds.begin(), ds.end());
    double dMax = *std::max_element(ds.begin(), ds.end());
    if (dMax - dMin < 1e-9) throw DegenerateSample("fit_kernel_bounds: all distances equal");

    rep.cLower = *std::min_element(slopes.begin(), slopes.end());
    rep.CUpper = *std::max_element(slopes.begin(), slopes.end());

    // two-sided band: with the fitted envelope slopes, the kernel sits between
    // the lower form (slope CUpper) and the upper form (slope cLower)
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < rs.size(); ++i) {
        lo = std::min(lo, rs[i] + rep.CUpper * ds[i]);
        hi = std::max(hi, rs[i] + rep.cLower * ds[i]);
    }
    rep.minRatio = std::exp(lo);
    rep.maxRatio = std::exp(hi);
    if (!(rep.cLower > 0.0) || !std::isfinite(rep.CUpper) || !(rep.minRatio > 0.0) ||
        !std::isfinite(rep.maxRatio))
        throw Error("fit_kernel_bounds: envelope not two-sided finite");
    return rep;
}

} // namespace

std::pair<BoundFitReport, BoundFitReport> fit_kernel_bounds(const Model& model,
                                                            const std::vector<double>& tGridSmall,
                                                            const std::vector<double>& tGridLarge,
                                                            int samplesPerT, std::uint64_t seed) {
    for (double t : tGridSmall)
        if (!(t > 0.0 && t <= 1.0)) throw Error("fit_kernel_bounds: small grid must lie in (0,1]");
    for (double t : tGridLarge)
        if (!(t >= 1.0 && t <= 20.0)) throw Error("fit_kernel_bounds: large grid must lie in [1,20]");
    return {fit_regime(model, tGridSmall, true, samplesPerT, seed),
            fit_regime(model, tGridLarge, false, samplesPerT, seed ^ 0x9e3779b97f4a7c15ULL)};
}

} // namespace ouinv
