#include "ouinv/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "ouinv/quadrature.hpp"
#include "ouinv/rng.hpp"

namespace ouinv {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

PolarCoord to_polar(const Model& model, const Vec& x, double beta) {
    if (x.norm() == 0.0) throw ZeroVector("to_polar: x must be nonzero");
    if (!(beta > 0.0)) throw Error("to_polar: beta must be positive");

    FlowEvaluator flow(model, x);
    // psi(s) = R(D_{-s} x) - beta is strictly decreasing in s
    auto psi = [&](double s) { return flow.r_of(-s) - beta; };

    double lo = -1.0, hi = 1.0;
    while (psi(lo) <= 0.0) {
        lo *= 2.0;
        if (lo < -200.0) throw RootFindFailed("to_polar: bracket not found (lo)");
    }
    while (psi(hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 200.0) throw RootFindFailed("to_polar: bracket not found (hi)");
    }
    for (int i = 0; i < 90 && hi - lo > 1e-14 * (1.0 + std::abs(lo) + std::abs(hi)); ++i) {
        double mid = 0.5 * (lo + hi);
        (psi(mid) > 0.0 ? lo : hi) = mid;
    }
    double s = 0.5 * (lo + hi);
    // Newton polish with the flow derivative d/ds R(D_s x)
    for (int i = 0; i < 4; ++i) {
        double val = psi(s);
        double der = -flow.r_prime(-s);
        if (der == 0.0) break;
        double step = val / der;
        if (!std::isfinite(step)) break;
        s -= step;
        if (std::abs(val) <= 1e-13 * beta) break;
    }
    PolarCoord p;
    p.s = s;
    p.beta = beta;
    p.xt = flow.point(-s);
    if (std::abs(R_form(model, p.xt) - beta) > 1e-10 * beta)
        throw RootFindFailed("to_polar: did not converge to the requested level");
    return p;
}

Vec from_polar(const Model& model, const PolarCoord& p) {
    return FlowEvaluator(model, p.xt).point(p.s);
}

double polar_area_element(const Model& model, const Vec& xt, double s) {
    Vec qi = model.QinfInv * xt;
    return std::exp(-s * model.traceB) * (model.QSqrt * qi).squaredNorm() / (2.0 * qi.norm());
}

Vec project_to_ellipsoid(const Model& model, const Vec& dir, double beta) {
    double r = R_form(model, dir);
    if (!(r > 0.0)) throw ZeroVector("project_to_ellipsoid: direction must be nonzero");
    return std::sqrt(beta / r) * dir;
}

Vec ellipse_point(const Model& model, double beta, double theta) {
    if (model.dim != 2) throw Error("ellipse_point: n = 2 only");
    Vec c(2);
    c << std::cos(theta), std::sin(theta);
    return std::sqrt(2.0 * beta) * (model.QinfSqrt * c);
}

double gamma_sublevel_measure(const Model& model, double beta) {
    const int n = model.dim;
    const double rmax = std::sqrt(2.0 * beta);
    double surf; // area of the unit sphere S^{n-1}
    if (n == 1) surf = 2.0;
    else if (n == 2) surf = 2.0 * M_PI;
    else surf = 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
    double radial = adaptive_simpson(
        [n](double r) { return std::pow(r, n - 1) * std::exp(0.5 * r * r); }, 0.0, rmax,
        1e-12 * std::exp(beta));
    return std::pow(2.0 * M_PI, 0.5 * n) * std::exp(model.logDetQinf) * surf * radial;
}

namespace {

// integrand of the tube measure over the cap at a fixed flow time s >= 0:
// gamma-density prefactor * e^{R(D_{-s} xt)} * e^{s tr B} * area element at xt
double tube_cap_integral(const Model& model, const Tube& tube,
                         const std::vector<Vec>& capPts, const std::vector<double>& capWeights,
                         const std::vector<FlowEvaluator>& flows, double s) {
    const double pref = std::exp(0.5 * model.dim * kLog2Pi + 0.5 * model.logDetQinf);
    double total = 0.0;
    for (size_t i = 0; i < capPts.size(); ++i) {
        double r = flows[i].r_of(-s);
        Vec qi = model.QinfInv * capPts[i];
        double w = (model.QSqrt * qi).squaredNorm() / (2.0 * qi.norm());
        total += capWeights[i] * pref * std::exp(r + s * model.traceB) * w;
    }
    return total;
}

double tube_measure_quadrature(const Model& model, const Tube& tube) {
    const int n = model.dim;
    std::vector<Vec> capPts;
    std::vector<double> capWeights; // dS weights

    if (n == 1) {
        for (double sign : {1.0, -1.0}) {
            Vec pt = sign * project_to_ellipsoid(model, Vec::Ones(1), tube.beta);
            if ((pt - tube.center).norm() < tube.radius) {
                capPts.push_back(pt);
                capWeights.push_back(1.0); // counting measure
            }
        }
    } else if (n == 2) {
        // composite midpoint in theta over the in-cap arc
        const int K = 4096;
        Vec c0 = model.QinfInvSqrt * tube.center / std::sqrt(2.0 * tube.beta);
        double thetaC = std::atan2(c0[1], c0[0]);
        for (int i = 0; i < K; ++i) {
            double th = thetaC - M_PI + 2.0 * M_PI * (i + 0.5) / K;
            Vec pt = ellipse_point(model, tube.beta, th);
            if ((pt - tube.center).norm() < tube.radius) {
                Vec tangent(2);
                tangent << -std::sin(th), std::cos(th);
                double speed = std::sqrt(2.0 * tube.beta) * (model.QinfSqrt * tangent).norm();
                capPts.push_back(pt);
                capWeights.push_back(speed * 2.0 * M_PI / K);
            }
        }
    } else {
        throw Error("tube_measure: polar quadrature supports n <= 2");
    }
    if (capPts.empty()) return 0.0;

    std::vector<FlowEvaluator> flows;
    flows.reserve(capPts.size());
    for (const Vec& p : capPts) flows.emplace_back(model, p);

    auto I = [&](double s) {
        return tube_cap_integral(model, tube, capPts, capWeights, flows, s);
    };
    double head = adaptive_simpson(I, 0.0, 1.0, 1e-9 * I(0.0));
    double total = head;
    // extend in unit steps until the remaining tail is negligible
    double s0 = 1.0;
    for (int k = 0; k < 200; ++k) {
        double tail = I(s0) / std::abs(model.traceB); // I decays at least like e^{s trB}
        if (tail <= 1e-8 * total) return total;
        double seg = adaptive_simpson(I, s0, s0 + 1.0, 1e-9 * std::max(total, 1e-300));
        total += seg;
        s0 += 1.0;
    }
    throw TailNotNegligible("tube_measure: s-integral tail did not decay");
}

double tube_measure_mc(const Model& model, const Tube& tube, std::uint64_t seed, long samples) {
    const int n = model.dim;
    const double rmax = std::sqrt(2.0 * tube.beta);

    // radial CDF table for the gamma_{-inf}-restricted sampler in whitened
    // coordinates: density r^{n-1} e^{r^2/2} on [0, rmax]
    const int K = 8192;
    std::vector<double> cdf(K + 1, 0.0);
    auto dens = [&](double r) { return std::pow(r, n - 1) * std::exp(0.5 * r * r - tube.beta); };
    for (int i = 1; i <= K; ++i) {
        double r0 = rmax * (i - 1) / K, r1 = rmax * i / K;
        cdf[i] = cdf[i - 1] + 0.5 * (dens(r0) + dens(r1)) * (r1 - r0);
    }
    const double totalMass = gamma_sublevel_measure(model, tube.beta);

    long hits = 0;
    const long blockSize = 8192;
    const long nBlocks = std::max<long>(1, samples / blockSize);
    for (long b = 0; b < nBlocks; ++b) {
        Rng rng = make_rng(seed, static_cast<std::uint64_t>(b));
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (long i = 0; i < blockSize; ++i) {
            double target = ud(rng) * cdf[K];
            auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
            int j = std::max<int>(1, static_cast<int>(it - cdf.begin()));
            double frac = (target - cdf[j - 1]) / std::max(cdf[j] - cdf[j - 1], 1e-300);
            double r = rmax * (j - 1 + frac) / K;
            Vec x = model.QinfSqrt * (r * unit_sphere(rng, n));
            if (x.norm() == 0.0) continue;
            PolarCoord p = to_polar(model, x, tube.beta);
            if (p.s <= 0.0 && (p.xt - tube.center).norm() < tube.radius) ++hits;
        }
    }
    return totalMass * static_cast<double>(hits) / (nBlocks * blockSize);
}

} // namespace

double tube_measure(const Model& model, const Tube& tube, TubeMethod method, std::uint64_t seed,
                    long mcSamples) {
    if (!(tube.beta >= 4.0)) throw Error("tube_measure: beta >= 4 required");
    if (!(tube.radius > 0.0)) throw Error("tube_measure: radius must be positive");
    if (std::abs(R_form(model, tube.center) - tube.beta) > 1e-8 * tube.beta)
        throw Error("tube_measure: center must lie on E_beta");
    if (method == TubeMethod::PolarQuadrature) return tube_measure_quadrature(model, tube);
    return tube_measure_mc(model, tube, seed, mcSamples);
}

DistanceBoundReport check_distance_bounds(const Model& model, double beta, int sampleCount,
                                          std::uint64_t seed) {
    if (!(beta >= 4.0)) throw Error("check_distance_bounds: beta >= 4 required");
    DistanceBoundReport rep;
    rep.sampleCount = sampleCount;
    rep.seed = seed;
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);

    double lem1Min = std::numeric_limits<double>::infinity();
    double lem2Min = std::numeric_limits<double>::infinity();
    const double sqrtBeta = std::sqrt(beta);

    int accepted = 0;
    while (accepted < sampleCount) {
        Vec xt0 = project_to_ellipsoid(model, unit_sphere(rng, model.dim), beta);
        Vec xt1 = project_to_ellipsoid(model, unit_sphere(rng, model.dim), beta);

        // s0 confined to the regime R(x0) > beta/2
        FlowEvaluator flow0(model, xt0);
        double sHalf = -2.0;
        {
            double lo = -8.0, hi = 0.0; // R(D_s xt0) = beta/2 has its root at s < 0
            while (flow0.r_of(lo) > 0.5 * beta && lo > -64.0) lo *= 2.0;
            for (int i = 0; i < 60; ++i) {
                double mid = 0.5 * (lo + hi);
                (flow0.r_of(mid) > 0.5 * beta ? hi : lo) = mid;
            }
            sHalf = hi;
        }
        double s0 = sHalf + 1e-4 + (2.0 - sHalf - 1e-4) * ud(rng);
        double s1 = -2.0 + 4.0 * ud(rng);
        Vec x0 = flow0.point(s0);
        Vec x1 = FlowEvaluator(model, xt1).point(s1);
        ++accepted;

        double dx = (x0 - x1).norm();
        double dxt = (xt0 - xt1).norm();
        if (dxt >= 1e-6) lem1Min = std::min(lem1Min, dx / dxt);
        if (s1 >= 0.0 && std::abs(s0 - s1) >= 1e-6)
            lem2Min = std::min(lem2Min, dx / (sqrtBeta * std::abs(s0 - s1)));
    }
    rep.lem1Min = lem1Min;
    rep.lem2Min = lem2Min;
    if (!(rep.lem1Min > 0.0) || !(rep.lem2Min > 0.0))
        throw Error("check_distance_bounds: degenerate ratio");
    return rep;
}

std::optional<AnnulusIndex> annulus_index(const Model& model, double t, const Vec& x, const Vec& u) {
    if (!(t > 0.0)) throw NonPositiveTime("annulus_index: t must be positive");
    if ((x - u).norm() <= 1.0 / (1.0 + x.norm())) return std::nullopt;
    Vec base = D_matrix(model, -t) * x;
    double d = (u - base).norm();
    double scale = std::min(1.0, std::sqrt(t));
    AnnulusIndex idx;
    idx.t = t;
    if (d <= scale) {
        idx.m = 0;
        return idx;
    }
    int m = 1;
    while (std::ldexp(scale, m) < d && m < 1024) ++m;
    idx.m = m;
    return idx;
}

double check_rho_integral(const Model& model, const Vec& xt, double rhoMax) {
    if (std::abs(R_form(model, xt) - 1.0) > 1e-9)
        throw Error("check_rho_integral: R(xt) = 1 required");
    if (!(rhoMax > 0.0 && rhoMax <= 40.0))
        throw Error("check_rho_integral: rhoMax in (0, 40] required");
    const double T = std::abs(model.traceB);
    const double b = rhoMax;
    FlowEvaluator flow(model, xt);

    // ratio = |D_b xt|^2 int_0^b e^{-h(rho)} drho with
    // h(rho) = g(b) - g(rho) = T (b - rho) + int_rho^b d/ds R(D_s xt) ds.
    // g itself reaches ~e^{2Cb} and has no usable absolute precision there;
    // the difference h is built from the (positive) flow derivative instead.
    auto rprime = [&](double s) { return R_flow_derivative(model, flow.point(s)); };
    auto h = [&](double rho) {
        if (rho >= b) return 0.0;
        double scale = std::max(rprime(b), rprime(rho)) * (b - rho);
        return T * (b - rho) + adaptive_simpson(rprime, rho, b, 1e-11 * std::max(scale, 1e-12));
    };

    // integrate from the right end down to where e^{-h} stops mattering
    const double hEnd = T + rprime(b); // h'(b)
    const double cutLevel = 60.0 + std::max(0.0, std::log(hEnd) + std::log(std::max(b, 1.0)));
    double lo = 0.0;
    if (h(0.0) > cutLevel) {
        double a0 = 0.0, b0 = b;
        for (int i = 0; i < 200 && b0 - a0 > 1e-13 * b; ++i) {
            double mid = 0.5 * (a0 + b0);
            (h(mid) > cutLevel ? a0 : b0) = mid;
        }
        lo = a0;
    }
    double integral = adaptive_simpson([&](double rho) { return std::exp(-h(rho)); }, lo, b,
                                       1e-10 * std::max(b - lo, 1e-12));
    return flow.point(b).squaredNorm() * integral;
}

} // namespace ouinv
