#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ouinv/model.hpp"

namespace ouinv {

/// x = D_s xt with R(xt) = beta.
struct PolarCoord {
    double s = 0.0;
    Vec xt;
    double beta = 0.0;
};

/// Forbidden-zone tube over the spherical cap {y' in E_beta : |y' - center| < radius}.
struct Tube {
    Vec center;
    double radius = 0.0;
    double beta = 0.0;
};

struct AnnulusIndex {
    int m = 0;
    double t = 0.0;
};

/// Unique polar coordinates of x != 0 at level beta; |R(xt) - beta| <= 1e-12 beta.
PolarCoord to_polar(const Model& model, const Vec& x, double beta);

Vec from_polar(const Model& model, const PolarCoord& p);

/// Density of Lebesgue measure against dS(xt) ds at x = D_s xt:
/// e^{-s tr B} |Q^{1/2} Qinf^{-1} xt|^2 / (2 |Qinf^{-1} xt|).
double polar_area_element(const Model& model, const Vec& xt, double s);

enum class TubeMethod { PolarQuadrature, MonteCarlo };

/// gamma_{-inf} measure of the tube {D_{-s} y' : s >= 0, y' in cap}.
double tube_measure(const Model& model, const Tube& tube, TubeMethod method,
                    std::uint64_t seed = 1, long mcSamples = 400000);

/// gamma_{-inf} measure of the sublevel set {R(x) <= beta} (closed form up to
/// a 1-D radial quadrature).
double gamma_sublevel_measure(const Model& model, double beta);

/// Point of E_beta in direction dir (dir != 0): the positive multiple of dir
/// with R = beta.
Vec project_to_ellipsoid(const Model& model, const Vec& dir, double beta);

/// n = 2 parametrization xt(theta) = sqrt(2 beta) QinfSqrt (cos, sin).
Vec ellipse_point(const Model& model, double beta, double theta);

struct DistanceBoundReport {
    double lem1Min = 0.0; // min |x0-x1| / |xt0-xt1|
    double lem2Min = 0.0; // min |x0-x1| / (sqrt(beta) |s0-s1|), s1 >= 0
    int sampleCount = 0;
    std::uint64_t seed = 0;
};

/// Samples pairs with R(x0) > beta/2 and records the minima of the two
/// distance ratios.
DistanceBoundReport check_distance_bounds(const Model& model, double beta, int sampleCount,
                                          std::uint64_t seed);

/// Annulus membership of a global pair; nullopt when (x,u) is local.
std::optional<AnnulusIndex> annulus_index(const Model& model, double t, const Vec& x, const Vec& u);

/// lhs/rhs of the rho-integral inequality at level R(xt) = 1:
/// lhs = int_0^{rhoMax} e^{T rho} e^{R(D_rho xt)} drho,
/// rhs = e^{T rhoMax} e^{R(D_rhoMax xt)} |D_rhoMax xt|^{-2}, T = |tr B|.
/// Both sides are handled in log domain.
double check_rho_integral(const Model& model, const Vec& xt, double rhoMax);

} // namespace ouinv
