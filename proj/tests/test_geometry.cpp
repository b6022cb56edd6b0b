#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ouinv/geometry.hpp"
#include "ouinv/presets.hpp"
#include "ouinv/quadrature.hpp"
#include "ouinv/rng.hpp"

using namespace ouinv;

TEST_CASE("points on the ellipsoid have polar time zero") {
    Model m = preset_isotropic2d();
    Rng rng = make_rng(4);
    for (int i = 0; i < 20; ++i) {
        Vec xt = project_to_ellipsoid(m, unit_sphere(rng, 2), 2.5);
        PolarCoord p = to_polar(m, xt, 2.5);
        CHECK(std::abs(p.s) < 1e-10);
        CHECK((p.xt - xt).norm() < 1e-9);
    }
}

TEST_CASE("scalar polar coordinates: x = e at level one") {
    Model m = preset_salogni1d();
    Vec x(1);
    x << std::exp(1.0);
    PolarCoord p = to_polar(m, x, 1.0);
    CHECK(p.s == doctest::Approx(1.0).epsilon(1e-11));
    CHECK(p.xt[0] == doctest::Approx(1.0).epsilon(1e-11));
}

TEST_CASE("polar roundtrip on random points") {
    Rng rng = make_rng(13);
    for (const Model& m : {preset_salogni1d(), preset_isotropic2d(), preset_nonnormal2d()}) {
        for (int i = 0; i < 300; ++i) {
            Vec x = uniform_ball(rng, Vec::Zero(m.dim), 4.0);
            if (x.norm() < 1e-3) continue;
            for (double beta : {1.0, 4.0}) {
                PolarCoord p = to_polar(m, x, beta);
                CHECK(std::abs(R_form(m, p.xt) - beta) <= 1e-10 * beta);
                CHECK((from_polar(m, p) - x).norm() <= 1e-10 * x.norm());
            }
        }
    }
}

TEST_CASE("to_polar rejects the origin") {
    Model m = preset_isotropic2d();
    CHECK_THROWS_AS(to_polar(m, Vec::Zero(2), 1.0), ZeroVector);
}

TEST_CASE("scalar area element integrates segment lengths exactly") {
    Model m = preset_salogni1d();
    Vec xt(1);
    xt << 1.7;
    for (double h : {0.3, 1.1}) {
        // Lebesgue length of {D_s xt : s in [0, h]} = xt (e^h - 1)
        double viaElement = adaptive_simpson(
            [&](double s) { return polar_area_element(m, xt, s); }, 0.0, h, 1e-13);
        CHECK(viaElement == doctest::Approx(xt[0] * (std::exp(h) - 1.0)).epsilon(1e-10));
    }
}

TEST_CASE("isotropic area element at s = 0 equals |xt|") {
    Model m = preset_isotropic2d();
    Vec xt = project_to_ellipsoid(m, Vec::Ones(2), 3.0);
    CHECK(polar_area_element(m, xt, 0.0) == doctest::Approx(xt.norm()).epsilon(1e-12));
}

TEST_CASE("polar volume of a patch matches a Monte Carlo Lebesgue oracle") {
    Model m = preset_isotropic2d();
    const double beta = 2.0;
    const double th0 = 0.3, th1 = 0.9, s0 = -0.2, s1 = 0.4;

    // patch volume through the area-element formula
    auto inner = [&](double s) {
        return adaptive_simpson(
            [&](double th) {
                Vec xt = ellipse_point(m, beta, th);
                Vec tangent(2);
                tangent << -std::sin(th), std::cos(th);
                double speed = std::sqrt(2.0 * beta) * (m.QinfSqrt * tangent).norm();
                return polar_area_element(m, xt, s) * speed;
            },
            th0, th1, 1e-11);
    };
    double viaJacobian = adaptive_simpson(inner, s0, s1, 1e-10);

    // Monte Carlo volume of the image set
    double rLo = std::exp(s0) * std::sqrt(2.0 * beta * 0.5);
    double rHi = std::exp(s1) * std::sqrt(2.0 * beta * 0.5);
    Vec lo(2), hi(2);
    lo << rLo * std::cos(th1) * 0.9, rLo * std::sin(th0) * 0.9;
    hi << rHi * std::cos(th0) * 1.1, rHi * std::sin(th1) * 1.1;
    double boxVol = (hi - lo).prod();
    long hits = 0;
    const long N = 600000;
    Rng rng = make_rng(21);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (long i = 0; i < N; ++i) {
        Vec x(2);
        x << lo[0] + (hi[0] - lo[0]) * ud(rng), lo[1] + (hi[1] - lo[1]) * ud(rng);
        PolarCoord p = to_polar(m, x, beta);
        Vec w = m.QinfInvSqrt * p.xt / std::sqrt(2.0 * beta);
        double th = std::atan2(w[1], w[0]);
        if (p.s >= s0 && p.s <= s1 && th >= th0 && th <= th1) ++hits;
    }
    double viaMC = boxVol * static_cast<double>(hits) / N;
    CHECK(std::abs(viaJacobian - viaMC) <= 0.01 * viaJacobian);
}

TEST_CASE("tube measure: quadrature against Monte Carlo and cap-doubling") {
    Model m = preset_isotropic2d();
    Vec y = project_to_ellipsoid(m, Vec::Ones(2), 9.0);

    Tube half{y, 0.5, 9.0};
    double qHalf = tube_measure(m, half, TubeMethod::PolarQuadrature);
    double mc = tube_measure(m, half, TubeMethod::MonteCarlo, 5, 400000);
    CHECK(std::abs(qHalf - mc) <= 0.03 * qHalf);

    Tube quarter{y, 0.25, 9.0};
    double qQuarter = tube_measure(m, quarter, TubeMethod::PolarQuadrature);
    double ratio = qHalf / qQuarter; // cap area scales like a^{n-1}
    CHECK(ratio >= 1.5);
    CHECK(ratio <= 2.5);
}

TEST_CASE("tube measure ratio envelope over the beta/a grid") {
    Model m = preset_isotropic2d();
    double lo = 1e300, hi = 0.0;
    for (double beta : {9.0, 16.0, 25.0})
        for (double a : {0.25, 0.5, 1.0}) {
            Vec y = project_to_ellipsoid(m, Vec::Ones(2), beta);
            double meas = tube_measure(m, Tube{y, a, beta}, TubeMethod::PolarQuadrature);
            double ratio = meas / (a * std::exp(beta) / std::sqrt(beta));
            lo = std::min(lo, ratio);
            hi = std::max(hi, ratio);
        }
    CHECK(lo > 0.0);
    CHECK(std::isfinite(hi));
    CHECK(hi / lo < 3.0); // a single constant works across the grid
}

TEST_CASE("tube preconditions") {
    Model m = preset_isotropic2d();
    Vec y = project_to_ellipsoid(m, Vec::Ones(2), 2.0);
    CHECK_THROWS_AS(tube_measure(m, Tube{y, 0.5, 2.0}, TubeMethod::PolarQuadrature), Error);
}

TEST_CASE("scalar distance ratios match the closed forms") {
    Model m = preset_salogni1d();
    const double beta = 6.0;
    const double sqb = std::sqrt(beta);
    Vec plus(1), minus(1);
    plus << sqb;
    minus << -sqb;

    // opposite rays: |x0 - x1| / |xt0 - xt1| = (e^{s0} + e^{s1}) / 2
    for (double sa : {-0.2, 0.5, 1.5})
        for (double sb : {-1.0, 0.0, 2.0}) {
            Vec x0 = from_polar(m, PolarCoord{sa, plus, beta});
            Vec x1 = from_polar(m, PolarCoord{sb, minus, beta});
            double ratio = (x0 - x1).norm() / (plus - minus).norm();
            CHECK(ratio == doctest::Approx(0.5 * (std::exp(sa) + std::exp(sb))).epsilon(1e-12));
        }

    // same ray, s1 >= 0: |x0 - x1| / (sqrt(beta) |s0 - s1|) = |e^{s0}-e^{s1}|/|s0-s1|
    for (double sa : {-0.3, 0.8})
        for (double sb : {0.0, 1.2}) {
            if (std::abs(sa - sb) < 1e-9) continue;
            Vec x0 = from_polar(m, PolarCoord{sa, plus, beta});
            Vec x1 = from_polar(m, PolarCoord{sb, plus, beta});
            double ratio = (x0 - x1).norm() / (sqb * std::abs(sa - sb));
            CHECK(ratio == doctest::Approx(std::abs(std::exp(sa) - std::exp(sb)) /
                                           std::abs(sa - sb))
                               .epsilon(1e-12));
        }
}

TEST_CASE("distance-bound minima are positive on all presets") {
    for (const Model& m : {preset_salogni1d(), preset_isotropic2d(), preset_nonnormal2d()}) {
        DistanceBoundReport r = check_distance_bounds(m, 6.0, 400, 31);
        CHECK(r.lem1Min > 0.0);
        CHECK(r.lem2Min > 0.0);
    }
    Mat B(2, 2);
    B << -1.0, 5.0, 0.0, -1.0;
    Model defective = build_model(Mat::Identity(2, 2), B);
    DistanceBoundReport r = check_distance_bounds(defective, 6.0, 200, 31);
    CHECK(r.lem1Min > 0.0);
    CHECK(r.lem2Min > 0.0);
}

TEST_CASE("annulus membership follows the dyadic brackets") {
    Model m = preset_salogni1d();
    Vec x(1), u(1);

    // local pair: not global
    x << 0.2;
    u << 0.3;
    CHECK(!annulus_index(m, 0.5, x, u).has_value());

    // u exactly at D_{-t} x with a global pair: m = 0
    x << 3.0;
    double t = 1.0;
    u << std::exp(-t) * 3.0;
    REQUIRE((x - u).norm() > 1.0 / (1.0 + x.norm()));
    auto idx0 = annulus_index(m, t, x, u);
    REQUIRE(idx0.has_value());
    CHECK(idx0->m == 0);

    // |u - D_{-t}x| = 3 (1 ^ sqrt t): the bracket 2^{m-1} < 3 <= 2^m gives m = 2
    u << std::exp(-t) * 3.0 + 3.0;
    auto idx3 = annulus_index(m, t, x, u);
    REQUIRE(idx3.has_value());
    CHECK(idx3->m == 2);
}

TEST_CASE("annuli partition the global region") {
    Model m = preset_nonnormal2d();
    Rng rng = make_rng(37);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    int global = 0;
    for (int i = 0; i < 20000; ++i) {
        double t = std::pow(10.0, -2.0 + 3.0 * ud(rng));
        Vec x = uniform_ball(rng, Vec::Zero(2), 4.0);
        Vec u = uniform_ball(rng, Vec::Zero(2), 4.0);
        auto idx = annulus_index(m, t, x, u);
        bool isGlobal = (x - u).norm() > 1.0 / (1.0 + x.norm());
        CHECK(idx.has_value() == isGlobal);
        if (!idx) continue;
        ++global;
        double d = (u - D_matrix(m, -t) * x).norm();
        double scale = std::min(1.0, std::sqrt(t));
        if (idx->m == 0) {
            CHECK(d <= scale);
        } else {
            CHECK(d > std::ldexp(scale, idx->m - 1));
            CHECK(d <= std::ldexp(scale, idx->m));
        }
    }
    CHECK(global > 1000);
}

TEST_CASE("rho-integral ratio envelope stays finite") {
    for (const Model& m : {preset_isotropic2d(), preset_nonnormal2d()}) {
        Rng rng = make_rng(41);
        Vec xt = project_to_ellipsoid(m, unit_sphere(rng, 2), 1.0);
        double hi = 0.0;
        for (double rhoMax : {2.0, 5.0, 10.0, 20.0}) {
            double ratio = check_rho_integral(m, xt, rhoMax);
            CHECK(std::isfinite(ratio));
            CHECK(ratio > 0.0);
            hi = std::max(hi, ratio);
        }
        CHECK(std::isfinite(hi));
    }
}

TEST_CASE("rho-integral ratio vanishes with the upper limit") {
    Model m = preset_isotropic2d();
    Vec xt = project_to_ellipsoid(m, Vec::Ones(2), 1.0);
    CHECK(check_rho_integral(m, xt, 1e-3) < 2e-3);
}

TEST_CASE("scalar rho-integral stays finite out to large limits") {
    Model m = preset_salogni1d();
    Vec xt(1);
    xt << 1.0; // R = 1
    double prev = -1.0;
    for (double rhoMax : {2.0, 5.0, 10.0, 20.0, 40.0}) {
        double ratio = check_rho_integral(m, xt, rhoMax);
        CHECK(std::isfinite(ratio));
        CHECK(ratio > 0.0);
        prev = ratio;
    }
    (void)prev;
}
