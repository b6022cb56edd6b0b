#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ouinv/presets.hpp"
#include "ouinv/rng.hpp"
#include "ouinv/semigroup.hpp"

using namespace ouinv;

namespace {

std::vector<Vec> grid_points(int dim, double extent, double step) {
    std::vector<Vec> xs;
    if (dim == 1) {
        for (double v = -extent; v <= extent + 1e-12; v += step) {
            Vec x(1);
            x << v;
            xs.push_back(x);
        }
    } else {
        for (double a = -extent; a <= extent + 1e-12; a += step)
            for (double b = -extent; b <= extent + 1e-12; b += step) {
                Vec x(2);
                x << a, b;
                xs.push_back(x);
            }
    }
    return xs;
}

} // namespace

TEST_CASE("the constant function is preserved") {
    QuadratureSpec quad;
    TestFunction one = TestFunction::constant_fn(1.0);
    for (const Model& m : {preset_salogni1d(), preset_isotropic2d(), preset_nonnormal2d()}) {
        for (double t : {0.1, 1.0, 5.0})
            for (const Vec& x : grid_points(m.dim, 3.0, 3.0)) {
                CHECK(std::abs(apply_kolmogorov(m, one, t, x, quad).value - 1.0) <= 1e-8);
                CHECK(std::abs(apply_kernel(m, one, t, x, quad).value - 1.0) <= 1e-6);
            }
    }
}

TEST_CASE("linear functions evolve by e^{-tB}") {
    QuadratureSpec quad;
    for (const Model& m : {preset_salogni1d(), preset_nonnormal2d()}) {
        Vec v = Vec::Ones(m.dim);
        TestFunction f = TestFunction::linear_fn(v);
        for (double t : {0.5, 2.0})
            for (const Vec& x : grid_points(m.dim, 2.0, 2.0)) {
                double expect = v.dot(matrix_exp(-t * m.B) * x);
                CHECK(std::abs(apply_kolmogorov(m, f, t, x, quad).value - expect) <= 1e-8);
                CHECK(std::abs(apply_kernel(m, f, t, x, quad).value - expect) <=
                      1e-6 * (1.0 + std::abs(expect)));
            }
    }
}

TEST_CASE("the two integral representations agree on Gaussian bumps") {
    QuadratureSpec quad;
    for (const Model& m : {preset_salogni1d(), preset_isotropic2d()}) {
        TestFunction f = TestFunction::gaussian_bump(Vec::Zero(m.dim), 1.0);
        for (double t : {0.5, 2.0})
            for (const Vec& x : grid_points(m.dim, 2.0, 1.0)) {
                double a = apply_kolmogorov(m, f, t, x, quad).value;
                double b = apply_kernel(m, f, t, x, quad).value;
                CHECK(std::abs(a - b) <= 1e-5);
            }
    }
}

TEST_CASE("ball indicators: dual paths and probability bounds") {
    Model m = preset_salogni1d();
    QuadratureSpec quad;
    quad.indicatorCellSize = 0.5 / 512.0;
    Vec z = Vec::Zero(1);
    TestFunction f = TestFunction::indicator_ball(z, 0.5);
    ApplyResult kol = apply_kolmogorov(m, f, 1.0, z, quad); // erf-exact in 1-D
    ApplyResult ker = apply_kernel(m, f, 1.0, z, quad);
    CHECK(kol.value > 0.0);
    CHECK(kol.value < 1.0);
    CHECK(std::abs(kol.value - ker.value) <= 1e-4);
}

TEST_CASE("ball indicators in two dimensions") {
    Model m = preset_isotropic2d();
    QuadratureSpec quad;
    Vec c = Vec::Zero(2);
    c[0] = 0.4;
    TestFunction f = TestFunction::indicator_ball(c, 0.6);
    Vec x = Vec::Zero(2);
    double a = apply_kolmogorov(m, f, 0.8, x, quad).value;
    double b = apply_kernel(m, f, 0.8, x, quad).value;
    CHECK(a > 0.0);
    CHECK(a < 1.0);
    CHECK(std::abs(a - b) <= 1e-4);
}

TEST_CASE("Monte Carlo paths reproduce the tensor values and are seed-deterministic") {
    Model m = preset_isotropic2d();
    QuadratureSpec tensor;
    QuadratureSpec mc;
    mc.kind = QuadKind::MonteCarlo;
    mc.sampleCount = 1 << 18;
    mc.seed = 99;
    TestFunction f = TestFunction::gaussian_bump(Vec::Zero(2), 1.0);
    Vec x = Vec::Ones(2);
    double ref = apply_kolmogorov(m, f, 1.0, x, tensor).value;
    ApplyResult a = apply_kolmogorov(m, f, 1.0, x, mc);
    ApplyResult b = apply_kolmogorov(m, f, 1.0, x, mc);
    CHECK(a.value == b.value); // identical seeded streams
    CHECK(std::abs(a.value - ref) <= 5.0 * std::max(a.errorEstimate, 1e-4));

    ApplyResult k = apply_kernel(m, f, 1.0, x, mc);
    CHECK(std::abs(k.value - ref) <= 5.0 * std::max(k.errorEstimate, 1e-4));
}

TEST_CASE("positivity is preserved") {
    Model m = preset_nonnormal2d();
    QuadratureSpec quad;
    TestFunction f = TestFunction::gaussian_bump(Vec::Ones(2) * 0.5, 0.3);
    for (const Vec& x : grid_points(2, 2.0, 1.0))
        CHECK(apply_kolmogorov(m, f, 0.7, x, quad).value >= -1e-10);
}

TEST_CASE("semigroup law for constants, linear functions and bumps") {
    QuadratureSpec quad;
    Model m = preset_salogni1d();
    auto xs = grid_points(1, 1.5, 0.75);

    TestFunction one = TestFunction::constant_fn(1.0);
    CHECK(check_semigroup_law(m, one, 0.5, 0.5, xs, quad) <= 2e-6);

    TestFunction lin = TestFunction::linear_fn(Vec::Ones(1));
    CHECK(check_semigroup_law(m, lin, 0.4, 0.8, xs, quad) <= 1e-5);

    TestFunction bump = TestFunction::gaussian_bump(Vec::Zero(1), 1.0);
    CHECK(check_semigroup_law(m, bump, 0.5, 0.5, xs, quad) <= 5e-4);
}

TEST_CASE("symmetry holds iff QB^T = BQ") {
    QuadratureSpec quad;
    quad.nodesPerAxis = 48;

    Model sym = preset_isotropic2d();
    Vec c1(2), c2(2);
    c1 << 0.8, 0.0;
    c2 << 0.0, -0.7;
    double cap = 1.0 / std::sqrt(sym.lambdaMaxQinfInv);
    TestFunction f = TestFunction::gaussian_bump(c1, 0.65 * cap);
    TestFunction g = TestFunction::gaussian_bump(c2, 0.8 * cap);
    SymmetryResult r = check_symmetry(sym, f, g, 0.7, quad);
    CHECK(std::abs(r.lhs - r.rhs) <= std::max(r.errorEstimate, 1e-9));

    Model non = preset_nonnormal2d();
    double capN = 1.0 / std::sqrt(non.lambdaMaxQinfInv);
    TestFunction fn = TestFunction::gaussian_bump(c1, 0.65 * capN);
    TestFunction gn = TestFunction::gaussian_bump(c2, 0.8 * capN);
    SymmetryResult rn = check_symmetry(non, fn, gn, 0.7, quad);
    CHECK(std::abs(rn.lhs - rn.rhs) > 10.0 * rn.errorEstimate);
}

TEST_CASE("check_symmetry rejects non-integrable bumps") {
    Model m = preset_nonnormal2d();
    QuadratureSpec quad;
    TestFunction wide = TestFunction::gaussian_bump(Vec::Zero(2), 5.0);
    CHECK_THROWS_AS(check_symmetry(m, wide, wide, 0.5, quad), NonIntegrable);
}

TEST_CASE("too few nodes cannot cover the truncation radius") {
    Model m = preset_salogni1d();
    QuadratureSpec quad;
    quad.nodesPerAxis = 7;
    TestFunction bump = TestFunction::gaussian_bump(Vec::Zero(1), 1.0);
    CHECK_THROWS_AS(apply_kernel(m, bump, 1.0, Vec::Zero(1), quad), TruncationDominates);
}

TEST_CASE("tabulated interpolation reproduces smooth functions") {
    auto grid = std::make_shared<TabulatedGrid>();
    grid->lo = Vec::Constant(1, -3.0);
    grid->hi = Vec::Constant(1, 3.0);
    grid->npts = {121};
    grid->values.resize(121);
    for (int i = 0; i < 121; ++i) {
        double x = -3.0 + 6.0 * i / 120.0;
        grid->values[i] = std::sin(x);
    }
    TestFunction f = TestFunction::tabulated(grid);
    Vec p(1);
    for (double x : {-2.71, -0.4, 0.33, 2.9}) {
        p << x;
        CHECK(f(p) == doctest::Approx(std::sin(x)).epsilon(1e-5));
    }
    p << 5.0; // outside the box
    CHECK(f(p) == 0.0);
}
