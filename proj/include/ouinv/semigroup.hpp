#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "ouinv/kernels.hpp"
#include "ouinv/model.hpp"

namespace ouinv {

enum class QuadKind { TensorGaussian, MonteCarlo };

struct QuadratureSpec {
    QuadKind kind = QuadKind::TensorGaussian;
    int nodesPerAxis = 64;
    long sampleCount = 100000;
    std::uint64_t seed = 1;
    double truncationRadius = 8.0; // standard deviations of the Gaussian factor
    double indicatorCellSize = 0.0; // 0 = radius/64
};

/// Values of a function tabulated on a uniform axis-aligned grid, evaluated
/// by cubic (Catmull-Rom) interpolation; zero outside the box.
struct TabulatedGrid {
    Vec lo, hi;
    std::vector<int> npts;
    std::vector<double> values; // row-major over axes
    double at(const Vec& x) const;
};

struct TestFunction {
    enum class Kind { Constant, Linear, Indicator, GaussianBump, Tabulated };
    Kind kind = Kind::Constant;
    double amplitude = 1.0;
    double constant = 1.0;
    Vec linear;
    Vec center;
    double radius = 0.0;
    double sigma = 1.0;
    std::shared_ptr<TabulatedGrid> table;

    double operator()(const Vec& x) const;

    static TestFunction constant_fn(double c = 1.0);
    static TestFunction linear_fn(const Vec& v);
    static TestFunction indicator_ball(const Vec& center, double radius, double amplitude = 1.0);
    static TestFunction gaussian_bump(const Vec& center, double sigma, double amplitude = 1.0);
    static TestFunction tabulated(std::shared_ptr<TabulatedGrid> grid);
};

struct ApplyResult {
    double value = 0.0;
    double errorEstimate = 0.0;
};

/// H_t^{UO} f(x) through the Kolmogorov formula: Gaussian quadrature (or MC)
/// in the variable of the Gaussian weight.
ApplyResult apply_kolmogorov(const Model& model, const TestFunction& f, double t, const Vec& x,
                             const QuadratureSpec& quad);

/// H_t^{UO} f(x) as the integral of the log-domain kernel against f and the
/// gamma_{-inf} density, over the region where the kernel's Gaussian factor
/// concentrates.
ApplyResult apply_kernel(const Model& model, const TestFunction& f, double t, const Vec& x,
                         const QuadratureSpec& quad);

/// max over xGrid of |H_t(H_s f) - H_{t+s} f|; the inner application is
/// tabulated and interpolated, with the resolution doubled until the
/// deviation stabilizes.
double check_semigroup_law(const Model& model, const TestFunction& f, double t, double s,
                           const std::vector<Vec>& xGrid, const QuadratureSpec& quad);

struct SymmetryResult {
    double lhs = 0.0;   // <H_t f, g>_{gamma_{-inf}}
    double rhs = 0.0;   // <f, H_t g>_{gamma_{-inf}}
    double errorEstimate = 0.0;
};

/// Both pairings of Gaussian-bump test functions under H_t.
SymmetryResult check_symmetry(const Model& model, const TestFunction& f, const TestFunction& g,
                              double t, const QuadratureSpec& quad);

} // namespace ouinv
