#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "ouinv/errors.hpp"
#include "ouinv/linalg.hpp"

namespace ouinv {

/// Nodes/weights of the n-point Gauss-Hermite rule for weight e^{-x^2},
/// computed by Golub-Welsch on the Jacobi matrix.
struct HermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const HermiteRule& hermite_rule(int n);

/// Nodes/weights of the n-point Gauss-Legendre rule on [-1, 1].
struct LegendreRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

const LegendreRule& legendre_rule(int n);

/// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int maxDepth = 40);

/// Entrywise adaptive Simpson for matrix-valued integrands; error control in
/// the Frobenius norm.
Mat adaptive_simpson_matrix(const std::function<Mat(double)>& f, double a, double b,
                            double tol, int maxDepth = 40);

inline double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(const std::vector<double>& v);

/// log of the integral of e^{g} over [a, b], for g that may reach far beyond
/// double range. Panel-wise Gauss-Legendre accumulated in log domain; panels
/// are split until the 8- and 16-point values agree to `tolLog`.
double log_integral_exp(const std::function<double(double)>& g, double a, double b,
                        double tolLog = 1e-9);

} // namespace ouinv
