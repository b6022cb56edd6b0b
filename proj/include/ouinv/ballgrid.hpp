#pragma once

#include <vector>

#include "ouinv/model.hpp"

namespace ouinv {

/// Midpoint cells covering a Euclidean ball. For n = 1 the cells are exact
/// subintervals; for n = 2 exact polar (ring x angle) cells; for n = 3
/// cartesian cells kept when their center lies inside.
struct BallGrid {
    std::vector<Vec> points;
    std::vector<double> volumes; // Lebesgue volume per cell
    double h = 0.0;
};

BallGrid make_ball_grid(const Vec& center, double radius, double h);

/// gamma_{-inf} mass of the ball, computed on the same grid.
double gamma_ball_measure(const Model& model, const BallGrid& grid);

/// gamma_{-inf} density at a point (plain value; fine for |x| up to ~25).
double gamma_minus_inf_density(const Model& model, const Vec& x);

} // namespace ouinv
