#include "ouinv/ballgrid.hpp"

#include <cmath>

#include "ouinv/kernels.hpp"

namespace ouinv {

BallGrid make_ball_grid(const Vec& center, double radius, double h) {
    const int n = static_cast<int>(center.size());
    BallGrid g;
    g.h = h;
    if (n == 1) {
        int k = std::max(2, static_cast<int>(std::ceil(2.0 * radius / h)));
        double step = 2.0 * radius / k;
        for (int i = 0; i < k; ++i) {
            Vec p(1);
            p[0] = center[0] - radius + (i + 0.5) * step;
            g.points.push_back(p);
            g.volumes.push_back(step);
        }
    } else if (n == 2) {
        // exact ring x angle cells; ring areas are exact, midpoint in angle
        int nr = std::max(2, static_cast<int>(std::ceil(radius / h)));
        for (int i = 0; i < nr; ++i) {
            double r0 = radius * i / nr, r1 = radius * (i + 1) / nr;
            double rc = std::sqrt(0.5 * (r0 * r0 + r1 * r1)); // area centroid radius
            int na = std::max(8, static_cast<int>(std::ceil(2.0 * M_PI * rc / h)));
            double ringArea = M_PI * (r1 * r1 - r0 * r0);
            for (int j = 0; j < na; ++j) {
                double th = 2.0 * M_PI * (j + 0.5) / na;
                Vec p(2);
                p[0] = center[0] + rc * std::cos(th);
                p[1] = center[1] + rc * std::sin(th);
                g.points.push_back(p);
                g.volumes.push_back(ringArea / na);
            }
        }
    } else {
        int k = std::max(2, static_cast<int>(std::ceil(2.0 * radius / h)));
        double step = 2.0 * radius / k;
        double cellVol = std::pow(step, n);
        std::vector<int> idx(n, 0);
        while (true) {
            Vec p(n);
            for (int d = 0; d < n; ++d)
                p[d] = center[d] - radius + (idx[d] + 0.5) * step;
            if ((p - center).norm() <= radius) {
                g.points.push_back(p);
                g.volumes.push_back(cellVol);
            }
            int d = 0;
            while (d < n && ++idx[d] == k) idx[d++] = 0;
            if (d == n) break;
        }
    }
    return g;
}

double gamma_minus_inf_density(const Model& model, const Vec& x) {
    return std::exp(log_gamma_minus_inf(model, x).logValue);
}

double gamma_ball_measure(const Model& model, const BallGrid& grid) {
    double s = 0.0;
    for (size_t i = 0; i < grid.points.size(); ++i)
        s += grid.volumes[i] * gamma_minus_inf_density(model, grid.points[i]);
    return s;
}

} // namespace ouinv
