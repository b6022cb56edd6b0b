#include "ouinv/covering.hpp"

#include <algorithm>
#include <cmath>

#include "ouinv/parallel.hpp"
#include "ouinv/rng.hpp"

namespace ouinv {

std::vector<Vec> annulus_cloud(const Model& model, double alpha, int count, std::uint64_t seed) {
    const double L = std::log(1.0 / alpha);
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    std::vector<Vec> pts;
    pts.reserve(count);
    for (int i = 0; i < count; ++i) {
        double beta = (0.75 + 0.5 * ud(rng)) * L;
        pts.push_back(project_to_ellipsoid(model, unit_sphere(rng, model.dim), beta));
    }
    return pts;
}

bool zone_contains(const Model& model, const ForbiddenZone& zone, const Vec& y) {
    if (y.norm() == 0.0) return false;
    if (R_form(model, y) > zone.beta * (1.0 + 1e-12)) return false;
    PolarCoord p = to_polar(model, y, zone.beta);
    return p.s <= 1e-12 && (p.xt - zone.center).norm() < zone.radius;
}

namespace {

void discretize_h(const Model& model, const TestFunction& h, std::vector<Vec>& pts,
                  std::vector<double>& masses) {
    double support;
    if (h.kind == TestFunction::Kind::Indicator) support = h.radius;
    else if (h.kind == TestFunction::Kind::GaussianBump) support = 6.0 * h.sigma;
    else throw Error("run_forbidden_zones: h must be a ball indicator or Gaussian bump");
    BallGrid g = make_ball_grid(h.center, support, support / 48.0);
    double total = 0.0;
    for (size_t j = 0; j < g.points.size(); ++j) {
        double m = h(g.points[j]) * g.volumes[j] * gamma_minus_inf_density(model, g.points[j]);
        if (m > 0.0) {
            pts.push_back(g.points[j]);
            masses.push_back(m);
            total += m;
        }
    }
    if (std::abs(total - 1.0) > 0.02)
        throw Error("run_forbidden_zones: h not normalized in L1(gamma_{-inf})");
}

} // namespace

CoveringState run_forbidden_zones(const Model& model, const TestFunction& h,
                                  const CoveringParams& params, const std::vector<Vec>& cloud) {
    if (cloud.empty() || cloud.size() > 10000)
        throw Error("run_forbidden_zones: cloud must hold 1..10000 points");
    if (!(params.alphaPrime > 0.0)) throw Error("run_forbidden_zones: alphaPrime must be positive");

    CoveringState st;
    st.params = params;
    st.cloud = cloud;

    const double L = std::log(1.0 / params.alpha);
    for (const Vec& x : cloud) {
        double r = R_form(model, x);
        if (r < 0.75 * L - 1e-9 || r > 1.25 * L + 1e-9)
            throw Error("run_forbidden_zones: cloud point outside the annulus E_alpha");
    }

    // delta from t >~ 2^{-2m} (1+|x|)^{-2}, with the drift constant from the
    // growth-envelope fit
    double delta = params.delta;
    if (delta <= 0.0) {
        GrowthReport gr = fit_growth_constants(model, 100, 12345);
        double maxNorm = 0.0;
        for (const Vec& x : cloud) maxNorm = std::max(maxNorm, x.norm());
        double cDrift = std::max(1.0, gr.driftRatioMax);
        double kappa = std::min(1.0, 1.0 / (4.0 * cDrift * cDrift));
        delta = kappa * std::exp2(-2.0 * params.m) / ((1.0 + maxNorm) * (1.0 + maxNorm));
        delta = std::clamp(delta, 1e-4, 0.5);
    }
    st.delta = delta;

    TGrid tGrid = TGrid::geometric(delta, 1.0, params.tRatio);
    discretize_h(model, h, st.hPoints, st.hMasses);

    // sup_t of the K^{-,m} integral per cloud point; zones only shrink the
    // candidate set, so this is computed once
    const double scale2m = std::exp2(params.m);
    const long nCloud = static_cast<long>(cloud.size());
    st.cloudSup.assign(nCloud, 0.0);
    st.cloudWitnessT.assign(nCloud, -1.0);
    std::vector<Mat> Dmt;
    for (double t : tGrid.ts) Dmt.push_back(D_matrix(model, -t));

    parallel_for(nCloud, [&](long ci) {
        const Vec& x = cloud[ci];
        const double rx = R_form(model, x);
        const double thr = 1.0 / (1.0 + x.norm());
        double best = 0.0, bestT = -1.0;
        for (size_t ti = 0; ti < tGrid.ts.size(); ++ti) {
            const double t = tGrid.ts[ti];
            const double sq = std::sqrt(t);
            const double lo = (params.m == 0) ? 0.0 : scale2m * 0.5 * sq;
            const double hi = scale2m * sq;
            Vec base = Dmt[ti] * x;
            double massIn = 0.0;
            for (size_t j = 0; j < st.hPoints.size(); ++j) {
                const Vec& u = st.hPoints[j];
                if ((x - u).norm() <= thr) continue; // local pairs excluded
                double d = (u - base).norm();
                if (d > lo && d <= hi) massIn += st.hMasses[j];
            }
            double value = std::exp(-rx) * std::pow(t, -0.5 * model.dim) * massIn;
            if (value > best) {
                best = value;
                bestT = t;
            }
        }
        st.cloudSup[ci] = best;
        st.cloudWitnessT[ci] = bestT;
    });

    // recursion: maximizer of R among qualifying points outside all zones
    std::vector<char> alive(nCloud, 0);
    for (long i = 0; i < nCloud; ++i) alive[i] = st.cloudSup[i] >= params.alphaPrime ? 1 : 0;

    while (true) {
        long pick = -1;
        double bestR = -1.0;
        for (long i = 0; i < nCloud; ++i) {
            if (!alive[i]) continue;
            double r = R_form(model, cloud[i]);
            if (r > bestR) {
                bestR = r;
                pick = i;
            }
        }
        if (pick < 0) break;

        double t = st.cloudWitnessT[pick];
        if (t < 0.0) throw NoWitnessT("run_forbidden_zones: no witnessing grid time");
        ForbiddenZone z;
        z.center = cloud[pick];
        z.beta = bestR;
        z.t = t;
        z.radius = params.A * std::exp2(3.0 * params.m) * std::sqrt(t);
        st.selected.push_back(static_cast<int>(pick));
        st.times.push_back(t);
        st.zones.push_back(z);
        st.ballCenters.push_back(D_apply(model, -t, cloud[pick]));
        st.ballRadii.push_back(scale2m * std::sqrt(t));

        for (long i = 0; i < nCloud; ++i)
            if (alive[i] && zone_contains(model, z, cloud[i])) alive[i] = 0;
        alive[pick] = 0; // the maximizer itself lies in its own zone
    }
    return st;
}

CoveringVerification verify_covering(const Model& model, const CoveringState& st) {
    CoveringVerification v;
    const int nz = static_cast<int>(st.zones.size());

    for (int i = 0; i < nz && v.disjoint; ++i) {
        for (int j = i + 1; j < nz; ++j) {
            double dist = (st.ballCenters[i] - st.ballCenters[j]).norm();
            if (dist <= st.ballRadii[i] + st.ballRadii[j]) {
                v.disjoint = false;
                v.violatingPair = {i, j};
                break;
            }
        }
    }

    for (size_t ci = 0; ci < st.cloud.size() && v.covered; ++ci) {
        if (st.cloudSup[ci] < st.params.alphaPrime) continue;
        bool inside = false;
        for (const ForbiddenZone& z : st.zones) {
            if (zone_contains(model, z, st.cloud[ci])) {
                inside = true;
                break;
            }
        }
        if (!inside) {
            v.covered = false;
            v.uncoveredIndex = static_cast<int>(ci);
        }
    }

    for (int l = 0; l < nz; ++l) {
        // a cap wider than the ellipsoid saturates; the tube measure is that
        // of the full-ellipsoid tube
        double diameter = 2.0 * std::sqrt(2.0 * st.zones[l].beta) *
                          max_eigenvalue(model.QinfSqrt);
        Tube tube{st.zones[l].center, std::min(st.zones[l].radius, diameter), st.zones[l].beta};
        v.zoneMeasures.push_back(tube_measure(model, tube, TubeMethod::PolarQuadrature));
        double ballInt = 0.0;
        for (size_t j = 0; j < st.hPoints.size(); ++j)
            if ((st.hPoints[j] - st.ballCenters[l]).norm() <= st.ballRadii[l])
                ballInt += st.hMasses[j];
        v.ballIntegrals.push_back(ballInt);
        if (ballInt > 0.0)
            v.maxZoneRatio = std::max(v.maxZoneRatio,
                                      v.zoneMeasures[l] * st.params.alphaPrime / ballInt);
        else
            v.maxZoneRatio = std::numeric_limits<double>::infinity();
    }
    return v;
}

double find_min_A(const Model& model, const TestFunction& h, CoveringParams params,
                  const std::vector<Vec>& cloud, double startA, int maxDoublings) {
    double A = startA;
    for (int i = 0; i < maxDoublings; ++i) {
        params.A = A;
        CoveringState st = run_forbidden_zones(model, h, params, cloud);
        CoveringVerification v = verify_covering(model, st);
        if (v.disjoint && v.covered) return A;
        A *= 2.0;
    }
    throw Error("find_min_A: no passing A found");
}

} // namespace ouinv
