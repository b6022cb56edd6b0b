// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ouinv/covering.hpp"
#include "ouinv/experiments.hpp"
#include "ouinv/geometry.hpp"
#include "ouinv/kernels.hpp"
#include "ouinv/maximal.hpp"
#include "ouinv/presets.hpp"
#include "ouinv/quadrature.hpp"
#include "ouinv/rng.hpp"
#include "ouinv/semigroup.hpp"

using namespace ouinv;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s (%s)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const clock::time_point start = clock::now();
    return std::chrono::duration<double>(clock::now() - start).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

Model random_model(int n, Rng& rng) {
    Mat A(n, n), P(n, n), S(n, n);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            A(i, j) = nd(rng);
            P(i, j) = nd(rng);
            S(i, j) = nd(rng);
        }
    Mat Q = A * A.transpose() + 0.1 * Mat::Identity(n, n);
    Mat B = -(P * P.transpose() + 0.05 * Mat::Identity(n, n)) + 0.5 * (S - S.transpose());
    return build_model(Q, B);
}

std::vector<Model> presets() {
    return {preset_salogni1d(), preset_isotropic2d(), preset_nonnormal2d()};
}

std::vector<Vec> ball_grid_points(int dim, double extent, double step) {
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

// 1. Lyapunov/covariance against the defining-integral oracle.
void criterion1() {
    Rng rng = make_rng(1001);
    double worstCov = 0.0, worstLyap = 0.0;
    for (int i = 0; i < 50; ++i) {
        Model m = random_model(1 + i % 3, rng);
        worstLyap = std::max(worstLyap,
                             (m.B * m.Qinf + m.Qinf * m.B.transpose() + m.Q).norm() / m.Q.norm());
        for (double t : {0.01, 0.1, 1.0, 10.0}) {
            Mat a = cov_t(m, t);
            Mat b = cov_t_oracle(m, t, 1e-12 * m.Q.norm());
            worstCov = std::max(worstCov, (a - b).norm() / b.norm());
        }
    }
    report(1, "Lyapunov / covariance oracle", worstCov <= 1e-8 && worstLyap <= 1e-10,
           "cov gap " + fmt(worstCov) + ", residual " + fmt(worstLyap));
}

// 2. The kernel relation between the OU and inverse-OU kernels.
void criterion2() {
    double worst = 0.0;
    for (const Model& m : presets()) {
        Rng rng = make_rng(1002);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        for (int i = 0; i < 1000; ++i) {
            double t = std::pow(10.0, -3.0 + 4.30103 * ud(rng));
            Vec x = uniform_ball(rng, Vec::Zero(m.dim), 4.0);
            Vec u = uniform_ball(rng, Vec::Zero(m.dim), 4.0);
            KernelCache c = make_kernel_cache(m, t);
            double lhs = log_kernel_uo(m, c, x, u).logValue;
            double rhs = -m.dim * std::log(2.0 * M_PI) - m.logDetQinf - R_form(m, x) -
                         R_form(m, u) + t * m.traceB + log_kernel_ou(m, c, u, x).logValue;
            worst = std::max(worst, std::abs(lhs - rhs));
        }
    }
    report(2, "kernel relation identity", worst <= 1e-10, "max residual " + fmt(worst));
}

// 3. Conservativity of the inverse kernel.
void criterion3() {
    QuadratureSpec quad;
    TestFunction one = TestFunction::constant_fn(1.0);
    double worst2d = 0.0;
    for (const Model& m : presets()) {
        for (double t : {0.1, 1.0, 5.0})
            for (const Vec& x : ball_grid_points(m.dim, 3.0, 1.5))
                worst2d = std::max(worst2d,
                                   std::abs(apply_kernel(m, one, t, x, quad).value - 1.0));
    }
    // n = 3 via seeded Monte Carlo
    Mat Q3 = Mat::Identity(3, 3);
    Mat B3(3, 3);
    B3 << -1.0, 0.5, 0.0, 0.0, -1.5, 0.3, 0.0, 0.0, -2.0;
    Model m3 = build_model(Q3, B3);
    QuadratureSpec mc;
    mc.kind = QuadKind::MonteCarlo;
    mc.sampleCount = 1000000;
    mc.seed = 17;
    double worst3d = 0.0;
    for (double t : {0.1, 1.0, 5.0}) {
        Vec x = Vec::Zero(3);
        x[0] = 2.0;
        x[2] = -1.0;
        worst3d = std::max(worst3d, std::abs(apply_kernel(m3, one, t, x, mc).value - 1.0));
    }
    report(3, "conservativity of the inverse kernel", worst2d <= 1e-6 && worst3d <= 1e-3,
           "n<=2 gap " + fmt(worst2d) + ", n=3 MC gap " + fmt(worst3d));
}

// 4. Kolmogorov formula against direct kernel integration.
void criterion4() {
    QuadratureSpec quad;
    double worstBump = 0.0, worstLin = 0.0;
    for (const Model& m : presets()) {
        TestFunction bump = TestFunction::gaussian_bump(Vec::Zero(m.dim), 1.0);
        Vec v = Vec::Ones(m.dim);
        TestFunction lin = TestFunction::linear_fn(v);
        for (double t : {0.5, 2.0})
            for (const Vec& x : ball_grid_points(m.dim, 2.0, 1.0)) {
                double a = apply_kolmogorov(m, bump, t, x, quad).value;
                double b = apply_kernel(m, bump, t, x, quad).value;
                worstBump = std::max(worstBump, std::abs(a - b));
                double expect = v.dot(matrix_exp(-t * m.B) * x);
                worstLin = std::max(worstLin,
                                    std::abs(apply_kolmogorov(m, lin, t, x, quad).value - expect));
            }
    }
    report(4, "Kolmogorov vs kernel representation", worstBump <= 1e-4 && worstLin <= 1e-8,
           "bump gap " + fmt(worstBump) + ", linear gap " + fmt(worstLin));
}

// 5. Symmetry dichotomy.
void criterion5() {
    QuadratureSpec quad;
    quad.nodesPerAxis = 48;
    Vec c1(2), c2(2);
    c1 << 0.8, 0.0;
    c2 << 0.0, -0.7;

    Model sym = preset_isotropic2d();
    double capS = 1.0 / std::sqrt(sym.lambdaMaxQinfInv);
    SymmetryResult rs = check_symmetry(sym, TestFunction::gaussian_bump(c1, 0.65 * capS),
                                       TestFunction::gaussian_bump(c2, 0.8 * capS), 0.7, quad);
    double defectS = std::abs(rs.lhs - rs.rhs);
    bool okSym = defectS <= std::max(rs.errorEstimate, 1e-9);

    Model non = preset_nonnormal2d();
    double capN = 1.0 / std::sqrt(non.lambdaMaxQinfInv);
    SymmetryResult rn = check_symmetry(non, TestFunction::gaussian_bump(c1, 0.65 * capN),
                                       TestFunction::gaussian_bump(c2, 0.8 * capN), 0.7, quad);
    double defectN = std::abs(rn.lhs - rn.rhs);
    bool okNon = defectN > 10.0 * rn.errorEstimate;

    report(5, "symmetry dichotomy", okSym && okNon,
           "symmetric defect " + fmt(defectS) + " <= err " + fmt(rs.errorEstimate) +
               "; witness defect " + fmt(defectN) + " > 10 x " + fmt(rn.errorEstimate));
}

// 6. Two-sided kernel bound envelopes.
void criterion6() {
    bool ok = true;
    std::string detail;
    std::vector<double> small, large;
    for (int i = 0; i < 10; ++i) small.push_back(0.02 + (0.98 * i) / 9.0);
    for (int i = 0; i < 8; ++i) large.push_back(1.0 + (19.0 * i) / 7.0);
    for (const Model& m : presets()) {
        auto [s, l] = fit_kernel_bounds(m, small, large, 96, 1006);
        ok = ok && s.cLower > 0.0 && std::isfinite(s.CUpper) && l.cLower > 0.0 &&
             std::isfinite(l.CUpper) && s.minRatio > 0.0 && std::isfinite(s.maxRatio);
        if (m.dim == 1) {
            for (double t : small) {
                double kappa = t / (1.0 - std::exp(-2.0 * t));
                ok = ok && s.cLower <= kappa + 1e-9 && kappa <= s.CUpper + 1e-9;
            }
            detail = "scalar small-t envelope [" + fmt(s.cLower) + ", " + fmt(s.CUpper) +
                     "] brackets t/(1-e^{-2t})";
        }
    }
    report(6, "kernel bound envelopes", ok, detail);
}

// 7. Geometry: roundtrip, Jacobian vs MC, tube measures.
void criterion7() {
    bool ok = true;

    double worstRound = 0.0;
    Rng rng = make_rng(1007);
    for (const Model& m : presets()) {
        for (int i = 0; i < 1000; ++i) {
            Vec x = uniform_ball(rng, Vec::Zero(m.dim), 4.0);
            if (x.norm() < 1e-3) continue;
            for (double beta : {1.0, 4.0}) {
                PolarCoord p = to_polar(m, x, beta);
                worstRound = std::max(worstRound, (from_polar(m, p) - x).norm() / x.norm());
            }
        }
    }
    ok = ok && worstRound <= 1e-10;

    // patch volume against a Monte Carlo Lebesgue oracle
    Model iso = preset_isotropic2d();
    const double beta = 2.0, th0 = 0.3, th1 = 0.9, s0 = -0.2, s1 = 0.4;
    auto inner = [&](double s) {
        return adaptive_simpson(
            [&](double th) {
                Vec xt = ellipse_point(iso, beta, th);
                Vec tang(2);
                tang << -std::sin(th), std::cos(th);
                double speed = std::sqrt(2.0 * beta) * (iso.QinfSqrt * tang).norm();
                return polar_area_element(iso, xt, s) * speed;
            },
            th0, th1, 1e-11);
    };
    double viaJacobian = adaptive_simpson(inner, s0, s1, 1e-10);
    double rLo = std::exp(s0), rHi = std::exp(s1) * std::sqrt(2.0);
    Vec lo(2), hi(2);
    lo << rLo * std::cos(th1) * 0.8, rLo * std::sin(th0) * 0.8;
    hi << rHi * std::cos(th0) * 1.1, rHi * std::sin(th1) * 1.1;
    long hits = 0;
    const long N = 1000000;
    Rng rng2 = make_rng(1008);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    for (long i = 0; i < N; ++i) {
        Vec x(2);
        x << lo[0] + (hi[0] - lo[0]) * ud(rng2), lo[1] + (hi[1] - lo[1]) * ud(rng2);
        PolarCoord p = to_polar(iso, x, beta);
        Vec w = iso.QinfInvSqrt * p.xt / std::sqrt(2.0 * beta);
        double th = std::atan2(w[1], w[0]);
        if (p.s >= s0 && p.s <= s1 && th >= th0 && th <= th1) ++hits;
    }
    double viaMC = (hi - lo).prod() * static_cast<double>(hits) / N;
    double patchGap = std::abs(viaJacobian - viaMC) / viaJacobian;
    ok = ok && patchGap <= 0.01;

    // tube-measure envelope and the MC anchor
    double ratioLo = 1e300, ratioHi = 0.0, mcGap = 1.0;
    for (double b : {9.0, 16.0, 25.0})
        for (double a : {0.25, 0.5, 1.0}) {
            Vec y = project_to_ellipsoid(iso, Vec::Ones(2), b);
            double meas = tube_measure(iso, Tube{y, a, b}, TubeMethod::PolarQuadrature);
            double ratio = meas / (a * std::exp(b) / std::sqrt(b));
            ratioLo = std::min(ratioLo, ratio);
            ratioHi = std::max(ratioHi, ratio);
            if (b == 9.0 && a == 0.5) {
                double mc = tube_measure(iso, Tube{y, a, b}, TubeMethod::MonteCarlo, 5, 400000);
                mcGap = std::abs(meas - mc) / meas;
            }
        }
    ok = ok && ratioLo > 0.0 && std::isfinite(ratioHi) && mcGap <= 0.03;

    report(7, "geometry: roundtrip, Jacobian, tubes", ok,
           "roundtrip " + fmt(worstRound) + ", patch gap " + fmt(patchGap) + ", tube ratio [" +
               fmt(ratioLo) + ", " + fmt(ratioHi) + "], MC gap " + fmt(mcGap));
}

// 8. Small-ball region measure against the closed form.
void criterion8() {
    bool ok = true;
    std::string detail;
    for (const Model& m : {preset_isotropic2d(), preset_nonnormal2d()}) {
        for (double alpha : {1e-3, 1e-4}) {
            double beta = 0.75 * std::log(1.0 / alpha);
            auto member = [&](const Vec& x) { return R_form(m, x) < beta ? 1.0 : 0.0; };
            double rad = std::sqrt(2.0 * beta / m.lambdaMinQinfInv) + 0.3;
            Box box{Vec::Constant(2, -rad), Vec::Constant(2, rad)};
            LevelSetOptions opts;
            opts.resolution = 320;
            opts.refineDepth = 5;
            LevelSetReport r = level_set_measure(m, member, 0.5, box, opts);
            double closed = 4.0 * M_PI * M_PI * std::exp(m.logDetQinf) * (std::exp(beta) - 1.0);
            double gap = std::abs(r.measure - closed) / closed;
            ok = ok && gap <= 0.10;
            if (alpha == 1e-4) detail += fmt(gap) + " ";
        }
    }
    report(8, "small-ball measure vs closed form", ok, "relative gaps " + detail);
}

// 9. Weak type (1,1) statistic: finite envelope, stable across alpha.
void criterion9() {
    bool ok = true;
    std::string detail;
    std::vector<double> alphas;
    for (int i = 0; i < 13; ++i) alphas.push_back(0.1 * std::pow(1e-3, i / 12.0));
    for (const Model& m : {preset_isotropic2d(), preset_nonnormal2d()}) {
        std::vector<Vec> centers;
        std::vector<double> levels = {0.5, 1.5, 3.0};
        Vec d0 = Vec::Zero(2), d1 = Vec::Zero(2), d2 = Vec::Zero(2);
        d0[0] = 1.0;
        d1[0] = -M_SQRT1_2;
        d1[1] = M_SQRT1_2;
        d2[1] = -1.0;
        std::vector<Vec> dirs = {d0, d1, d2};
        for (size_t i = 0; i < levels.size(); ++i)
            centers.push_back(m.QinfSqrt * (std::sqrt(2.0 * levels[i]) * dirs[i]));
        ExperimentConfig cfg;
        WeakTypeReport r = weak_type_experiment(m, centers, alphas, cfg);
        ok = ok && std::isfinite(r.envelope) && r.envelope > 0.0 && r.stabilityFactor <= 10.0;
        detail += "envelope " + fmt(r.envelope) + " stability " + fmt(r.stabilityFactor) + "; ";
    }
    report(9, "weak type (1,1) statistic", ok, detail);
}

// 10. Enhanced estimate and its sharpness witness.
void criterion10() {
    bool ok = true;
    Model m = preset_isotropic2d();

    TestFunction f = normalized_ball(m, Vec::Zero(2), 0.05);
    std::vector<double> alphas;
    for (int i = 0; i < 9; ++i) alphas.push_back(0.12 * std::pow(1e-3, i / 8.0));
    ExperimentConfig cfg;
    EnhancedReport er = enhanced_experiment(m, f, alphas, cfg);
    ok = ok && std::isfinite(er.envelopeLog) && er.envelopeLog > 0.0;

    SharpnessReport sr = sharpness_experiment(m, {1e-3, 1e-4, 1e-5}, 3.0, cfg);
    double spread = 0.0;
    {
        double lo = 1e300, hi = 0.0;
        for (double rr : sr.bstarRatios) {
            lo = std::min(lo, rr);
            hi = std::max(hi, rr);
        }
        spread = hi / lo;
    }
    ok = ok && sr.minStatLog > 0.0 && std::isfinite(sr.maxStatLog) && spread <= 2.0;
    for (double c : sr.kernelLowerC) ok = ok && c > 0.0;

    report(10, "enhanced estimate + sharpness", ok,
           "upper envelope " + fmt(er.envelopeLog) + ", lower stat " + fmt(sr.minStatLog) +
               ", B* ratio spread " + fmt(spread));
}

// 11. Forbidden-zones simulator: items (1)-(3) and the negative path.
void criterion11() {
    Model m = preset_isotropic2d();
    const double alpha = 1e-4;
    const double L = std::log(1.0 / alpha);
    Vec dir = Vec::Zero(2);
    dir[0] = 1.0;
    Vec p = project_to_ellipsoid(m, dir, L);
    TestFunction h = normalized_ball(m, D_apply(m, -0.5, p), 0.25);
    std::vector<Vec> cloud = annulus_cloud(m, alpha, 800, 1011);
    cloud.push_back(p);

    CoveringParams params;
    params.alpha = alpha;
    params.m = 0;
    params.alphaPrime = 1e300;
    CoveringState probe = run_forbidden_zones(m, h, params, cloud);
    double supMax = *std::max_element(probe.cloudSup.begin(), probe.cloudSup.end());
    params.alphaPrime = 0.5 * supMax;

    double A = find_min_A(m, h, params, cloud, 0.25, 12);
    params.A = A;
    CoveringState st = run_forbidden_zones(m, h, params, cloud);
    CoveringVerification good = verify_covering(m, st);

    params.A = 0.01;
    CoveringState stBad = run_forbidden_zones(m, h, params, cloud);
    CoveringVerification bad = verify_covering(m, stBad);

    bool ok = good.disjoint && good.covered && std::isfinite(good.maxZoneRatio) &&
              (!bad.disjoint || !bad.covered);
    report(11, "forbidden-zones covering", ok,
           "A " + fmt(A) + ", zones " + fmt(double(st.zones.size())) + ", item-3 ratio " +
               fmt(good.maxZoneRatio) + ", negative path violation " +
               std::string((!bad.disjoint || !bad.covered) ? "detected" : "missed"));
}

// 12. The rho-integral inequality.
void criterion12() {
    bool ok = true;
    double hi = 0.0;
    for (const Model& m : {preset_isotropic2d(), preset_nonnormal2d()}) {
        Rng rng = make_rng(1012);
        Vec xt = project_to_ellipsoid(m, unit_sphere(rng, 2), 1.0);
        for (double rhoMax : {2.0, 5.0, 10.0, 20.0}) {
            double ratio = check_rho_integral(m, xt, rhoMax);
            ok = ok && std::isfinite(ratio) && ratio > 0.0;
            hi = std::max(hi, ratio);
        }
    }
    report(12, "rho-integral ratio envelope", ok, "max ratio " + fmt(hi));
}

// 13. Byte-identical CSV output across seeds and worker counts.
void criterion13() {
#ifndef OUINV_CLI_PATH
    report(13, "determinism across worker counts", false, "CLI path not configured");
#else
    auto runCli = [](const std::string& threads, const std::string& args,
                     const std::string& out) {
        std::string cmd = "OUKL_THREADS=" + threads + " " + OUINV_CLI_PATH + " " + args +
                          " --out " + out + " > /dev/null 2>&1";
        return std::system(cmd.c_str());
    };
    auto slurp = [](const std::string& path) {
        std::ifstream is(path, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    };
    bool ok = true;
    std::string detail;
    struct Job {
        const char* name;
        const char* args;
    };
    for (const Job& j : {Job{"kernel-eval", "--preset nonnormal2d --experiment kernel-eval --seed 5"},
                         Job{"weak-type", "--preset salogni1d --experiment weak-type --seed 5"},
                         Job{"covering-sim", "--preset isotropic2d --experiment covering-sim --seed 5"}}) {
        int r1 = runCli("1", j.args, "/tmp/ouinv_acc_det1.csv");
        int r8 = runCli("8", j.args, "/tmp/ouinv_acc_det8.csv");
        bool same = r1 == r8 && slurp("/tmp/ouinv_acc_det1.csv") == slurp("/tmp/ouinv_acc_det8.csv") &&
                    !slurp("/tmp/ouinv_acc_det1.csv").empty();
        ok = ok && same;
        detail += std::string(j.name) + (same ? " ok; " : " MISMATCH; ");
    }
    report(13, "determinism across worker counts", ok, detail);
#endif
}

} // namespace

int main() {
    double t0 = now_seconds();
    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8();
    criterion9();
    criterion10();
    criterion11();
    criterion12();
    criterion13();
    std::printf("acceptance: %d of 13 criteria passed in %.1f s\n", 13 - g_failures,
                now_seconds() - t0);
    return g_failures == 0 ? 0 : 1;
}
