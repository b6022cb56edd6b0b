#include "ouinv/maximal.hpp"

#include <algorithm>
#include <cmath>

#include "ouinv/geometry.hpp"
#include "ouinv/parallel.hpp"
#include "ouinv/rng.hpp"

namespace ouinv {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;

double quad_form_fast(const Mat& M, const Vec& w) {
    const int n = static_cast<int>(w.size());
    if (n == 1) return M(0, 0) * w[0] * w[0];
    if (n == 2)
        return M(0, 0) * w[0] * w[0] + 2.0 * M(0, 1) * w[0] * w[1] + M(1, 1) * w[1] * w[1];
    return w.dot(M * w);
}
} // namespace

Region region_of(const Model&, const Vec& x, const Vec& u) {
    return (x - u).norm() <= 1.0 / (1.0 + x.norm()) ? Region::Local : Region::Global;
}

TGrid TGrid::geometric(double tmin, double tmax, double ratio) {
    if (!(tmin > 0.0) || !(tmax >= tmin) || !(ratio > 1.0))
        throw Error("TGrid::geometric: need 0 < tmin <= tmax and ratio > 1");
    TGrid g;
    for (double t = tmin; t < tmax * (1.0 - 1e-12); t *= ratio) g.ts.push_back(t);
    g.ts.push_back(tmax);
    return g;
}

MaximalEvaluator::MaximalEvaluator(const Model& model, const TestFunction& f, const TGrid& tMinus,
                                   const TGrid& tPlus, double cutoff)
    : model_(&model), f_(f), cutoff_(cutoff) {
    if (f.kind == TestFunction::Kind::Indicator)
        supportRadius_ = f.radius;
    else if (f.kind == TestFunction::Kind::GaussianBump)
        supportRadius_ = 6.0 * f.sigma;
    else
        throw Error("MaximalEvaluator: f must be a ball indicator or a Gaussian bump");

    // per-t kernel data first, to size the fine grid from the narrowest
    // Gaussian factor on the grid
    std::vector<double> sigmaMin;
    auto addT = [&](double t, bool plus) {
        KernelCache c = make_kernel_cache(model, t);
        PerT p;
        p.t = t;
        p.plus = plus;
        p.logc = -0.5 * model.dim * kLog2Pi - 0.5 * c.logDetQt + t * model.traceB;
        p.QtInv = c.QtInv;
        p.lambdaMinQtInv = c.lambdaMinQtInv;
        p.normExpTB = c.normExpTB;
        sigmaMin.push_back(std::sqrt(min_eigenvalue(c.sigma)));
        ts_.push_back(std::move(p));
        return c.expTB;
    };
    std::vector<Mat> expTBs;
    for (double t : tMinus.ts) expTBs.push_back(addT(t, false));
    for (double t : tPlus.ts) expTBs.push_back(addT(t, true));
    if (ts_.empty()) throw Error("MaximalEvaluator: empty t-grids");

    const double hCoarse = supportRadius_ / 5.0;
    double narrowest = *std::min_element(sigmaMin.begin(), sigmaMin.end());
    double hFine = std::clamp(0.5 * narrowest, supportRadius_ / 24.0, hCoarse);
    grids_[0] = make_ball_grid(f.center, supportRadius_, hFine);
    grids_[1] = make_ball_grid(f.center, supportRadius_, hCoarse);
    for (int gi = 0; gi < 2; ++gi) {
        weights_[gi].resize(grids_[gi].points.size());
        for (size_t j = 0; j < grids_[gi].points.size(); ++j) {
            weights_[gi][j] = f_(grids_[gi].points[j]) * grids_[gi].volumes[j];
            totalWeight_[gi] += weights_[gi][j];
        }
    }
    for (size_t i = 0; i < ts_.size(); ++i) {
        PerT& p = ts_[i];
        p.gridIndex = (0.5 * sigmaMin[i] < hCoarse) ? 0 : 1;
        const BallGrid& g = grids_[p.gridIndex];
        p.mapped.resize(g.points.size());
        for (size_t j = 0; j < g.points.size(); ++j) p.mapped[j] = expTBs[i] * g.points[j];
        p.mappedCenter = expTBs[i] * f.center;
    }
}

SplitMaximalValue MaximalEvaluator::eval(const Vec& x) const {
    SplitMaximalValue out;
    const double thr = 1.0 / (1.0 + x.norm());
    const double thr2 = thr * thr;
    std::vector<char> localMask[2];
    for (int gi = 0; gi < 2; ++gi) {
        const auto& pts = grids_[gi].points;
        localMask[gi].resize(pts.size());
        for (size_t j = 0; j < pts.size(); ++j)
            localMask[gi][j] = (pts[j] - x).squaredNorm() <= thr2 ? 1 : 0;
    }
    const double logCutoff = std::log(cutoff_);
    for (const PerT& p : ts_) {
        const int gi = p.gridIndex;
        double gap = std::max(0.0, (p.mappedCenter - x).norm() - p.normExpTB * supportRadius_);
        double upper = p.logc - 0.5 * p.lambdaMinQtInv * gap * gap +
                       std::log(std::max(totalWeight_[gi], 1e-300));
        if (upper < logCutoff) continue;
        double local = 0.0, global = 0.0;
        const auto& w = weights_[gi];
        const auto& mask = localMask[gi];
        for (size_t j = 0; j < p.mapped.size(); ++j) {
            double e = p.logc - 0.5 * quad_form_fast(p.QtInv, p.mapped[j] - x);
            if (e <= -700.0) continue;
            double v = w[j] * std::exp(e);
            if (mask[j]) local += v;
            else global += v;
        }
        double whole = local + global;
        out.hStar = std::max(out.hStar, whole);
        if (p.plus) {
            out.plusLocal = std::max(out.plusLocal, local);
            out.plusGlobal = std::max(out.plusGlobal, global);
            out.supPlus = std::max(out.supPlus, whole);
        } else {
            out.minusLocal = std::max(out.minusLocal, local);
            out.minusGlobal = std::max(out.minusGlobal, global);
        }
    }
    return out;
}

SplitMaximalValue split_maximal(const Model& model, const TestFunction& f, const Vec& x,
                                const TGrid& tMinus, const TGrid& tPlus,
                                const QuadratureSpec& quad) {
    auto checkRatio = [](const TGrid& g, double lo, double hi) {
        for (double t : g.ts)
            if (!(t >= lo && t <= hi)) throw Error("split_maximal: t-grid out of range");
        for (size_t i = 1; i < g.ts.size(); ++i)
            if (g.ts[i] / g.ts[i - 1] > 1.15 + 1e-9)
                throw GridTooCoarse("split_maximal: grid ratio exceeds 1.15");
    };
    checkRatio(tMinus, 0.0, 1.0);
    checkRatio(tPlus, 1.0, std::numeric_limits<double>::infinity());
    (void)quad;

    // normalization within 1%
    double support = f.kind == TestFunction::Kind::Indicator ? f.radius : 6.0 * f.sigma;
    BallGrid g = make_ball_grid(f.center, support, support / 64.0);
    double mass = 0.0;
    for (size_t j = 0; j < g.points.size(); ++j)
        mass += f(g.points[j]) * g.volumes[j] * gamma_minus_inf_density(model, g.points[j]);
    if (std::abs(mass - 1.0) > 0.01)
        throw Error("split_maximal: f not normalized in L1(gamma_{-inf})");

    MaximalEvaluator ev(model, f, tMinus, tPlus);
    return ev.eval(x);
}

// ------------------------------------------------------------------ level sets

namespace {

double cell_gamma_mass(const Model& model, const Vec& lo, const Vec& h) {
    // 2-point Gauss-Legendre per axis on the gamma_{-inf} density
    const int n = static_cast<int>(lo.size());
    const double a = 0.5 - 0.5 / std::sqrt(3.0), b = 0.5 + 0.5 / std::sqrt(3.0);
    double vol = 1.0;
    for (int d = 0; d < n; ++d) vol *= h[d];
    if (n == 1) {
        Vec p(1);
        double s = 0.0;
        for (double fr : {a, b}) {
            p[0] = lo[0] + fr * h[0];
            s += 0.5 * gamma_minus_inf_density(model, p);
        }
        return s * vol;
    }
    Vec p(2);
    double s = 0.0;
    for (double f0 : {a, b})
        for (double f1 : {a, b}) {
            p[0] = lo[0] + f0 * h[0];
            p[1] = lo[1] + f1 * h[1];
            s += 0.25 * gamma_minus_inf_density(model, p);
        }
    return s * vol;
}

double refine_cell(const Model& model, const std::function<double(const Vec&)>& ev, double alpha,
                   const Vec& lo, const Vec& h, int depth) {
    const int n = static_cast<int>(lo.size());
    const int sub = 1 << n;
    Vec hh = 0.5 * h;
    std::vector<Vec> los(sub, Vec(n));
    std::vector<char> in(sub);
    bool allSame = true;
    for (int s = 0; s < sub; ++s) {
        for (int d = 0; d < n; ++d)
            los[s][d] = lo[d] + ((s >> d) & 1 ? hh[d] : 0.0);
        Vec c = los[s] + 0.5 * hh;
        in[s] = ev(c) > alpha ? 1 : 0;
        if (in[s] != in[0]) allSame = false;
    }
    double mass = 0.0;
    if (allSame || depth <= 0) {
        for (int s = 0; s < sub; ++s)
            if (in[s]) mass += cell_gamma_mass(model, los[s], hh);
        return mass;
    }
    for (int s = 0; s < sub; ++s) mass += refine_cell(model, ev, alpha, los[s], hh, depth - 1);
    return mass;
}

} // namespace

LevelSetReport level_set_measure(const Model& model,
                                 const std::function<double(const Vec&)>& evaluator, double alpha,
                                 const Box& box, const LevelSetOptions& opts) {
    const int n = model.dim;
    if (n > 2) throw Error("level_set_measure: n <= 2 supported");
    if (!(alpha > 0.0)) throw Error("level_set_measure: alpha must be positive");

    const int res = opts.resolution;
    Vec h = (box.hi - box.lo) / res;

    LevelSetReport rep;
    rep.alpha = alpha;
    rep.box = box;
    rep.resolution = res;

    const long cells = (n == 1) ? res : static_cast<long>(res) * res;
    std::vector<char> in(cells);
    auto center = [&](long idx) {
        Vec c(n);
        if (n == 1) {
            c[0] = box.lo[0] + (idx + 0.5) * h[0];
        } else {
            long i = idx / res, j = idx % res;
            c[0] = box.lo[0] + (i + 0.5) * h[0];
            c[1] = box.lo[1] + (j + 0.5) * h[1];
        }
        return c;
    };
    parallel_for(cells, [&](long idx) { in[idx] = evaluator(center(idx)) > alpha ? 1 : 0; });

    auto boundary = [&](long idx) {
        if (n == 1) {
            for (long d : {-1L, 1L}) {
                long k = idx + d;
                if (k >= 0 && k < cells && in[k] != in[idx]) return true;
            }
            return false;
        }
        long i = idx / res, j = idx % res;
        const long di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
            long ii = i + di[d], jj = j + dj[d];
            if (ii >= 0 && ii < res && jj >= 0 && jj < res && in[ii * res + jj] != in[idx])
                return true;
        }
        return false;
    };

    std::vector<double> cellMass(cells, 0.0);
    parallel_for(cells, [&](long idx) {
        Vec lo = center(idx) - 0.5 * h;
        if (boundary(idx)) {
            cellMass[idx] = refine_cell(model, evaluator, alpha, lo, h, opts.refineDepth);
        } else if (in[idx]) {
            cellMass[idx] = cell_gamma_mass(model, lo, h);
        }
    });
    double measure = 0.0;
    for (long i = 0; i < cells; ++i) measure += cellMass[i];

    rep.measure = measure;
    rep.alphaScaled = alpha * measure;
    double lg = alpha < 1.0 ? std::sqrt(std::log(1.0 / alpha)) : 0.0;
    rep.alphaLogScaled = alpha * lg * measure;
    return rep;
}

double ScalarField::at(const Vec& x) const {
    const int n = static_cast<int>(npts.size());
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int d = 0; d < n; ++d) {
        double h = (box.hi[d] - box.lo[d]) / (npts[d] - 1);
        double p = (x[d] - box.lo[d]) / h;
        int i = static_cast<int>(std::floor(p));
        i = std::min(std::max(i, 0), npts[d] - 2);
        base[d] = i;
        frac[d] = std::min(std::max(p - i, 0.0), 1.0);
    }
    if (n == 1) {
        return values[base[0]] * (1.0 - frac[0]) + values[base[0] + 1] * frac[0];
    }
    auto v = [&](int i, int j) { return values[static_cast<size_t>(i) * npts[1] + j]; };
    int i = base[0], j = base[1];
    double f0 = frac[0], f1 = frac[1];
    return v(i, j) * (1 - f0) * (1 - f1) + v(i + 1, j) * f0 * (1 - f1) +
           v(i, j + 1) * (1 - f0) * f1 + v(i + 1, j + 1) * f0 * f1;
}

TestFunction normalized_ball(const Model& model, const Vec& center, double radius) {
    BallGrid g = make_ball_grid(center, radius, radius / 64.0);
    double mass = gamma_ball_measure(model, g);
    return TestFunction::indicator_ball(center, radius, 1.0 / mass);
}

Box annulus_box(const Model& model, double alphaMin, double margin) {
    double rMax = 1.25 * std::log(1.0 / alphaMin);
    double rad = std::sqrt(2.0 * rMax / model.lambdaMinQinfInv) + margin;
    Box b;
    b.lo = Vec::Constant(model.dim, -rad);
    b.hi = Vec::Constant(model.dim, rad);
    return b;
}

FieldSet compute_field(const MaximalEvaluator& ev, const Box& box, int resolution) {
    const Model& model = ev.model();
    const int n = model.dim;
    if (n > 2) throw Error("compute_field: n <= 2 supported");
    FieldSet fs;
    fs.box = box;
    std::vector<int> npts(n, resolution);
    long total = (n == 1) ? resolution : static_cast<long>(resolution) * resolution;
    fs.hStar.box = fs.supPlus.box = fs.lemma41Stat.box = box;
    fs.hStar.npts = fs.supPlus.npts = fs.lemma41Stat.npts = npts;
    fs.hStar.values.resize(total);
    fs.supPlus.values.resize(total);
    fs.lemma41Stat.values.resize(total);

    parallel_for(total, [&](long idx) {
        Vec x(n);
        if (n == 1) {
            x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * idx / (resolution - 1);
        } else {
            long i = idx / resolution, j = idx % resolution;
            x[0] = box.lo[0] + (box.hi[0] - box.lo[0]) * i / (resolution - 1);
            x[1] = box.lo[1] + (box.hi[1] - box.lo[1]) * j / (resolution - 1);
        }
        SplitMaximalValue v = ev.eval(x);
        fs.hStar.values[idx] = v.hStar;
        fs.supPlus.values[idx] = v.supPlus;
        fs.lemma41Stat.values[idx] = v.plusLocal + v.plusGlobal + v.minusGlobal;
    });
    fs.lemma41Constant = *std::max_element(fs.lemma41Stat.values.begin(),
                                           fs.lemma41Stat.values.end());
    return fs;
}

namespace {

int default_resolution(int dim, int requested) {
    if (requested > 0) return requested;
    return dim == 1 ? 4097 : 321;
}

std::pair<TGrid, TGrid> experiment_grids(const ExperimentConfig& cfg) {
    TGrid tMinus = TGrid::geometric(cfg.tMin, 1.0, cfg.tRatio);
    TGrid plusFull = TGrid::geometric(1.0, cfg.tMax, cfg.tRatio);
    TGrid tPlus;
    for (double t : plusFull.ts)
        if (t > 1.0) tPlus.ts.push_back(t);
    return {tMinus, tPlus};
}

} // namespace

WeakTypeReport weak_type_experiment(const Model& model, const std::vector<Vec>& centers,
                                    const std::vector<double>& alphaGrid,
                                    const ExperimentConfig& cfg) {
    WeakTypeReport rep;
    rep.alphas = alphaGrid;
    rep.centers = centers;
    double alphaMin = *std::min_element(alphaGrid.begin(), alphaGrid.end());
    rep.box = annulus_box(model, alphaMin, cfg.boxMargin);
    auto [tMinus, tPlus] = experiment_grids(cfg);
    const int res = default_resolution(model.dim, cfg.fieldResolution);

    double envelope = 0.0, stability = 0.0, lemma41 = 0.0;
    for (const Vec& c : centers) {
        TestFunction f = normalized_ball(model, c, cfg.ballRadius);
        MaximalEvaluator ev(model, f, tMinus, tPlus);
        FieldSet fs = compute_field(ev, rep.box, res);
        lemma41 = std::max(lemma41, fs.lemma41Constant);
        std::vector<double> ms, st;
        // stability over the alphas with nonempty level sets; levels above
        // sup H_* f are trivially empty and carry no information
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (double a : alphaGrid) {
            LevelSetOptions opts;
            opts.resolution = res - 1;
            opts.refineDepth = cfg.levelRefineDepth;
            auto evalInterp = [&fs](const Vec& x) { return fs.hStar.at(x); };
            LevelSetReport ls = level_set_measure(model, evalInterp, a, rep.box, opts);
            ms.push_back(ls.measure);
            st.push_back(ls.alphaScaled);
            envelope = std::max(envelope, ls.alphaScaled);
            if (ls.alphaScaled > 0.0) {
                lo = std::min(lo, ls.alphaScaled);
                hi = std::max(hi, ls.alphaScaled);
            }
        }
        stability = std::max(stability, hi / lo);
        rep.measures.push_back(std::move(ms));
        rep.statistics.push_back(std::move(st));
    }
    rep.envelope = envelope;
    rep.stabilityFactor = stability;
    rep.lemma41Constant = lemma41;
    return rep;
}

EnhancedReport enhanced_experiment(const Model& model, const TestFunction& f,
                                   const std::vector<double>& alphaGrid,
                                   const ExperimentConfig& cfg) {
    for (double a : alphaGrid)
        if (!(a > 0.0 && a < std::exp(-2.0)))
            throw Error("enhanced_experiment: alpha grid must lie in (0, e^{-2})");
    EnhancedReport rep;
    rep.alphas = alphaGrid;
    double alphaMin = *std::min_element(alphaGrid.begin(), alphaGrid.end());
    rep.box = annulus_box(model, alphaMin, cfg.boxMargin);
    auto [tMinus, tPlus] = experiment_grids(cfg);
    const int res = default_resolution(model.dim, cfg.fieldResolution);

    MaximalEvaluator ev(model, f, tMinus, tPlus);
    FieldSet fs = compute_field(ev, rep.box, res);
    for (double a : alphaGrid) {
        LevelSetOptions opts;
        opts.resolution = res - 1;
        opts.refineDepth = cfg.levelRefineDepth;
        LevelSetReport plus = level_set_measure(
            model, [&fs](const Vec& x) { return fs.supPlus.at(x); }, a, rep.box, opts);
        LevelSetReport full = level_set_measure(
            model, [&fs](const Vec& x) { return fs.hStar.at(x); }, a, rep.box, opts);
        rep.measures.push_back(plus.measure);
        rep.statNoLog.push_back(plus.alphaScaled);
        rep.statLog.push_back(plus.alphaLogScaled);
        rep.fullMeasures.push_back(full.measure);
        rep.envelopeLog = std::max(rep.envelopeLog, plus.alphaLogScaled);
    }
    return rep;
}

SharpnessReport sharpness_experiment(const Model& model, const std::vector<double>& alphaGrid,
                                     double A, const ExperimentConfig& cfg) {
    SharpnessReport rep;
    rep.alphas = alphaGrid;
    double alphaMin = *std::min_element(alphaGrid.begin(), alphaGrid.end());
    rep.box = annulus_box(model, alphaMin, cfg.boxMargin);
    auto [tMinus, tPlus] = experiment_grids(cfg);
    (void)tMinus;
    const int res = default_resolution(model.dim, cfg.fieldResolution);
    const int n = model.dim;

    rep.minStatLog = std::numeric_limits<double>::infinity();
    for (double a : alphaGrid) {
        double L = std::log(1.0 / a);
        double Rz = L - A;
        if (!(Rz > 0.5)) throw Error("sharpness_experiment: log(1/alpha) - A too small");
        rep.rz.push_back(Rz);

        Vec e1 = Vec::Zero(n);
        e1[0] = 1.0;
        Vec z = model.QinfSqrt * (std::sqrt(2.0 * Rz) * e1);
        Vec zc = D_apply(model, -2.0, z);
        for (int d = 0; d < n; ++d) {
            if (z[d] + 1.0 > rep.box.hi[d] || z[d] - 1.0 < rep.box.lo[d] ||
                zc[d] + 1.0 > rep.box.hi[d] || zc[d] - 1.0 < rep.box.lo[d])
                throw BallEscapesBox("sharpness_experiment: witness balls exceed the box");
        }
        TestFunction f = normalized_ball(model, zc, 1.0);

        TGrid emptyMinus;
        MaximalEvaluator ev(model, f, emptyMinus, tPlus);
        FieldSet fs = compute_field(ev, rep.box, res);
        LevelSetOptions opts;
        opts.resolution = res - 1;
        opts.refineDepth = cfg.levelRefineDepth;
        LevelSetReport ls = level_set_measure(
            model, [&fs](const Vec& x) { return fs.supPlus.at(x); }, a, rep.box, opts);
        rep.measures.push_back(ls.measure);
        rep.statLog.push_back(ls.alphaLogScaled);
        rep.minStatLog = std::min(rep.minStatLog, ls.alphaLogScaled);
        rep.maxStatLog = std::max(rep.maxStatLog, ls.alphaLogScaled);

        // gamma(B*) for B* = {x in B(z,1) : R(x) < R(z)}
        Box bsBox;
        bsBox.lo = z - Vec::Constant(n, 1.05);
        bsBox.hi = z + Vec::Constant(n, 1.05);
        auto membership = [&](const Vec& x) {
            return ((x - z).norm() <= 1.0 && R_form(model, x) < Rz) ? 1.0 : 0.0;
        };
        LevelSetOptions bsOpts;
        bsOpts.resolution = 160;
        bsOpts.refineDepth = 6;
        LevelSetReport bs = level_set_measure(model, membership, 0.5, bsBox, bsOpts);
        rep.bstarMeasures.push_back(bs.measure);
        rep.bstarRatios.push_back(bs.measure / (std::exp(Rz) / std::sqrt(Rz)));

        // fitted lower kernel constant: H_2 f(x) e^{R(x)} over a sample of B*
        TGrid single;
        single.ts = {2.0};
        MaximalEvaluator ev2(model, f, emptyMinus, single);
        double cFit = std::numeric_limits<double>::infinity();
        const int K = 9;
        std::vector<int> idx(n, 0);
        while (true) {
            Vec x = z;
            for (int d = 0; d < n; ++d) x[d] += -0.9 + 1.8 * idx[d] / (K - 1);
            if ((x - z).norm() <= 1.0 && R_form(model, x) < Rz) {
                double h2 = ev2.eval(x).supPlus;
                cFit = std::min(cFit, h2 * std::exp(R_form(model, x)));
            }
            int d = 0;
            while (d < n && ++idx[d] == K) idx[d++] = 0;
            if (d == n) break;
        }
        rep.kernelLowerC.push_back(cFit);

        // |D_{-2} x - u| over B1 x B2
        Mat Dm2 = D_matrix(model, -2.0);
        Rng rng = make_rng(cfg.seed, 77);
        double dMax = 0.0;
        for (int i = 0; i < 2000; ++i) {
            Vec x = uniform_ball(rng, z, 1.0);
            Vec u = uniform_ball(rng, zc, 1.0);
            dMax = std::max(dMax, (Dm2 * x - u).norm());
        }
        rep.distanceC.push_back(dMax);
    }
    return rep;
}

// --------------------------------------------------------- fitted spot checks

double lemma42_constant(const Model& model, int samples, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    TGrid ts = TGrid::geometric(1e-3, 1.0, 1.35);
    std::vector<KernelCache> caches;
    for (double t : ts.ts) caches.push_back(make_kernel_cache(model, t));
    double C = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec x = uniform_ball(rng, Vec::Zero(model.dim), 5.0);
        double thr = 1.0 / (1.0 + x.norm());
        Vec u = x + (thr * (1.001 + 4.0 * ud(rng))) * unit_sphere(rng, model.dim);
        for (const KernelCache& c : caches) {
            double logv = log_kernel_uo(model, c, x, u).logValue + R_form(model, x) -
                          model.dim * std::log1p(x.norm());
            C = std::max(C, std::exp(logv));
        }
    }
    return C;
}

double ru_rx_constant(const Model& model, int samples, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    double C = 0.0;
    for (int i = 0; i < samples; ++i) {
        Vec x = uniform_ball(rng, Vec::Zero(model.dim), 5.0);
        double thr = 1.0 / (1.0 + x.norm());
        Vec u = x + (thr * ud(rng)) * unit_sphere(rng, model.dim);
        C = std::max(C, std::abs(R_form(model, u) - R_form(model, x)));
    }
    return C;
}

double five_four_constant(const Model& model, double alpha, int samples, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const double L = std::log(1.0 / alpha);
    TGrid tsm = TGrid::geometric(0.05, 1.0, 1.4);
    TGrid tsp = TGrid::geometric(1.0, 20.0, 1.6);
    std::vector<KernelCache> caches;
    for (double t : tsm.ts) caches.push_back(make_kernel_cache(model, t));
    for (double t : tsp.ts) caches.push_back(make_kernel_cache(model, t));
    double C = 0.0;
    for (int i = 0; i < samples; ++i) {
        double beta = 1.25 * L + ud(rng);
        Vec x = project_to_ellipsoid(model, unit_sphere(rng, model.dim), beta);
        double thr = 1.0 / (1.0 + x.norm());
        Vec u = x + (thr * (1.001 + 6.0 * ud(rng))) * unit_sphere(rng, model.dim);
        for (const KernelCache& c : caches) {
            double k = std::exp(log_kernel_uo(model, c, x, u).logValue);
            C = std::max(C, k / alpha);
        }
    }
    return C;
}

double hl_domination_slope(const Model& model, int samples, std::uint64_t seed) {
    Rng rng = make_rng(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    TGrid ts = TGrid::geometric(1e-3, 1.0, 1.3);
    double c = std::numeric_limits<double>::infinity();
    for (size_t ti = 0; ti < ts.ts.size(); ++ti) {
        KernelCache cache = make_kernel_cache(model, ts.ts[ti]);
        double pref = small_time_log_prefactor(model, cache);
        for (int i = 0; i < samples; ++i) {
            Vec x = uniform_ball(rng, Vec::Zero(model.dim), 5.0);
            double thr = 1.0 / (1.0 + x.norm());
            Vec u = x + (thr * ud(rng)) * unit_sphere(rng, model.dim);
            double d = (x - u).squaredNorm() / cache.t;
            if (d < 1.0 || d > 200.0) continue;
            double r = log_kernel_uo(model, cache, x, u).logValue + R_form(model, x) +
                       0.5 * model.dim * std::log(cache.t);
            c = std::min(c, (pref - r) / d);
        }
    }
    if (!std::isfinite(c)) throw DegenerateSample("hl_domination_slope: no usable samples");
    return c;
}

} // namespace ouinv
