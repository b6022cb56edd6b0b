#include "ouinv/semigroup.hpp"

#include <cmath>

#include "ouinv/ballgrid.hpp"
#include "ouinv/quadrature.hpp"
#include "ouinv/rng.hpp"

namespace ouinv {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
}

// ---------------------------------------------------------------- TestFunction

double TestFunction::operator()(const Vec& x) const {
    switch (kind) {
        case Kind::Constant:
            return amplitude * constant;
        case Kind::Linear:
            return amplitude * linear.dot(x);
        case Kind::Indicator:
            return (x - center).norm() <= radius ? amplitude : 0.0;
        case Kind::GaussianBump:
            return amplitude * std::exp(-(x - center).squaredNorm() / (2.0 * sigma * sigma));
        case Kind::Tabulated:
            return amplitude * table->at(x);
    }
    return 0.0;
}

TestFunction TestFunction::constant_fn(double c) {
    TestFunction f;
    f.kind = Kind::Constant;
    f.constant = c;
    return f;
}

TestFunction TestFunction::linear_fn(const Vec& v) {
    TestFunction f;
    f.kind = Kind::Linear;
    f.linear = v;
    return f;
}

TestFunction TestFunction::indicator_ball(const Vec& center, double radius, double amplitude) {
    TestFunction f;
    f.kind = Kind::Indicator;
    f.center = center;
    f.radius = radius;
    f.amplitude = amplitude;
    return f;
}

TestFunction TestFunction::gaussian_bump(const Vec& center, double sigma, double amplitude) {
    TestFunction f;
    f.kind = Kind::GaussianBump;
    f.center = center;
    f.sigma = sigma;
    f.amplitude = amplitude;
    return f;
}

TestFunction TestFunction::tabulated(std::shared_ptr<TabulatedGrid> grid) {
    TestFunction f;
    f.kind = Kind::Tabulated;
    f.table = std::move(grid);
    return f;
}

namespace {

double catmull_rom(double v0, double v1, double v2, double v3, double u) {
    return 0.5 * (2.0 * v1 + (-v0 + v2) * u + (2.0 * v0 - 5.0 * v1 + 4.0 * v2 - v3) * u * u +
                  (-v0 + 3.0 * v1 - 3.0 * v2 + v3) * u * u * u);
}

} // namespace

double TabulatedGrid::at(const Vec& x) const {
    const int n = static_cast<int>(npts.size());
    std::vector<int> base(n);
    std::vector<double> frac(n);
    for (int d = 0; d < n; ++d) {
        if (x[d] < lo[d] || x[d] > hi[d]) return 0.0;
        double h = (hi[d] - lo[d]) / (npts[d] - 1);
        double p = (x[d] - lo[d]) / h;
        int i = static_cast<int>(std::floor(p));
        i = std::min(std::max(i, 0), npts[d] - 2);
        base[d] = i;
        frac[d] = p - i;
    }
    auto clampIdx = [&](int d, int i) { return std::min(std::max(i, 0), npts[d] - 1); };
    if (n == 1) {
        auto v = [&](int i) { return values[clampIdx(0, i)]; };
        int i = base[0];
        return catmull_rom(v(i - 1), v(i), v(i + 1), v(i + 2), frac[0]);
    }
    if (n == 2) {
        auto v = [&](int i, int j) {
            return values[static_cast<size_t>(clampIdx(0, i)) * npts[1] + clampIdx(1, j)];
        };
        int i = base[0], j = base[1];
        double rows[4];
        for (int a = -1; a <= 2; ++a)
            rows[a + 1] = catmull_rom(v(i + a, j - 1), v(i + a, j), v(i + a, j + 1),
                                      v(i + a, j + 2), frac[1]);
        return catmull_rom(rows[0], rows[1], rows[2], rows[3], frac[0]);
    }
    throw Error("TabulatedGrid: only dimensions 1 and 2 supported");
}

// ------------------------------------------------------------------- tensors

namespace {

// Iterate the tensor Gauss-Hermite rule; body(xi, logW) with xi the node
// vector and logW the log of the product weight.
template <typename F>
void for_each_hermite_node(int dim, int nodes, F&& body) {
    const HermiteRule& rule = hermite_rule(nodes);
    std::vector<int> idx(dim, 0);
    Vec xi(dim);
    while (true) {
        double logW = 0.0;
        for (int d = 0; d < dim; ++d) {
            xi[d] = rule.nodes[idx[d]];
            logW += std::log(rule.weights[idx[d]]);
        }
        body(xi, logW);
        int d = 0;
        while (d < dim && ++idx[d] == nodes) idx[d++] = 0;
        if (d == dim) break;
    }
}

struct KolmogorovFrame {
    Mat E;     // e^{-tB}
    Mat L;     // chol(Q_t)
    Vec mean;  // e^{-tB} x
};

KolmogorovFrame kolmogorov_frame(const Model& model, double t, const Vec& x) {
    KolmogorovFrame fr;
    fr.E = matrix_exp(-t * model.B);
    Mat Qt = cov_t(model, t);
    Eigen::LLT<Mat> llt(Qt);
    if (llt.info() != Eigen::Success)
        throw SingularCovariance("apply_kolmogorov: Cholesky of Q_t failed");
    fr.L = llt.matrixL();
    fr.mean = fr.E * x;
    return fr;
}

double kolmogorov_tensor_value(const Model& model, const TestFunction& f, const Vec& x,
                               const KolmogorovFrame& fr, int nodes) {
    const int n = model.dim;
    const double sqrt2 = std::sqrt(2.0);

    if (f.kind == TestFunction::Kind::GaussianBump) {
        // For a bump much narrower than the image Gaussian the plain rule
        // sees a needle. Integrate in the frame of the product Gaussian
        // instead; the rule is then exact up to roundoff.
        Mat QtInv = (fr.L * fr.L.transpose()).llt().solve(Mat::Identity(n, n));
        double logDetQtHalf = fr.L.diagonal().array().log().sum();
        const double s2 = f.sigma * f.sigma;
        Mat P = symmetrize(QtInv + fr.E.transpose() * fr.E / s2);
        Mat Pinv = P.llt().solve(Mat::Identity(n, n));
        Vec b = fr.E.transpose() * (f.center - fr.mean) / s2; // fr.mean = E x
        Vec ustar = Pinv * b;
        auto [LP, logDetLP] = psd_factor(symmetrize(Pinv));
        double sum = 0.0;
        for_each_hermite_node(n, nodes, [&](const Vec& xi, double logW) {
            Vec u = ustar + sqrt2 * (LP * xi);
            double expo = -0.5 * qform(QtInv, u) -
                          (fr.E * (u + x) - f.center).squaredNorm() / (2.0 * s2);
            sum += std::exp(logW + expo + xi.squaredNorm() + 0.5 * n * std::log(2.0) + logDetLP);
        });
        return f.amplitude * sum * std::exp(-0.5 * n * kLog2Pi - logDetQtHalf);
    }

    double sum = 0.0;
    for_each_hermite_node(n, nodes, [&](const Vec& xi, double logW) {
        Vec w = fr.E * (sqrt2 * (fr.L * xi)) + fr.mean;
        sum += std::exp(logW) * f(w);
    });
    return sum * std::pow(M_PI, -0.5 * n);
}

// Gaussian CDF-based value for a 1-D ball indicator.
double normal_interval_mass(double mean, double sd, double a, double b) {
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    return Phi((b - mean) / sd) - Phi((a - mean) / sd);
}

// density of N(mean, F F^T) given the inverse factor F^{-1} and log det F
double gaussian_density(const Vec& u, const Vec& mean, const Mat& factorInv,
                        double logDetFactor) {
    const int n = static_cast<int>(u.size());
    Vec z = factorInv * (u - mean);
    return std::exp(-0.5 * n * kLog2Pi - logDetFactor - 0.5 * z.squaredNorm());
}

} // namespace

ApplyResult apply_kolmogorov(const Model& model, const TestFunction& f, double t, const Vec& x,
                             const QuadratureSpec& quad) {
    if (!(t > 0.0)) throw NonPositiveTime("apply_kolmogorov: t must be positive");
    KolmogorovFrame fr = kolmogorov_frame(model, t, x);
    const int n = model.dim;

    if (quad.kind == QuadKind::MonteCarlo) {
        const long blockSize = 8192;
        const long nBlocks = std::max<long>(1, quad.sampleCount / blockSize);
        double sum = 0.0, sumSq = 0.0;
        for (long b = 0; b < nBlocks; ++b) {
            Rng rng = make_rng(quad.seed, static_cast<std::uint64_t>(b));
            double bs = 0.0;
            for (long i = 0; i < blockSize; ++i) {
                Vec z = standard_normal(rng, n);
                bs += f(fr.E * (fr.L * z) + fr.mean);
            }
            bs /= blockSize;
            sum += bs;
            sumSq += bs * bs;
        }
        double mean = sum / nBlocks;
        double var = std::max(0.0, sumSq / nBlocks - mean * mean);
        return {mean, std::sqrt(var / std::max<long>(1, nBlocks - 1))};
    }

    if (f.kind == TestFunction::Kind::Indicator) {
        // distribution of the Kolmogorov image is N(e^{-tB}x, e^{-tB}Q_t e^{-tB^T})
        Mat sigma = symmetrize(fr.E * (fr.L * fr.L.transpose()) * fr.E.transpose());
        if (n == 1) {
            double sd = std::sqrt(sigma(0, 0));
            double v = f.amplitude * normal_interval_mass(fr.mean[0], sd, f.center[0] - f.radius,
                                                          f.center[0] + f.radius);
            return {v, 1e-14};
        }
        auto [F, logDetF] = psd_factor(sigma);
        Mat Finv = F.inverse();
        double h = quad.indicatorCellSize > 0 ? quad.indicatorCellSize : f.radius / 64.0;
        auto integrate = [&](double hh) {
            BallGrid g = make_ball_grid(f.center, f.radius, hh);
            double s = 0.0;
            for (size_t i = 0; i < g.points.size(); ++i)
                s += g.volumes[i] * gaussian_density(g.points[i], fr.mean, Finv, logDetF);
            return f.amplitude * s;
        };
        double v1 = integrate(h), v2 = integrate(0.5 * h);
        return {v2, std::abs(v2 - v1)};
    }

    double v = kolmogorov_tensor_value(model, f, x, fr, quad.nodesPerAxis);
    int lowNodes = std::max(8, (3 * quad.nodesPerAxis) / 4);
    double vLow = kolmogorov_tensor_value(model, f, x, fr, lowNodes);
    return {v, std::abs(v - vLow)};
}

namespace {

double kernel_tensor_value(const Model& model, const KernelCache& c, const TestFunction& f,
                           const Vec& x, int nodes) {
    const int n = model.dim;
    const double sqrt2 = std::sqrt(2.0);
    const double logc = -0.5 * n * kLog2Pi - 0.5 * c.logDetQt + c.t * model.traceB;

    // Gaussian frame for the nodes. For bumps: the product Gaussian of the
    // kernel factor and the bump, which keeps the rule sharp when the bump
    // is much narrower than the kernel. The kernel exponent is always
    // evaluated with the node offset pushed through e^{tB} as a matrix
    // product; evaluating log M at u directly would subtract R(u)-sized
    // terms and lose the exponent for nonnormal B at large t.
    Vec center;
    Mat frameHalf;
    double logDetHalf;
    if (f.kind == TestFunction::Kind::GaussianBump) {
        const double s2 = f.sigma * f.sigma;
        Mat P = symmetrize(c.expTB.transpose() * c.QtInv * c.expTB +
                           Mat::Identity(n, n) / s2);
        Mat Pinv = P.llt().solve(Mat::Identity(n, n));
        Vec b = c.expTB.transpose() * (c.QtInv * x) + f.center / s2;
        center = Pinv * b;
        std::tie(frameHalf, logDetHalf) = psd_factor(symmetrize(Pinv));
    } else {
        center = c.expMTB * x;
        frameHalf = c.sigmaHalf;
        logDetHalf = c.logDetSigmaHalf;
    }

    const Mat F = c.expTB * frameHalf;
    const Vec delta = c.expTB * center - x;
    double sum = 0.0;
    for_each_hermite_node(n, nodes, [&](const Vec& xi, double logW) {
        Vec u = center + sqrt2 * (frameHalf * xi);
        double fv = f(u);
        if (fv == 0.0) return;
        Vec w = delta + sqrt2 * (F * xi);
        double logM = logc - 0.5 * qform(c.QtInv, w);
        double logTerm = logW + logM + xi.squaredNorm() + 0.5 * n * std::log(2.0) + logDetHalf;
        sum += std::exp(logTerm) * fv;
    });
    return sum;
}

} // namespace

ApplyResult apply_kernel(const Model& model, const TestFunction& f, double t, const Vec& x,
                         const QuadratureSpec& quad) {
    if (!(t > 0.0)) throw NonPositiveTime("apply_kernel: t must be positive");
    KernelCache c = make_kernel_cache(model, t);
    const int n = model.dim;

    if (quad.kind == QuadKind::MonteCarlo) {
        // importance sampling from the kernel's own Gaussian frame,
        // with the weight evaluated through the log-domain kernel path
        const Vec mean = c.expMTB * x;
        const double logDetL = c.logDetSigmaHalf;
        const long blockSize = 8192;
        const long nBlocks = std::max<long>(1, quad.sampleCount / blockSize);
        double sum = 0.0, sumSq = 0.0;
        for (long b = 0; b < nBlocks; ++b) {
            Rng rng = make_rng(quad.seed ^ 0x5bf03635ULL, static_cast<std::uint64_t>(b));
            double bs = 0.0;
            for (long i = 0; i < blockSize; ++i) {
                Vec z = standard_normal(rng, n);
                Vec u = mean + c.sigmaHalf * z;
                double fv = f(u);
                if (fv == 0.0) continue;
                double logM = log_kernel_uo(model, c, x, u).logValue +
                              log_gamma_minus_inf(model, u).logValue;
                double logProposal = -0.5 * n * kLog2Pi - logDetL - 0.5 * z.squaredNorm();
                bs += std::exp(logM - logProposal) * fv;
            }
            bs /= blockSize;
            sum += bs;
            sumSq += bs * bs;
        }
        double mean2 = sum / nBlocks;
        double var = std::max(0.0, sumSq / nBlocks - mean2 * mean2);
        return {mean2, std::sqrt(var / std::max<long>(1, nBlocks - 1))};
    }

    if (f.kind == TestFunction::Kind::Indicator) {
        double h = quad.indicatorCellSize > 0 ? quad.indicatorCellSize : f.radius / 64.0;
        auto integrate = [&](double hh) {
            BallGrid g = make_ball_grid(f.center, f.radius, hh);
            double s = 0.0;
            for (size_t i = 0; i < g.points.size(); ++i) {
                const Vec& u = g.points[i];
                double logM = log_kernel_uo(model, c, x, u).logValue +
                              log_gamma_minus_inf(model, u).logValue;
                s += g.volumes[i] * std::exp(logM);
            }
            return f.amplitude * s;
        };
        double v1 = integrate(h), v2 = integrate(0.5 * h);
        return {v2, std::abs(v2 - v1)};
    }

    // smooth f: tensor rule in the Gaussian frame; nodes cover
    // ~sqrt(2 * nodes) standard deviations, checked against the requested
    // truncation radius
    double span = std::sqrt(2.0 * quad.nodesPerAxis + 1.0) * std::sqrt(2.0);
    if (span < 6.0)
        throw TruncationDominates("apply_kernel: too few nodes to cover six standard deviations");
    double v = kernel_tensor_value(model, c, f, x, quad.nodesPerAxis);
    int lowNodes = std::max(8, (3 * quad.nodesPerAxis) / 4);
    double vLow = kernel_tensor_value(model, c, f, x, lowNodes);
    return {v, std::abs(v - vLow)};
}

double check_semigroup_law(const Model& model, const TestFunction& f, double t, double s,
                           const std::vector<Vec>& xGrid, const QuadratureSpec& quad) {
    if (!(t > 0.0 && s > 0.0)) throw NonPositiveTime("check_semigroup_law: t, s > 0 required");
    const int n = model.dim;
    if (n > 2) throw Error("check_semigroup_law: tabulation supports n <= 2");

    // bounding box for the points where the outer application samples the
    // inner function
    Mat E = matrix_exp(-t * model.B);
    Mat Qt = cov_t(model, t);
    Eigen::LLT<Mat> llt(Qt);
    Mat L = llt.matrixL();
    Eigen::JacobiSVD<Mat> svdL(L), svdE(E);
    double span = std::sqrt(2.0) * svdL.singularValues()(0) *
                  std::sqrt(2.0 * quad.nodesPerAxis + 1.0);
    double maxX = 0.0;
    for (const Vec& x : xGrid) maxX = std::max(maxX, x.lpNorm<Eigen::Infinity>());
    double extent = svdE.singularValues()(0) * (maxX * std::sqrt(double(n)) + span) + 1.0;

    Vec lo = Vec::Constant(n, -extent), hi = Vec::Constant(n, extent);

    double devPrev = -1.0;
    int res = (n == 1) ? 257 : 97;
    for (int round = 0; round < 4; ++round) {
        auto grid = std::make_shared<TabulatedGrid>();
        grid->lo = lo;
        grid->hi = hi;
        grid->npts = std::vector<int>(n, res);
        grid->values.resize(n == 1 ? res : res * res);
        std::vector<int> idx(n, 0);
        size_t flat = 0;
        while (true) {
            Vec p(n);
            for (int d = 0; d < n; ++d)
                p[d] = lo[d] + (hi[d] - lo[d]) * idx[d] / (res - 1);
            grid->values[flat++] = apply_kolmogorov(model, f, s, p, quad).value;
            int d = n - 1;
            while (d >= 0 && ++idx[d] == res) idx[d--] = 0;
            if (d < 0) break;
        }
        TestFunction fs = TestFunction::tabulated(grid);
        double dev = 0.0;
        for (const Vec& x : xGrid) {
            double lhs = apply_kolmogorov(model, fs, t, x, quad).value;
            double rhs = apply_kolmogorov(model, f, t + s, x, quad).value;
            dev = std::max(dev, std::abs(lhs - rhs));
        }
        if (devPrev >= 0.0 && std::abs(dev - devPrev) <= std::max(0.25 * dev, 5e-7))
            return dev;
        devPrev = dev;
        res = 2 * res - 1;
    }
    return devPrev;
}

namespace {

struct BumpWeightFrame {
    double logZ; // log of the total-mass prefactor
    Vec mean;
    Mat L; // chol(P^{-1})
};

BumpWeightFrame bump_weight_frame(const Model& model, const TestFunction& g) {
    if (g.kind != TestFunction::Kind::GaussianBump)
        throw Error("check_symmetry: test functions must be Gaussian bumps");
    const int n = model.dim;
    Mat P = Mat::Identity(n, n) / (g.sigma * g.sigma) - model.QinfInv;
    Eigen::LLT<Mat> llt(symmetrize(P));
    if (llt.info() != Eigen::Success)
        throw NonIntegrable("check_symmetry: bump too wide for the gamma_{-inf} weight");
    Mat Pinv = llt.solve(Mat::Identity(n, n));
    BumpWeightFrame fr;
    fr.mean = Pinv * (g.center / (g.sigma * g.sigma));
    Eigen::LLT<Mat> lltInv(symmetrize(Pinv));
    fr.L = lltInv.matrixL();
    double logDetP = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
    double kappa0 = 0.5 * n * kLog2Pi + 0.5 * model.logDetQinf -
                    g.center.squaredNorm() / (2.0 * g.sigma * g.sigma) + std::log(g.amplitude);
    fr.logZ = kappa0 + 0.5 * fr.mean.dot(P * fr.mean) + 0.5 * n * kLog2Pi - 0.5 * logDetP;
    return fr;
}

double weighted_pairing(const Model& model, const TestFunction& f, const TestFunction& g,
                        double t, int nodes, const QuadratureSpec& quad) {
    // <H_t f, g>_{gamma_{-inf}} with the outer x-integral in the frame of
    // gamma_{-inf}(x) g(x)
    BumpWeightFrame fr = bump_weight_frame(model, g);
    QuadratureSpec inner = quad;
    inner.nodesPerAxis = nodes;
    const double sqrt2 = std::sqrt(2.0);
    double mean = 0.0;
    for_each_hermite_node(model.dim, nodes, [&](const Vec& xi, double logW) {
        Vec xpt = fr.mean + sqrt2 * (fr.L * xi);
        mean += std::exp(logW) * apply_kolmogorov(model, f, t, xpt, inner).value;
    });
    mean *= std::pow(M_PI, -0.5 * model.dim);
    return std::exp(fr.logZ) * mean;
}

} // namespace

SymmetryResult check_symmetry(const Model& model, const TestFunction& f, const TestFunction& g,
                              double t, const QuadratureSpec& quad) {
    if (!(t > 0.0)) throw NonPositiveTime("check_symmetry: t must be positive");
    SymmetryResult r;
    r.lhs = weighted_pairing(model, f, g, t, quad.nodesPerAxis, quad);
    r.rhs = weighted_pairing(model, g, f, t, quad.nodesPerAxis, quad);
    int lowNodes = std::max(8, (3 * quad.nodesPerAxis) / 4);
    double lhsLow = weighted_pairing(model, f, g, t, lowNodes, quad);
    double rhsLow = weighted_pairing(model, g, f, t, lowNodes, quad);
    r.errorEstimate = std::abs(r.lhs - lhsLow) + std::abs(r.rhs - rhsLow) +
                      1e-12 * (std::abs(r.lhs) + std::abs(r.rhs));
    return r;
}

} // namespace ouinv
