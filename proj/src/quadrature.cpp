#include "ouinv/quadrature.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <mutex>

namespace ouinv {

namespace {

HermiteRule compute_hermite(int n) {
    // Jacobi matrix for Hermite polynomials (weight e^{-x^2}):
    // zero diagonal, off-diagonal beta_k = sqrt(k/2).
    Mat J = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = std::sqrt(0.5 * k);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    const double mu0 = std::sqrt(M_PI); // total mass of e^{-x^2}
    HermiteRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()[i];
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = mu0 * v0 * v0;
    }
    return r;
}

LegendreRule compute_legendre(int n) {
    Mat J = Mat::Zero(n, n);
    for (int k = 1; k < n; ++k) {
        double b = k / std::sqrt(4.0 * k * k - 1.0);
        J(k, k - 1) = b;
        J(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Mat> es(J);
    LegendreRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        r.nodes[i] = es.eigenvalues()[i];
        double v0 = es.eigenvectors()(0, i);
        r.weights[i] = 2.0 * v0 * v0;
    }
    return r;
}

} // namespace

const HermiteRule& hermite_rule(int n) {
    static std::map<int, HermiteRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_hermite(n)).first;
    return it->second;
}

const LegendreRule& legendre_rule(int n) {
    static std::map<int, LegendreRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_legendre(n)).first;
    return it->second;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b,
                   double fa, double fm, double fb, double whole, double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    double delta = left + right - whole;
    if (depth <= 0) throw QuadratureNotConverged("adaptive Simpson: max depth reached");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Mat simpson_rec_mat(const std::function<Mat(double)>& f, double a, double b,
                    const Mat& fa, const Mat& fm, const Mat& fb, const Mat& whole,
                    double tol, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    Mat flm = f(lm), frm = f(rm);
    Mat left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    Mat right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    Mat delta = left + right - whole;
    if (depth <= 0) throw QuadratureNotConverged("adaptive Simpson (matrix): max depth reached");
    if (delta.norm() <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_rec_mat(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_rec_mat(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int maxDepth) {
    if (a == b) return 0.0;
    double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec(f, a, b, fa, fm, fb, whole, tol, maxDepth);
}

Mat adaptive_simpson_matrix(const std::function<Mat(double)>& f, double a, double b,
                            double tol, int maxDepth) {
    Mat fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    if (a == b) return Mat::Zero(fa.rows(), fa.cols());
    Mat whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_rec_mat(f, a, b, fa, fm, fb, whole, tol, maxDepth);
}

double log_sum_exp(const std::vector<double>& v) {
    double m = -std::numeric_limits<double>::infinity();
    for (double x : v) m = std::max(m, x);
    if (!std::isfinite(m)) return m;
    double s = 0.0;
    for (double x : v) s += std::exp(x - m);
    return m + std::log(s);
}

namespace {

double panel_log_integral(const std::function<double(double)>& g, double a, double b, int npts) {
    const LegendreRule& rule = legendre_rule(npts);
    double h = 0.5 * (b - a), c = 0.5 * (a + b);
    std::vector<double> terms(npts);
    for (int i = 0; i < npts; ++i)
        terms[i] = std::log(rule.weights[i] * h) + g(c + h * rule.nodes[i]);
    return log_sum_exp(terms);
}

} // namespace

double log_integral_exp(const std::function<double(double)>& g, double a, double b,
                        double tolLog) {
    struct Panel {
        double a, b, lo8, lo16;
    };
    auto make = [&](double pa, double pb) {
        return Panel{pa, pb, panel_log_integral(g, pa, pb, 8), panel_log_integral(g, pa, pb, 16)};
    };
    std::vector<Panel> panels;
    const int initial = 8;
    for (int i = 0; i < initial; ++i) {
        double pa = a + (b - a) * i / initial;
        double pb = a + (b - a) * (i + 1) / initial;
        panels.push_back(make(pa, pb));
    }
    for (int round = 0; round < 60; ++round) {
        // total and worst panel, judged by contribution-weighted disagreement
        std::vector<double> los(panels.size());
        for (size_t i = 0; i < panels.size(); ++i) los[i] = panels[i].lo16;
        double total = log_sum_exp(los);
        int worst = -1;
        double worstScore = tolLog;
        for (size_t i = 0; i < panels.size(); ++i) {
            double disagreement = std::abs(panels[i].lo16 - panels[i].lo8);
            double weight = std::exp(std::min(0.0, panels[i].lo16 - total));
            double score = disagreement * weight;
            if (score > worstScore) {
                worstScore = score;
                worst = static_cast<int>(i);
            }
        }
        if (worst < 0) return total;
        Panel p = panels[worst];
        double mid = 0.5 * (p.a + p.b);
        panels[worst] = make(p.a, mid);
        panels.insert(panels.begin() + worst + 1, make(mid, p.b));
    }
    throw QuadratureNotConverged("log_integral_exp: panel refinement did not converge");
}

} // namespace ouinv
