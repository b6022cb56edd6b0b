#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ouinv/ballgrid.hpp"
#include "ouinv/model.hpp"
#include "ouinv/semigroup.hpp"

namespace ouinv {

enum class Region { Local, Global };

/// Local iff |x - u| <= 1/(1 + |x|); ties are Local.
Region region_of(const Model& model, const Vec& x, const Vec& u);

struct TGrid {
    std::vector<double> ts;
    static TGrid geometric(double tmin, double tmax, double ratio);
};

struct SplitMaximalValue {
    double minusLocal = 0.0, minusGlobal = 0.0; // sup over t <= 1
    double plusLocal = 0.0, plusGlobal = 0.0;   // sup over t > 1
    double hStar = 0.0;   // sup over the full grid of the undivided integral
    double supPlus = 0.0; // sup over t > 1 of the undivided integral
    double sum4() const { return minusLocal + minusGlobal + plusLocal + plusGlobal; }
};

struct Box {
    Vec lo, hi;
};

/// Precomputed sweep of H_t f(x) over two t-grids for a compactly supported
/// f (ball indicator or bump). Immutable after construction; eval() is pure.
class MaximalEvaluator {
public:
    MaximalEvaluator(const Model& model, const TestFunction& f, const TGrid& tMinus,
                     const TGrid& tPlus, double cutoff = 1e-15);
    SplitMaximalValue eval(const Vec& x) const;
    const Model& model() const { return *model_; }

private:
    struct PerT {
        double t = 0.0;
        double logc = 0.0;
        Mat QtInv;
        double lambdaMinQtInv = 0.0;
        double normExpTB = 0.0;
        std::vector<Vec> mapped; // e^{tB} u_j
        Vec mappedCenter;
        int gridIndex = 0; // 0 fine, 1 coarse
        bool plus = false;
    };
    const Model* model_;
    TestFunction f_;
    double supportRadius_ = 0.0;
    BallGrid grids_[2];
    std::vector<double> weights_[2]; // f(u_j) * vol_j
    double totalWeight_[2] = {0.0, 0.0};
    std::vector<PerT> ts_;
    double cutoff_;
};

/// The four split suprema at one point. f must be nonnegative and
/// normalized in L^1(gamma_{-inf}) within 1%; grids geometric with
/// ratio <= 1.15.
SplitMaximalValue split_maximal(const Model& model, const TestFunction& f, const Vec& x,
                                const TGrid& tMinus, const TGrid& tPlus,
                                const QuadratureSpec& quad);

struct LevelSetOptions {
    int resolution = 256;
    int refineDepth = 5;
};

struct LevelSetReport {
    double alpha = 0.0;
    double measure = 0.0;
    double alphaScaled = 0.0;    // alpha * measure
    double alphaLogScaled = 0.0; // alpha * sqrt(log(1/alpha)) * measure
    int resolution = 0;
    Box box;
};

/// gamma_{-inf}{x in box : evaluator(x) > alpha} by cell-center
/// classification with recursive refinement near the level-set boundary.
LevelSetReport level_set_measure(const Model& model,
                                 const std::function<double(const Vec&)>& evaluator, double alpha,
                                 const Box& box, const LevelSetOptions& opts);

/// Scalar field on a uniform grid with multilinear interpolation (n <= 2).
struct ScalarField {
    Box box;
    std::vector<int> npts;
    std::vector<double> values;
    double at(const Vec& x) const;
};

/// Normalized indicator of B(center, radius): amplitude 1/gamma(B).
TestFunction normalized_ball(const Model& model, const Vec& center, double radius);

/// Box covering {R <= 1.25 log(1/alphaMin)} plus a margin.
Box annulus_box(const Model& model, double alphaMin, double margin);

struct ExperimentConfig {
    double tMin = 1e-4;
    double tMax = 50.0;
    double tRatio = 1.1;
    int fieldResolution = 0; // 0: 4097 for n=1, 385 for n=2
    int levelRefineDepth = 4;
    double ballRadius = 0.05;
    double boxMargin = 2.0;
    double sharpnessA = 3.0;
    std::uint64_t seed = 1;
};

struct FieldSet {
    Box box;
    ScalarField hStar, supPlus;
    ScalarField lemma41Stat;      // pL + pG + mG at each grid point
    double lemma41Constant = 0.0; // its maximum over the grid
};

/// Sweeps a MaximalEvaluator over the box grid.
FieldSet compute_field(const MaximalEvaluator& ev, const Box& box, int resolution);

struct WeakTypeReport {
    std::vector<double> alphas;
    std::vector<Vec> centers;
    std::vector<std::vector<double>> measures;   // [center][alpha]
    std::vector<std::vector<double>> statistics; // alpha * measure
    double envelope = 0.0;
    double stabilityFactor = 0.0; // max over centers of (max stat / min stat)
    double lemma41Constant = 0.0;
    Box box;
};

WeakTypeReport weak_type_experiment(const Model& model, const std::vector<Vec>& centers,
                                    const std::vector<double>& alphaGrid,
                                    const ExperimentConfig& cfg);

struct EnhancedReport {
    std::vector<double> alphas;
    std::vector<double> measures;   // level sets of sup_{t>1}
    std::vector<double> statNoLog;  // alpha * measure
    std::vector<double> statLog;    // alpha sqrt(log 1/alpha) * measure
    std::vector<double> fullMeasures; // level sets of the full maximal function
    double envelopeLog = 0.0;
    Box box;
};

EnhancedReport enhanced_experiment(const Model& model, const TestFunction& f,
                                   const std::vector<double>& alphaGrid,
                                   const ExperimentConfig& cfg);

struct SharpnessReport {
    std::vector<double> alphas;
    std::vector<double> rz;            // R(z)
    std::vector<double> measures;      // level sets of sup_{t>1} at alpha
    std::vector<double> statLog;       // alpha sqrt(log 1/alpha) * measure
    std::vector<double> bstarMeasures; // gamma(B*)
    std::vector<double> bstarRatios;   // gamma(B*) / (e^{Rz} / sqrt(Rz))
    std::vector<double> kernelLowerC;  // min over B* of H_2 f(x) e^{R(x)}
    std::vector<double> distanceC;     // max |D_{-2}x - u| over B1 x B2
    double minStatLog = 0.0, maxStatLog = 0.0;
    Box box;
};

SharpnessReport sharpness_experiment(const Model& model, const std::vector<double>& alphaGrid,
                                     double A, const ExperimentConfig& cfg);

// fitted-constant spot checks used by the verification suite
double lemma42_constant(const Model& model, int samples, std::uint64_t seed);
double ru_rx_constant(const Model& model, int samples, std::uint64_t seed);
double five_four_constant(const Model& model, double alpha, int samples, std::uint64_t seed);
double hl_domination_slope(const Model& model, int samples, std::uint64_t seed);

} // namespace ouinv
