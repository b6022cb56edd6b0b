#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "ouinv/geometry.hpp"
#include "ouinv/maximal.hpp"
#include "ouinv/model.hpp"
#include "ouinv/semigroup.hpp"

namespace ouinv {

struct CoveringParams {
    double alpha = 1e-2;      // annulus level
    double alphaPrime = 0.0;  // recursion threshold
    int m = 0;                // annulus index of K_t^{-,m}
    double A = 10.0;          // zone width multiplier
    double delta = 0.0;       // lower t bound; <= 0 means derive from the growth fit
    double tRatio = 1.1;      // geometric grid on [delta, 1]
};

struct ForbiddenZone {
    Vec center;    // x^{(l)}
    double radius; // A 2^{3m} sqrt(t_l), cap distance on E_beta
    double beta;   // R(x^{(l)})
    double t;
};

struct CoveringState {
    CoveringParams params;
    std::vector<Vec> cloud;
    std::vector<double> cloudSup;      // sup over the t-grid of the K^{-,m} integral
    std::vector<double> cloudWitnessT; // argmax t (only meaningful where sup >= alpha')
    std::vector<int> selected;         // cloud indices x^{(l)}, in order
    std::vector<double> times;         // t_l
    std::vector<ForbiddenZone> zones;
    std::vector<Vec> ballCenters; // D_{-t_l} x^{(l)}
    std::vector<double> ballRadii;
    double delta = 0.0;
    // h discretized on its support; masses sum to ~1
    std::vector<Vec> hPoints;
    std::vector<double> hMasses;
};

/// Runs the maximizer-selection recursion on a finite cloud inside the
/// annulus E_alpha. h must be nonnegative and normalized in L^1(gamma_{-inf}).
CoveringState run_forbidden_zones(const Model& model, const TestFunction& h,
                                  const CoveringParams& params, const std::vector<Vec>& cloud);

struct CoveringVerification {
    bool disjoint = true;
    std::pair<int, int> violatingPair{-1, -1};
    bool covered = true;
    int uncoveredIndex = -1;
    double maxZoneRatio = 0.0; // max of gamma(Z_l) alpha' / int_{B_l} h dgamma
    std::vector<double> zoneMeasures;
    std::vector<double> ballIntegrals;
};

/// Items (1), (2), (3) of the forbidden-zones construction, checked on the
/// state returned by run_forbidden_zones. Does not throw on violations; the
/// flags carry the offending indices.
CoveringVerification verify_covering(const Model& model, const CoveringState& state);

/// Doubles A until items (1) and (2) pass; returns the first passing A.
double find_min_A(const Model& model, const TestFunction& h, CoveringParams params,
                  const std::vector<Vec>& cloud, double startA = 0.5, int maxDoublings = 14);

/// Seeded point cloud in the annulus {3/4 log(1/alpha) <= R <= 5/4 log(1/alpha)}.
std::vector<Vec> annulus_cloud(const Model& model, double alpha, int count, std::uint64_t seed);

/// Membership of y in the zone: polar s <= 0 at level beta and cap distance
/// below the zone radius.
bool zone_contains(const Model& model, const ForbiddenZone& zone, const Vec& y);

} // namespace ouinv
