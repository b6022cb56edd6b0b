#pragma once

#include <cstdint>
#include <random>

#include "ouinv/linalg.hpp"

namespace ouinv {

/// splitmix64 step; used to derive independent stream seeds from a base seed.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Deterministic seed for stream `index` of a run with base `seed`.
/// Each parallel worker / sample block gets its own stream, so results do
/// not depend on the worker count.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t s = seed ^ (0x517cc1b727220a95ULL * (index + 1));
    splitmix64(s);
    return splitmix64(s);
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::uint64_t index = 0) {
    return Rng(stream_seed(seed, index));
}

inline Vec standard_normal(Rng& rng, int dim) {
    std::normal_distribution<double> nd(0.0, 1.0);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v[i] = nd(rng);
    return v;
}

/// Uniform point on the unit sphere S^{n-1}.
inline Vec unit_sphere(Rng& rng, int dim) {
    Vec v = standard_normal(rng, dim);
    double n = v.norm();
    while (n < 1e-12) {
        v = standard_normal(rng, dim);
        n = v.norm();
    }
    return v / n;
}

/// Uniform point in the ball B(center, radius).
inline Vec uniform_ball(Rng& rng, const Vec& center, double radius) {
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const int n = static_cast<int>(center.size());
    Vec dir = unit_sphere(rng, n);
    double r = radius * std::pow(ud(rng), 1.0 / n);
    return center + r * dir;
}

} // namespace ouinv
