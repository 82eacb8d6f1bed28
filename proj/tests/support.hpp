#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"

namespace fspde::testing {

inline Field random_field(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> n;
    Field f(g.N);
    for (auto& v : f) v = n(gen);
    return f;
}

/// Smooth random field: a few low modes with random amplitudes.
inline Field smooth_field(const GridSpec& g, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Field f(g.N, 0.0);
    for (int k = 1; k <= 4; ++k) {
        const double a = u(gen), b = u(gen);
        for (std::size_t i = 0; i < g.N; ++i) {
            const double arg = std::numbers::pi * k * g.x(i) / g.L;
            f[i] += a * std::cos(arg) + b * std::sin(arg);
        }
    }
    return f;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline double rel_l2(std::span<const double> a, std::span<const double> b, const GridSpec& g) {
    Field d(g.N);
    for (std::size_t i = 0; i < g.N; ++i) d[i] = a[i] - b[i];
    const double s = l2_norm(b, g);
    return s > 0.0 ? l2_norm(d, g) / s : l2_norm(d, g);
}

}  // namespace fspde::testing
