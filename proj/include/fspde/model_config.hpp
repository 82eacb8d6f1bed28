#pragma once

// Problem description for u_t = D^alpha_delta u + sum_k d^k h_k + f dW on the
// periodic domain [-L, L), and the admissibility rules it must satisfy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "fspde/error.hpp"

namespace fspde {

/// Operator data: order alpha, skewness delta, highest entire-derivative
/// order m and (for the linear model) the drift coefficients c_0..c_m.
struct FracParams {
    double alpha = 1.5;
    double delta = 0.0;
    int m = 0;
    std::vector<double> drift;

    friend bool operator==(const FracParams&, const FracParams&) = default;
};

/// Uniform space-time grid. Nodes x_i = -L + i*dx, i = 0..N-1; x_{N/2} = 0.
/// Time levels t_n = n*dt, n = 0..M.
struct GridSpec {
    double L = 1.0;
    std::size_t N = 64;
    double T = 1.0;
    std::size_t M = 64;

    [[nodiscard]] double dx() const { return 2.0 * L / static_cast<double>(N); }
    [[nodiscard]] double dt() const { return T / static_cast<double>(M); }
    [[nodiscard]] double x(std::size_t i) const { return -L + static_cast<double>(i) * dx(); }
    [[nodiscard]] double time(std::size_t n) const { return static_cast<double>(n) * dt(); }

    /// Signed mode number of storage slot k (FFT order: 0..N/2-1, then -N/2..-1).
    [[nodiscard]] long mode(std::size_t k) const {
        const auto n = static_cast<long>(N);
        const auto kk = static_cast<long>(k);
        return kk < n / 2 ? kk : kk - n;
    }
    /// Storage slot of signed mode j.
    [[nodiscard]] std::size_t slot(long j) const {
        const auto n = static_cast<long>(N);
        return static_cast<std::size_t>(((j % n) + n) % n);
    }
    /// lambda_j = pi j / L for storage slot k.
    [[nodiscard]] double lambda(std::size_t k) const {
        return std::numbers::pi * static_cast<double>(mode(k)) / L;
    }
    [[nodiscard]] std::size_t nyquist() const { return N / 2; }

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

using Coefficient = std::function<double(double t, double x, double u)>;
using Envelope = std::function<double(double x)>;

/// Nonlinear coefficients f(t,x,u), h_k(t,x,u) with declared Lipschitz data.
/// Empty callables are treated as identically zero.
struct CoefficientSpec {
    Coefficient f;
    std::vector<Coefficient> h;
    std::vector<Envelope> envelopes;  // a_0..a_{m+1}; missing entries mean a_k = 0
    double lipschitz = 1.0;           // K_T
};

inline double evaluate(const Coefficient& c, double t, double x, double u) {
    return c ? c(t, x, u) : 0.0;
}

struct Violation {
    std::string rule;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;

    [[nodiscard]] bool ok() const { return violations.empty(); }
    [[nodiscard]] bool has(const std::string& rule) const {
        for (const auto& v : violations)
            if (v.rule == rule) return true;
        return false;
    }
};

enum class ValidationMode {
    solver,        // alpha > 1
    kernel_oracle  // additionally admits alpha = 1 (explicit Cauchy kernel)
};

/// Largest even integer strictly less than alpha.
inline int even_part(double alpha) {
    if (!(alpha > 0.0)) throw DomainError("even_part: alpha must be positive");
    auto e = static_cast<int>(std::floor(alpha / 2.0)) * 2;
    if (static_cast<double>(e) >= alpha) e -= 2;
    return e;
}

/// Admissible skewness bound min{alpha - [alpha]_2, 2 + [alpha]_2 - alpha}.
inline double delta_bound(double alpha) {
    const double e = even_part(alpha);
    return std::min(alpha - e, 2.0 + e - alpha);
}

inline bool is_integer(double v) { return std::floor(v) == v; }

inline bool is_odd_integer(double v) {
    return is_integer(v) && std::fmod(std::fabs(v), 2.0) == 1.0;
}

/// Throws DomainError unless (alpha, delta) may be used in a multiplier.
inline void require_admissible(double alpha, double delta) {
    if (!(alpha > 0.0)) throw DomainError("alpha must be positive");
    const double bound = delta_bound(alpha);
    if (std::fabs(delta) > bound + 1e-14)
        throw DomainError("|delta| = " + std::to_string(std::fabs(delta)) + " exceeds bound " +
                          std::to_string(bound));
    if (is_odd_integer(alpha) && delta != 0.0)
        throw DomainError("delta must be 0 for odd integer alpha");
}

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline void check_params(const FracParams& p, ValidationMode mode, ValidationReport& r) {
    const bool alpha_ok = mode == ValidationMode::solver ? p.alpha > 1.0 : (p.alpha > 1.0 || p.alpha == 1.0);
    if (!alpha_ok) {
        r.violations.push_back({"alpha-range", mode == ValidationMode::solver
                                                   ? "alpha must exceed 1 for solver use"
                                                   : "alpha must be 1 or exceed 1 in kernel-oracle mode"});
        return;
    }
    const double bound = delta_bound(p.alpha);
    if (std::fabs(p.delta) > bound + 1e-14)
        r.violations.push_back({"delta-bound", "delta exceeds bound " + std::to_string(bound)});
    if (is_odd_integer(p.alpha) && p.delta != 0.0)
        r.violations.push_back({"delta-odd-integer", "delta must be 0 when alpha is an odd integer"});
    if (p.m < 0) r.violations.push_back({"m-range", "m must be nonnegative"});
    if (p.m > static_cast<int>(std::floor(p.alpha)))
        r.violations.push_back({"m-range", "m > floor(alpha)"});
    if (p.drift.size() > static_cast<std::size_t>(std::max(p.m, 0)) + 1)
        r.violations.push_back({"drift-count", "more drift coefficients than m + 1"});
}

inline void check_grid(const GridSpec& g, ValidationReport& r) {
    if (!(g.L > 0.0)) r.violations.push_back({"grid-L", "L must be positive"});
    if (!is_power_of_two(g.N) || g.N < 2)
        r.violations.push_back({"grid-N", "N must be a power of two >= 2"});
    if (!(g.T > 0.0)) r.violations.push_back({"grid-T", "T must be positive"});
    if (g.M == 0) r.violations.push_back({"grid-M", "M must be positive"});
    // N even puts node N/2 exactly at the origin
    if (g.N % 2 != 0) r.violations.push_back({"grid-origin", "no grid node at x = 0"});
}

inline void check_coefficients(const FracParams& p, const GridSpec& g, const CoefficientSpec& c,
                               ValidationReport& r) {
    if (c.h.size() > static_cast<std::size_t>(std::max(p.m, 0)) + 1) {
        r.violations.push_back({"coeff-count", "more h_k than m + 1"});
        return;
    }
    if (!(c.lipschitz > 0.0)) {
        r.violations.push_back({"lipschitz", "declared K_T must be positive"});
        return;
    }
    const std::array<double, 3> ts{0.0, 0.5 * g.T, g.T};
    const std::array<double, 3> xs{-0.5 * g.L, 0.0, g.L / 3.0};
    const std::array<double, 5> us{-2.0, -0.5, 0.0, 0.3, 1.7};
    const double K = c.lipschitz;
    auto envelope = [&](std::size_t k, double x) {
        return k < c.envelopes.size() && c.envelopes[k] ? c.envelopes[k](x) : 0.0;
    };
    double worst_lip = 0.0;
    bool growth_ok = true;
    for (double t : ts)
        for (double x : xs) {
            for (std::size_t a = 0; a < us.size(); ++a) {
                const double z = us[a];
                for (std::size_t k = 0; k < c.h.size(); ++k)
                    if (std::fabs(evaluate(c.h[k], t, x, z)) > 1.05 * K * (envelope(k, x) + std::fabs(z)) + 1e-14)
                        growth_ok = false;
                const auto fi = static_cast<std::size_t>(std::max(p.m, 0)) + 1;
                if (std::fabs(evaluate(c.f, t, x, z)) > 1.05 * K * (envelope(fi, x) + std::fabs(z)) + 1e-14)
                    growth_ok = false;
                for (std::size_t b = a + 1; b < us.size(); ++b) {
                    const double y = us[b];
                    const double df = std::fabs(evaluate(c.f, t, x, y) - evaluate(c.f, t, x, z));
                    double dh = 0.0;
                    for (const auto& hk : c.h)
                        dh = std::max(dh, std::fabs(evaluate(hk, t, x, y) - evaluate(hk, t, x, z)));
                    worst_lip = std::max(worst_lip, (dh + df) / std::fabs(y - z));
                }
            }
        }
    if (worst_lip > 1.05 * K)
        r.violations.push_back({"lipschitz", "sampled Lipschitz ratio " + std::to_string(worst_lip) +
                                                 " exceeds 1.05 K_T = " + std::to_string(1.05 * K)});
    if (!growth_ok) r.violations.push_back({"growth", "growth bound K_T (a_k + |u|) violated at a probe point"});
}

}  // namespace detail

/// Checks every admissibility rule; violations are returned, never thrown.
inline ValidationReport validate(const FracParams& params, const GridSpec& grid, const CoefficientSpec& coeffs,
                                 ValidationMode mode = ValidationMode::solver) {
    ValidationReport r;
    detail::check_params(params, mode, r);
    detail::check_grid(grid, r);
    if (r.ok()) detail::check_coefficients(params, grid, coeffs, r);
    return r;
}

inline ValidationReport validate(const FracParams& params, const GridSpec& grid,
                                 ValidationMode mode = ValidationMode::solver) {
    ValidationReport r;
    detail::check_params(params, mode, r);
    detail::check_grid(grid, r);
    return r;
}

}  // namespace fspde
