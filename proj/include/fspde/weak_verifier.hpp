#pragma once

// Residuals of the two weak formulations of the equation, evaluated on a
// computed path against smooth compactly supported test functions, and the
// backward-evolved dual test function psi^t(s) = G_{-delta}(t - s) * phi.
//
// Time integrals are left-endpoint sums over the levels t_0..t_{n-1}, the
// same rule the solvers use for their forcing.

#include <algorithm>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"
#include "fspde/noise.hpp"

namespace fspde {

struct TestFunction {
    double center = 0.0;
    double width = 1.0;
    Field phi;
    std::vector<Field> derivatives;  // phi^{(k)}, k = 0..m
    Field frac_dual;                 // D^alpha_{-delta} phi
};

/// Time-dependent test function on levels t_0..t_level.
struct TimeTestFunction {
    std::size_t level = 0;
    std::vector<Field> psi;
    std::vector<Field> ds_psi;
    std::vector<Field> frac_dual;
    std::vector<std::vector<Field>> derivatives;  // [level][k]
};

/// phi(x) = exp(-1/(1 - r^2)), r = (x - center)/width, zero for |r| >= 1.
inline TestFunction make_bump(double center, double width, const FracParams& params, const GridSpec& grid) {
    if (!(width > 0.0) || center - width <= -grid.L || center + width >= grid.L)
        throw DomainError("make_bump: support must lie inside (-L, L)");
    TestFunction tf{center, width, Field(grid.N, 0.0), {}, {}};
    for (std::size_t i = 0; i < grid.N; ++i) {
        const double r = (grid.x(i) - center) / width;
        if (std::fabs(r) < 1.0) tf.phi[i] = std::exp(-1.0 / (1.0 - r * r));
    }
    for (int k = 0; k <= std::max(params.m, 0); ++k) tf.derivatives.push_back(derivative(tf.phi, k, grid));
    tf.frac_dual = frac_derivative(tf.phi, params.alpha, -params.delta, grid);
    return tf;
}

/// Five bumps: centers -L/4, 0, L/4 at width L/8, and centers 0, L/4 at width L/4.
inline std::vector<TestFunction> bump_battery(const FracParams& params, const GridSpec& grid) {
    const double L = grid.L;
    return {make_bump(-L / 4, L / 8, params, grid), make_bump(0.0, L / 8, params, grid),
            make_bump(L / 4, L / 8, params, grid), make_bump(0.0, L / 4, params, grid),
            make_bump(L / 4, L / 4, params, grid)};
}

/// psi(s) = phi for every s: the first-kind test function seen as a second-kind one.
inline TimeTestFunction constant_test_function(const TestFunction& phi, std::size_t level) {
    TimeTestFunction out;
    out.level = level;
    for (std::size_t n = 0; n <= level; ++n) {
        out.psi.push_back(phi.phi);
        out.ds_psi.emplace_back(phi.phi.size(), 0.0);
        out.frac_dual.push_back(phi.frac_dual);
        out.derivatives.push_back(phi.derivatives);
    }
    return out;
}

/// psi^t(t_n) with F psi^t(s) = e^{psi_{alpha,-delta} (t - s)} F phi and d_s psi^t = -D^alpha_{-delta} psi^t.
inline TimeTestFunction dual_test_function(const TestFunction& phi, std::size_t level, const FracParams& params,
                                           const GridSpec& grid) {
    const auto dual = symbol_multiplier(params.alpha, -params.delta, grid);
    const auto phi_hat = forward(phi.phi, grid).coeffs;
    std::vector<std::vector<cplx>> dk;
    for (int k = 0; k <= std::max(params.m, 0); ++k) dk.push_back(derivative_multiplier(k, grid));
    const double t = grid.time(level);
    TimeTestFunction out;
    out.level = level;
    std::vector<cplx> c(grid.N);
    for (std::size_t n = 0; n <= level; ++n) {
        if (n == level) {
            out.psi.push_back(phi.phi);
            out.frac_dual.push_back(phi.frac_dual);
            out.derivatives.push_back(phi.derivatives);
        } else {
            const double lag = t - grid.time(n);
            std::vector<cplx> base(grid.N);
            for (std::size_t j = 0; j < grid.N; ++j) base[j] = std::exp(dual[j] * lag) * phi_hat[j];
            out.psi.push_back(inverse(base, grid));
            for (std::size_t j = 0; j < grid.N; ++j) c[j] = dual[j] * base[j];
            out.frac_dual.push_back(inverse(c, grid));
            std::vector<Field> ders;
            for (const auto& d : dk) {
                for (std::size_t j = 0; j < grid.N; ++j) c[j] = d[j] * base[j];
                ders.push_back(inverse(c, grid));
            }
            out.derivatives.push_back(std::move(ders));
        }
        Field ds(grid.N);
        for (std::size_t i = 0; i < grid.N; ++i) ds[i] = -out.frac_dual.back()[i];
        out.ds_psi.push_back(std::move(ds));
    }
    return out;
}

namespace detail {

inline void require_states(std::span<const Field> states, std::size_t level, const GridSpec& grid,
                           const SheetIncrements& sheet) {
    if (!(sheet.grid == grid)) throw DomainError("weak residual: sheet lives on a different grid");
    if (states.size() < level + 1) throw DomainError("weak residual: path is shorter than the requested time");
    if (level > grid.M) throw DomainError("weak residual: time beyond the grid horizon");
    for (std::size_t n = 0; n <= level; ++n)
        if (states[n].size() != grid.N) throw DomainError("weak residual: path level does not match the grid");
}

/// (sum_k (-1)^k <h_k(t, ., u), test_k>,  sum_i f(t, y_i, u_i) test0(y_i) dW_i).
inline std::pair<double, double> forcing_pairings(std::span<const double> u, double t,
                                                  const std::vector<Field>& test_derivs, std::span<const double> test0,
                                                  const CoefficientSpec& coeffs, std::span<const double> dW,
                                                  const GridSpec& grid) {
    double drift = 0.0;
    for (std::size_t k = 0; k < coeffs.h.size(); ++k) {
        if (!coeffs.h[k]) continue;
        if (k >= test_derivs.size()) throw DomainError("weak residual: h_k given for k > m");
        double s = 0.0;
        for (std::size_t i = 0; i < grid.N; ++i) s += coeffs.h[k](t, grid.x(i), u[i]) * test_derivs[k][i];
        drift += ((k & 1U) ? -1.0 : 1.0) * s * grid.dx();
    }
    double noise = 0.0;
    if (coeffs.f)
        for (std::size_t i = 0; i < grid.N; ++i) noise += coeffs.f(t, grid.x(i), u[i]) * test0[i] * dW[i];
    return {drift, noise};
}

}  // namespace detail

/// Residual of the first-kind weak identity at t = t_level.
inline double weak_residual_first(std::span<const Field> states, const SheetIncrements& sheet,
                                  const TestFunction& phi, std::size_t level, const CoefficientSpec& coeffs,
                                  [[maybe_unused]] const FracParams& params, const GridSpec& grid) {
    detail::require_states(states, level, grid, sheet);
    double r = inner(states[level], phi.phi, grid) - inner(states[0], phi.phi, grid);
    const double dt = grid.dt();
    for (std::size_t n = 0; n < level; ++n) {
        r -= dt * inner(states[n], phi.frac_dual, grid);
        const auto [drift, noise] =
            detail::forcing_pairings(states[n], grid.time(n), phi.derivatives, phi.phi, coeffs, sheet.row(n), grid);
        r -= dt * drift + noise;
    }
    return std::fabs(r);
}

/// Residual of the second-kind weak identity at t = t_level with a time-dependent test function.
inline double weak_residual_second(std::span<const Field> states, const SheetIncrements& sheet,
                                   const TimeTestFunction& psi, const CoefficientSpec& coeffs,
                                   [[maybe_unused]] const FracParams& params, const GridSpec& grid) {
    const std::size_t level = psi.level;
    detail::require_states(states, level, grid, sheet);
    if (psi.psi.size() != level + 1) throw ShapeError("weak_residual_second: test function has wrong level count");
    double r = inner(states[level], psi.psi[level], grid) - inner(states[0], psi.psi[0], grid);
    const double dt = grid.dt();
    for (std::size_t n = 0; n < level; ++n) {
        r -= dt * inner(states[n], psi.ds_psi[n], grid);
        r -= dt * inner(states[n], psi.frac_dual[n], grid);
        const auto [drift, noise] = detail::forcing_pairings(states[n], grid.time(n), psi.derivatives[n], psi.psi[n],
                                                             coeffs, sheet.row(n), grid);
        r -= dt * drift + noise;
    }
    return std::fabs(r);
}

}  // namespace fspde
