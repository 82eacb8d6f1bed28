#pragma once

// Linear equation u_t = D^alpha_delta u + sum_k c_k d^k u + f(t, x) dW solved
// mode by mode. Each Fourier mode is an Ornstein-Uhlenbeck process driven by
// the martingale eta_j(t) = int int e^{i lambda_j y} f dW, advanced with the
// exact exponential factor:
//     u_j(t_{n+1}) = e^{z_j dt} (u_j(t_n) + dXi_j(t_n)),  z_j = psi_j + drift_j,
//     dXi_j(t_n)   = sum_i e^{i lambda_j y_i} f(t_n, y_i) dW[n][i].

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"
#include "fspde/noise.hpp"

namespace fspde {

/// Deterministic noise amplitude f(s, y), independent of the solution.
using SourceField = std::function<double(double s, double y)>;

struct LinearModel {
    FracParams params;  // drift holds c_0..c_m
    SourceField f;      // empty means f = 0
    Field u0;
};

struct Trajectory {
    GridSpec grid;
    std::vector<double> times;
    std::vector<Field> states;
    std::vector<std::vector<cplx>> spectral_states;
    NoiseRef noise_ref;
};

/// Spectral noise increment of one time level for an amplitude field sampled on the grid.
inline std::vector<cplx> noise_increment(std::span<const double> amplitude, std::span<const double> dW,
                                         const GridSpec& grid) {
    std::vector<double> w(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) w[i] = amplitude[i] * dW[i];
    return forward_sum(w, grid);
}

inline std::vector<cplx> source_increment(const SourceField& f, double t, std::span<const double> dW,
                                          const GridSpec& grid) {
    std::vector<double> a(grid.N);
    for (std::size_t i = 0; i < grid.N; ++i) a[i] = f(t, grid.x(i));
    return noise_increment(a, dW, grid);
}

/// Throws InstabilityError if some mode has Re(psi_j + drift_j) > 0.
inline void require_stable(const SymbolTable& table) {
    for (std::size_t k = 0; k < table.size(); ++k)
        if (table.total(k).real() > 0.0)
            throw InstabilityError("mode slot " + std::to_string(k) + " grows: Re(psi + drift) = " +
                                   std::to_string(table.total(k).real()));
}

/// Runs the per-mode recursion, calling visit(n, u_hat) at every level n = 0..M.
template <class Visitor>
void march_linear(const LinearModel& model, const GridSpec& grid, const SheetIncrements& sheet, Visitor&& visit) {
    if (model.u0.size() != grid.N) throw ShapeError("evolve_linear: u0 length does not match grid");
    if (!(sheet.grid == grid)) throw DomainError("evolve_linear: sheet lives on a different grid");
    const SymbolTable table(model.params, grid);
    require_stable(table);
    std::vector<cplx> factor(grid.N);
    for (std::size_t k = 0; k < grid.N; ++k) factor[k] = std::exp(table.total(k) * grid.dt());

    auto u = forward(model.u0, grid).coeffs;
    visit(std::size_t{0}, std::as_const(u));
    for (std::size_t n = 0; n < grid.M; ++n) {
        if (model.f) {
            const auto xi = source_increment(model.f, grid.time(n), sheet.row(n), grid);
            for (std::size_t k = 0; k < grid.N; ++k) u[k] += xi[k];
        }
        for (std::size_t k = 0; k < grid.N; ++k) u[k] *= factor[k];
        visit(n + 1, std::as_const(u));
    }
}

inline Trajectory evolve_linear(const LinearModel& model, const GridSpec& grid, const SheetIncrements& sheet) {
    Trajectory traj{grid, {}, {}, {}, sheet.ref()};
    traj.times.reserve(grid.M + 1);
    traj.states.reserve(grid.M + 1);
    traj.spectral_states.reserve(grid.M + 1);
    march_linear(model, grid, sheet, [&](std::size_t n, const std::vector<cplx>& u) {
        traj.times.push_back(grid.time(n));
        traj.spectral_states.push_back(u);
        traj.states.push_back(inverse(u, grid));
    });
    return traj;
}

/// max_{j,n} |u_j(t_n) - u0_j - (psi_j + drift_j) Q_n - eta_j(t_n)| with Q_n = dt sum_{l<n} u_j(t_l).
inline double residual_integral_form(const Trajectory& traj, const LinearModel& model, const SheetIncrements& sheet) {
    const auto& grid = traj.grid;
    if (!(traj.noise_ref == sheet.ref()) || !(sheet.grid == grid))
        throw DomainError("residual_integral_form: trajectory was not produced on this noise path");
    if (traj.spectral_states.size() != grid.M + 1) throw ShapeError("residual_integral_form: incomplete trajectory");
    const SymbolTable table(model.params, grid);
    const auto& u0 = traj.spectral_states.front();
    std::vector<cplx> Q(grid.N, cplx{}), eta(grid.N, cplx{});
    double worst = 0.0;
    for (std::size_t n = 1; n <= grid.M; ++n) {
        const auto& prev = traj.spectral_states[n - 1];
        for (std::size_t k = 0; k < grid.N; ++k) Q[k] += grid.dt() * prev[k];
        if (model.f) {
            const auto xi = source_increment(model.f, grid.time(n - 1), sheet.row(n - 1), grid);
            for (std::size_t k = 0; k < grid.N; ++k) eta[k] += xi[k];
        }
        const auto& u = traj.spectral_states[n];
        for (std::size_t k = 0; k < grid.N; ++k)
            worst = std::max(worst, std::abs(u[k] - u0[k] - table.total(k) * Q[k] - eta[k]));
    }
    return worst;
}

/// Ito-isometry variance E|u_j(t)|^2 of a mode started at 0 with f = 1 (continuous time).
inline double ito_mode_variance(cplx z, double t, double L) {
    const double a = z.real();
    if (a == 0.0) return 2.0 * L * t;
    return 2.0 * L * (1.0 - std::exp(2.0 * a * t)) / (-2.0 * a);
}

/// Same quantity for the discrete recursion after n steps: 2L dt sum_{k=1}^{n} e^{2 Re z k dt}.
inline double discrete_mode_variance(cplx z, std::size_t n, double dt, double L) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k) s += std::exp(2.0 * z.real() * static_cast<double>(k) * dt);
    return 2.0 * L * dt * s;
}

}  // namespace fspde
