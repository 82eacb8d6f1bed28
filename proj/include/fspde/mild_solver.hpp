#pragma once

// Mild solution of u_t = D^alpha_delta u + sum_k d^k h_k(u) + f(u) dW by Picard
// iteration of the solution operator A = A_0 + sum_k A_{k+1} + A_stoch on a
// whole space-time path, against one frozen noise realization.
//
// In Fourier space, with psi_j the symbol and t_n = n dt:
//   A_0 u0 (t_n)     = e^{psi t_n} u0_hat
//   A_k u (t_n)      = sum_{l<n} [int_{t_l}^{t_{l+1}} e^{psi (t_n - s)} ds] (-i lambda)^k h_k(t_l, u(t_l))^
//   A_stoch u (t_n)  = sum_{l<n} e^{psi (t_n - t_l)} sum_i e^{i lambda y_i} f(t_l, y_i, u(t_l, y_i)) dW[l][i]
// The time integral of e^{psi (t_n - s)} is taken exactly per mode, so the
// (t - s)^{-k/alpha} singularity of |d^k G(t - s)|_1 never meets a quadrature node.
// Coefficients are evaluated at the left end of each step (non-anticipating).

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"
#include "fspde/noise.hpp"
#include "fspde/spectral_solver.hpp"

namespace fspde {

/// One candidate solution path u(t_0), ..., u(t_M); u(t_0) = u0.
struct PathState {
    std::vector<Field> u;
};

struct PicardDiagnostics {
    std::vector<double> distances;  // max_n |u^{(i+1)}(t_n) - u^{(i)}(t_n)|_2 per sweep
    int iterations = 0;
    bool converged = false;
};

enum class InitialGuess { semigroup, zero };

struct PicardOptions {
    double tol = 1e-8;
    int max_iter = 50;
    InitialGuess start = InitialGuess::semigroup;
};

struct PicardResult {
    PathState path;
    PicardDiagnostics diagnostics;
};

/// e^{z} - 1 without cancellation for small |z|.
inline cplx expm1(cplx z) {
    const double s = std::sin(0.5 * z.imag());
    return {std::expm1(z.real()) * std::cos(z.imag()) - 2.0 * s * s, std::exp(z.real()) * std::sin(z.imag())};
}

/// (e^{z} - 1) / psi with z = psi dt; equals dt at psi = 0.
inline cplx phi1(cplx psi, double dt) {
    const cplx z = psi * dt;
    if (std::abs(z) < 1e-4) return dt * (1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0);
    return expm1(z) / psi;
}

/// Precomputed multipliers shared by every application of A on one grid.
class MildOperator {
public:
    MildOperator(const FracParams& params, const GridSpec& grid)
        : grid_(grid), m_(params.m), psi_(symbol_multiplier(params.alpha, params.delta, grid)),
          step_(grid.N), phi1_(grid.N) {
        for (std::size_t j = 0; j < grid.N; ++j) {
            step_[j] = std::exp(psi_[j] * grid.dt());
            phi1_[j] = fspde::phi1(psi_[j], grid.dt());
        }
        for (int k = 0; k <= std::max(m_, 0); ++k) deriv_.push_back(derivative_multiplier(k, grid));
    }

    [[nodiscard]] const GridSpec& grid() const { return grid_; }
    [[nodiscard]] const std::vector<cplx>& psi() const { return psi_; }
    [[nodiscard]] const std::vector<cplx>& step() const { return step_; }
    [[nodiscard]] const std::vector<cplx>& phi1() const { return phi1_; }
    [[nodiscard]] const std::vector<cplx>& derivative(int k) const { return deriv_.at(static_cast<std::size_t>(k)); }
    [[nodiscard]] int m() const { return m_; }

    /// sum_k (-i lambda)^k F[h_k(t, ., u)], the drift forcing of one level.
    [[nodiscard]] std::vector<cplx> drift_forcing(std::span<const double> u, double t,
                                                  const CoefficientSpec& coeffs) const {
        std::vector<cplx> out(grid_.N, cplx{});
        std::vector<double> h(grid_.N);
        for (std::size_t k = 0; k < coeffs.h.size(); ++k) {
            if (!coeffs.h[k]) continue;
            if (static_cast<int>(k) > m_) throw DomainError("h_k given for k > m");
            for (std::size_t i = 0; i < grid_.N; ++i) h[i] = coeffs.h[k](t, grid_.x(i), u[i]);
            const auto hh = forward(h, grid_).coeffs;
            const auto& d = deriv_[k];
            for (std::size_t j = 0; j < grid_.N; ++j) out[j] += d[j] * hh[j];
        }
        return out;
    }

    /// sum_i e^{i lambda y_i} f(t, y_i, u_i) dW_i, the noise forcing of one level.
    [[nodiscard]] std::vector<cplx> noise_forcing(std::span<const double> u, double t, const CoefficientSpec& coeffs,
                                                  std::span<const double> dW) const {
        if (!coeffs.f) return std::vector<cplx>(grid_.N, cplx{});
        std::vector<double> a(grid_.N);
        for (std::size_t i = 0; i < grid_.N; ++i) a[i] = coeffs.f(t, grid_.x(i), u[i]);
        return noise_increment(a, dW, grid_);
    }

private:
    GridSpec grid_;
    int m_;
    std::vector<cplx> psi_;
    std::vector<cplx> step_;
    std::vector<cplx> phi1_;
    std::vector<std::vector<cplx>> deriv_;
};

namespace detail {

inline void require_path(const PathState& path, const GridSpec& grid, std::size_t upto) {
    if (path.u.size() < upto + 1) throw ShapeError("path has fewer levels than requested");
    for (std::size_t n = 0; n <= upto && n < path.u.size(); ++n)
        if (path.u[n].size() != grid.N) throw ShapeError("path level length does not match grid");
}

inline void require_finite(std::span<const cplx> v, std::size_t level) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw InstabilityError("non-finite value at time level " + std::to_string(level));
}

}  // namespace detail

/// G(t) * u0.
inline Field apply_A0(std::span<const double> u0, double t, const FracParams& params, const GridSpec& grid) {
    if (t < 0.0) throw DomainError("apply_A0: t must be nonnegative");
    if (t == 0.0) return Field(u0.begin(), u0.end());
    auto c = forward(u0, grid).coeffs;
    const auto psi = symbol_multiplier(params.alpha, params.delta, grid);
    for (std::size_t j = 0; j < grid.N; ++j) c[j] *= std::exp(psi[j] * t);
    return inverse(c, grid);
}

/// k-th drift convolution at level n, summed directly over earlier levels.
inline Field apply_Ak(const PathState& path, int k, std::size_t n, const CoefficientSpec& coeffs,
                      const FracParams& params, const GridSpec& grid) {
    if (k < 0 || k > params.m) throw DomainError("apply_Ak: k must lie in [0, m]");
    detail::require_path(path, grid, n);
    const auto uk = static_cast<std::size_t>(k);
    if (uk >= coeffs.h.size() || !coeffs.h[uk]) return Field(grid.N, 0.0);
    const MildOperator op(params, grid);
    std::vector<cplx> acc(grid.N, cplx{});
    std::vector<double> h(grid.N);
    for (std::size_t l = 0; l < n; ++l) {
        const double tl = grid.time(l);
        for (std::size_t i = 0; i < grid.N; ++i) h[i] = coeffs.h[uk](tl, grid.x(i), path.u[l][i]);
        const auto hh = forward(h, grid).coeffs;
        const double lag = grid.time(n) - grid.time(l + 1);
        for (std::size_t j = 0; j < grid.N; ++j)
            acc[j] += std::exp(op.psi()[j] * lag) * op.phi1()[j] * op.derivative(k)[j] * hh[j];
    }
    return inverse(acc, grid);
}

/// Stochastic convolution at level n, summed directly over earlier levels.
inline Field apply_A_stoch(const PathState& path, std::size_t n, const CoefficientSpec& coeffs,
                           const FracParams& params, const GridSpec& grid, const SheetIncrements& sheet) {
    detail::require_path(path, grid, n);
    if (!(sheet.grid == grid)) throw DomainError("apply_A_stoch: sheet lives on a different grid");
    const MildOperator op(params, grid);
    std::vector<cplx> acc(grid.N, cplx{});
    for (std::size_t l = 0; l < n; ++l) {
        const auto xi = op.noise_forcing(path.u[l], grid.time(l), coeffs, sheet.row(l));
        const double lag = grid.time(n) - grid.time(l);
        for (std::size_t j = 0; j < grid.N; ++j) acc[j] += std::exp(op.psi()[j] * lag) * xi[j];
    }
    return inverse(acc, grid);
}

/// A applied to a whole path. The per-level sums are accumulated recursively:
///   V_0 = u0_hat,  V_{n+1} = e^{psi dt} (V_n + Xi_n) + phi1(psi) H_n,
/// which equals A_0 + sum_k A_k + A_stoch evaluated level by level.
inline PathState apply_A(const MildOperator& op, const PathState& path, std::span<const double> u0,
                         const CoefficientSpec& coeffs, const SheetIncrements& sheet) {
    const auto& grid = op.grid();
    detail::require_path(path, grid, grid.M);
    PathState out;
    out.u.reserve(grid.M + 1);
    out.u.emplace_back(u0.begin(), u0.end());
    auto V = forward(u0, grid).coeffs;
    for (std::size_t n = 0; n < grid.M; ++n) {
        const double t = grid.time(n);
        const auto H = op.drift_forcing(path.u[n], t, coeffs);
        const auto Xi = op.noise_forcing(path.u[n], t, coeffs, sheet.row(n));
        for (std::size_t j = 0; j < grid.N; ++j) V[j] = op.step()[j] * (V[j] + Xi[j]) + op.phi1()[j] * H[j];
        detail::require_finite(V, n + 1);
        out.u.push_back(inverse(V, grid));
    }
    return out;
}

inline double path_distance(const PathState& a, const PathState& b, const GridSpec& grid) {
    double d = 0.0;
    Field diff(grid.N);
    for (std::size_t n = 0; n < a.u.size(); ++n) {
        for (std::size_t i = 0; i < grid.N; ++i) diff[i] = a.u[n][i] - b.u[n][i];
        d = std::max(d, l2_norm(diff, grid));
    }
    return d;
}

inline PathState initial_path(std::span<const double> u0, const FracParams& params, const GridSpec& grid,
                              InitialGuess start) {
    PathState p;
    p.u.reserve(grid.M + 1);
    p.u.emplace_back(u0.begin(), u0.end());
    for (std::size_t n = 1; n <= grid.M; ++n)
        p.u.push_back(start == InitialGuess::zero ? Field(grid.N, 0.0) : apply_A0(u0, grid.time(n), params, grid));
    return p;
}

/// Picard iteration u <- A u from u^{(0)} until the sweep distance drops below tol.
inline PicardResult picard_solve(std::span<const double> u0, const CoefficientSpec& coeffs, const FracParams& params,
                                 const GridSpec& grid, const SheetIncrements& sheet, const PicardOptions& opts = {}) {
    if (!(params.alpha > 1.0)) throw DomainError("picard_solve: alpha must exceed 1");
    if (!(opts.tol > 0.0)) throw DomainError("picard_solve: tol must be positive");
    if (u0.size() != grid.N) throw ShapeError("picard_solve: u0 length does not match grid");
    if (!(sheet.grid == grid)) throw DomainError("picard_solve: sheet lives on a different grid");
    const MildOperator op(params, grid);
    PicardResult r{initial_path(u0, params, grid, opts.start), {}};
    for (int it = 0; it < opts.max_iter; ++it) {
        auto next = apply_A(op, r.path, u0, coeffs, sheet);
        const double d = path_distance(next, r.path, grid);
        r.path = std::move(next);
        r.diagnostics.distances.push_back(d);
        r.diagnostics.iterations = it + 1;
        if (d < opts.tol) {
            r.diagnostics.converged = true;
            break;
        }
    }
    return r;
}

/// max_n |u(t_n) - (A u)(t_n)|_2.
inline double fixed_point_residual(const PathState& path, std::span<const double> u0, const CoefficientSpec& coeffs,
                                   const FracParams& params, const GridSpec& grid, const SheetIncrements& sheet) {
    const MildOperator op(params, grid);
    return path_distance(apply_A(op, path, u0, coeffs, sheet), path, grid);
}

/// One-pass exponential time differencing with the same per-step weights as A.
inline PathState etd_march(std::span<const double> u0, const CoefficientSpec& coeffs, const FracParams& params,
                           const GridSpec& grid, const SheetIncrements& sheet) {
    if (u0.size() != grid.N) throw ShapeError("etd_march: u0 length does not match grid");
    if (!(sheet.grid == grid)) throw DomainError("etd_march: sheet lives on a different grid");
    const MildOperator op(params, grid);
    PathState out;
    out.u.reserve(grid.M + 1);
    out.u.emplace_back(u0.begin(), u0.end());
    auto V = forward(u0, grid).coeffs;
    for (std::size_t n = 0; n < grid.M; ++n) {
        const double t = grid.time(n);
        const auto H = op.drift_forcing(out.u[n], t, coeffs);
        const auto Xi = op.noise_forcing(out.u[n], t, coeffs, sheet.row(n));
        for (std::size_t j = 0; j < grid.N; ++j) V[j] = op.step()[j] * (V[j] + Xi[j]) + op.phi1()[j] * H[j];
        detail::require_finite(V, n + 1);
        out.u.push_back(inverse(V, grid));
    }
    return out;
}

}  // namespace fspde
