#pragma once

// Fourier conventions and the fractional derivative D^alpha_delta.
//
// Transform pair (continuous):  F f(lambda) = int e^{i x lambda} f(x) dx,
//                               F^{-1} g(x) = (1/2pi) int e^{-i x lambda} g(lambda) dlambda.
// Discrete version on x_i = -L + i dx, lambda_j = pi j / L:
//     coeffs_j = dx * sum_i e^{i lambda_j x_i} f_i
//     f_i      = (1/2L) * sum_j e^{-i lambda_j x_i} coeffs_j
// Coefficients are stored in FFT slot order (see GridSpec::mode).
//
// The Nyquist slot stands for both +lambda_N and -lambda_N, so every
// multiplier table stores the real part of its symbol there. All
// multiplier syntheses of real data are then exactly real.

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/fft.hpp"
#include "fspde/model_config.hpp"

namespace fspde {

using cplx = std::complex<double>;
using Field = std::vector<double>;

struct SpectralField {
    std::vector<cplx> coeffs;

    [[nodiscard]] std::size_t size() const { return coeffs.size(); }
};

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// psi_{alpha,delta}(lambda) = -|lambda|^alpha exp(-i delta (pi/2) sgn lambda).
inline cplx symbol(double lambda, double alpha, double delta) {
    if (lambda == 0.0) return {0.0, 0.0};
    const double mag = std::pow(std::fabs(lambda), alpha);
    const double phase = -delta * 0.5 * std::numbers::pi * sgn(lambda);
    return -mag * cplx(std::cos(phase), std::sin(phase));
}

namespace detail {

inline void require_length(std::size_t n, const GridSpec& grid, const char* what) {
    if (n != grid.N) throw ShapeError(std::string(what) + ": length " + std::to_string(n) +
                                      " does not match grid N = " + std::to_string(grid.N));
}

inline double parity(std::size_t k) { return (k & 1U) ? -1.0 : 1.0; }

}  // namespace detail

/// Multiplier table of a symbol sigma(lambda) on the grid, Nyquist slot symmetrized.
template <class Symbol>
std::vector<cplx> multiplier(const GridSpec& grid, Symbol&& sigma) {
    std::vector<cplx> out(grid.N);
    for (std::size_t k = 0; k < grid.N; ++k) out[k] = sigma(grid.lambda(k));
    out[grid.nyquist()] = {out[grid.nyquist()].real(), 0.0};
    return out;
}

inline std::vector<cplx> symbol_multiplier(double alpha, double delta, const GridSpec& grid) {
    require_admissible(alpha, delta);
    return multiplier(grid, [&](double lam) { return symbol(lam, alpha, delta); });
}

/// (-i lambda)^k, the multiplier of d^k/dx^k under this transform.
inline std::vector<cplx> derivative_multiplier(int order, const GridSpec& grid) {
    if (order < 0) throw DomainError("derivative order must be nonnegative");
    return multiplier(grid, [&](double lam) { return std::pow(cplx(0.0, -lam), order); });
}

/// psi_j and drift_j = sum_k c_k (-i lambda_j)^k on the grid.
class SymbolTable {
public:
    SymbolTable(const FracParams& params, const GridSpec& grid)
        : psi_(symbol_multiplier(params.alpha, params.delta, grid)), drift_(grid.N, cplx{}) {
        for (std::size_t k = 0; k < params.drift.size(); ++k) {
            if (params.drift[k] == 0.0) continue;
            const auto d = derivative_multiplier(static_cast<int>(k), grid);
            for (std::size_t j = 0; j < grid.N; ++j) drift_[j] += params.drift[k] * d[j];
        }
    }

    [[nodiscard]] const std::vector<cplx>& psi() const { return psi_; }
    [[nodiscard]] const std::vector<cplx>& drift() const { return drift_; }
    [[nodiscard]] cplx total(std::size_t k) const { return psi_[k] + drift_[k]; }
    [[nodiscard]] std::size_t size() const { return psi_.size(); }

private:
    std::vector<cplx> psi_;
    std::vector<cplx> drift_;
};

/// sum_i e^{i lambda_j x_i} v_i without the dx factor (used for noise sums).
inline std::vector<cplx> forward_sum(std::span<const double> values, const GridSpec& grid) {
    detail::require_length(values.size(), grid, "forward");
    std::vector<cplx> buf(values.begin(), values.end());
    std::vector<cplx> out(grid.N);
    fft::transform(buf, out, fft::Sign::plus);
    for (std::size_t k = 0; k < grid.N; ++k) out[k] *= detail::parity(k);
    return out;
}

inline SpectralField forward(std::span<const double> field, const GridSpec& grid) {
    auto c = forward_sum(field, grid);
    const double dx = grid.dx();
    for (auto& v : c) v *= dx;
    return {std::move(c)};
}

/// Full complex synthesis; the imaginary part measures Hermitian asymmetry.
inline std::vector<cplx> inverse_complex(std::span<const cplx> coeffs, const GridSpec& grid) {
    detail::require_length(coeffs.size(), grid, "inverse");
    std::vector<cplx> buf(grid.N);
    for (std::size_t k = 0; k < grid.N; ++k) buf[k] = coeffs[k] * detail::parity(k);
    std::vector<cplx> out(grid.N);
    fft::transform(buf, out, fft::Sign::minus);
    const double scale = 1.0 / (2.0 * grid.L);
    for (auto& v : out) v *= scale;
    return out;
}

inline Field inverse(std::span<const cplx> coeffs, const GridSpec& grid) {
    const auto z = inverse_complex(coeffs, grid);
    Field f(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) f[i] = z[i].real();
    return f;
}

inline Field inverse(const SpectralField& sf, const GridSpec& grid) { return inverse(sf.coeffs, grid); }

inline Field apply_multiplier(std::span<const double> field, std::span<const cplx> mult, const GridSpec& grid) {
    detail::require_length(mult.size(), grid, "multiplier");
    auto c = forward(field, grid);
    for (std::size_t k = 0; k < grid.N; ++k) c.coeffs[k] *= mult[k];
    return inverse(c, grid);
}

/// D^alpha_delta f = F^{-1}(psi_{alpha,delta} F f).
inline Field frac_derivative(std::span<const double> field, double alpha, double delta, const GridSpec& grid) {
    return apply_multiplier(field, symbol_multiplier(alpha, delta, grid), grid);
}

inline Field derivative(std::span<const double> field, int order, const GridSpec& grid) {
    if (order == 0) return Field(field.begin(), field.end());
    return apply_multiplier(field, derivative_multiplier(order, grid), grid);
}

/// <f, g> = dx * sum_i f_i g_i.
inline double inner(std::span<const double> f, std::span<const double> g, const GridSpec& grid) {
    detail::require_length(f.size(), grid, "inner");
    detail::require_length(g.size(), grid, "inner");
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
    return s * grid.dx();
}

inline double l2_norm(std::span<const double> f, const GridSpec& grid) { return std::sqrt(inner(f, f, grid)); }

/// Spectral-side inner product (1/2L) sum_j a_j conj(b_j); equals <f, g> by discrete Parseval.
inline cplx spectral_inner(std::span<const cplx> a, std::span<const cplx> b, const GridSpec& grid) {
    cplx s{};
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::conj(b[k]);
    return s / (2.0 * grid.L);
}

/// |<D^alpha_delta f, g> - <f, D^alpha_{-delta} g>|.
inline double adjoint_check(std::span<const double> f, std::span<const double> g, double alpha, double delta,
                            const GridSpec& grid) {
    const auto df = frac_derivative(f, alpha, delta, grid);
    const auto dg = frac_derivative(g, alpha, -delta, grid);
    return std::fabs(inner(df, g, grid) - inner(f, dg, grid));
}

/// Converts samples to a real field, rejecting values with a nonzero imaginary part.
inline Field require_real(std::span<const cplx> values, double tol = 1e-12) {
    Field out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (std::fabs(values[i].imag()) > tol) throw DomainError("field is not real-valued");
        out[i] = values[i].real();
    }
    return out;
}

inline double adjoint_check(std::span<const cplx> f, std::span<const cplx> g, double alpha, double delta,
                            const GridSpec& grid) {
    return adjoint_check(require_real(f), require_real(g), alpha, delta, grid);
}

}  // namespace fspde
