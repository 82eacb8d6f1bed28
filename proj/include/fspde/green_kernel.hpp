#pragma once

// Green function G(t, .) = F^{-1} exp(psi t) of D^alpha_delta, its spatial
// derivatives, and numerical checks of its structural properties.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"
#include "fspde/numerics.hpp"

namespace fspde {

/// Samples of d^k/dx^k G(t, x_i) on a grid.
struct KernelSample {
    double t = 0.0;
    int k = 0;
    Field values;
    FracParams params;
    GridSpec grid;
};

/// Smallest t for which the Nyquist factor exp(Re psi_max t) drops below 1e-3.
/// Below it the kernel is a near-delta that the grid cannot resolve.
inline double min_resolved_time(const FracParams& params, const GridSpec& grid) {
    const double decay = -symbol_multiplier(params.alpha, params.delta, grid)[grid.nyquist()].real();
    if (!(decay > 0.0)) return std::numeric_limits<double>::infinity();
    return std::log(1e3) / decay;
}

/// (-i lambda)^k exp(psi t) on the grid.
inline std::vector<cplx> kernel_spectrum(double t, int k, const FracParams& params, const GridSpec& grid) {
    auto psi = symbol_multiplier(params.alpha, params.delta, grid);
    const auto dk = derivative_multiplier(k, grid);
    for (std::size_t j = 0; j < grid.N; ++j) psi[j] = dk[j] * std::exp(psi[j] * t);
    return psi;
}

inline KernelSample kernel(double t, int k, const FracParams& params, const GridSpec& grid) {
    if (!(t > 0.0)) throw DomainError("kernel: t must be positive");
    if (k < 0) throw DomainError("kernel: derivative order must be nonnegative");
    const double t_min = min_resolved_time(params, grid);
    if (t < t_min)
        throw DomainError("kernel: t = " + std::to_string(t) + " below resolved minimum " + std::to_string(t_min));
    return {t, k, inverse(kernel_spectrum(t, k, params, grid), grid), params, grid};
}

/// Trigonometric interpolant of the kernel at an arbitrary point.
inline double kernel_at(double t, int k, double x, const FracParams& params, const GridSpec& grid) {
    const auto spec = kernel_spectrum(t, k, params, grid);
    double s = 0.0;
    for (std::size_t j = 0; j < grid.N; ++j) {
        const double a = -grid.lambda(j) * x;
        s += (spec[j] * cplx(std::cos(a), std::sin(a))).real();
    }
    return s / (2.0 * grid.L);
}

/// Free-space heat kernel, the alpha = 2, delta = 0 case.
inline double gaussian_kernel(double t, double x) {
    return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t);
}

/// Free-space Cauchy kernel, the alpha = 1, delta = 0 case.
inline double cauchy_kernel(double t, double x) { return t / (std::numbers::pi * (t * t + x * x)); }

/// Heat kernel summed over the images x + 2Lm.
inline double periodic_gaussian_kernel(double t, double x, double L) {
    double s = 0.0;
    const int reach = 2 + static_cast<int>(std::ceil(12.0 * std::sqrt(t) / L));
    for (int m = -reach; m <= reach; ++m) s += gaussian_kernel(t, x + 2.0 * L * m);
    return s;
}

/// Cauchy kernel summed over all images (Poisson kernel of the circle).
inline double periodic_cauchy_kernel(double t, double x, double L) {
    const double a = std::numbers::pi * t / L;
    const double b = std::numbers::pi * x / L;
    return std::sinh(a) / (2.0 * L * (std::cosh(a) - std::cos(b)));
}

/// Analytic torus kernel when one exists (alpha in {1, 2}, delta = 0, k = 0).
inline bool has_analytic_kernel(const FracParams& p) {
    return p.delta == 0.0 && (p.alpha == 1.0 || p.alpha == 2.0);
}

inline double analytic_kernel(double t, double x, const FracParams& p, const GridSpec& grid) {
    if (!has_analytic_kernel(p)) throw DomainError("no closed-form kernel for these parameters");
    return p.alpha == 2.0 ? periodic_gaussian_kernel(t, x, grid.L) : periodic_cauchy_kernel(t, x, grid.L);
}

/// n-term large-|x| expansion of d^l/dx^l G(1, x):
///   (1/pi) sum_j |x|^{-alpha j-(l+1)} (-1)^{j+l+1}/j! Gamma(alpha j+l+1) sin(j (alpha+delta) pi/2)
/// for x > 0; x < 0 follows from G_delta(-x) = G_{-delta}(x).
inline double tail_series(double x, int l, int n, const FracParams& params) {
    if (x == 0.0) throw DomainError("tail_series: x must be nonzero");
    if (n < 1) throw DomainError("tail_series: need at least one term");
    if (l < 0) throw DomainError("tail_series: derivative order must be nonnegative");
    const double delta = x > 0.0 ? params.delta : -params.delta;
    const double reflect = (x < 0.0 && (l & 1)) ? -1.0 : 1.0;
    const double ax = std::fabs(x);
    const double a = params.alpha;
    double s = 0.0;
    for (int j = 1; j <= n; ++j) {
        const double sign = ((j + l + 1) % 2 == 0) ? 1.0 : -1.0;
        s += std::pow(ax, -a * j - (l + 1)) * sign / std::tgamma(j + 1.0) * std::tgamma(a * j + l + 1.0) *
             std::sin(j * (a + delta) * std::numbers::pi / 2.0);
    }
    return reflect * s / std::numbers::pi;
}

/// max_i |G(t+s, x_i) - dx sum_xi G(t, xi) G(s, x_i - xi)|, convolution by direct periodic summation.
inline double check_semigroup(double t, double s, const FracParams& params, const GridSpec& grid) {
    if (!(t > 0.0) || !(s > 0.0)) throw DomainError("check_semigroup: t and s must be positive");
    const auto gt = kernel(t, 0, params, grid).values;
    const auto gs = kernel(s, 0, params, grid).values;
    const auto gts = kernel(t + s, 0, params, grid).values;
    const std::size_t N = grid.N;
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (std::size_t q = 0; q < N; ++q) {
            // node of x_i - xi_q on the torus: index (i - q + N/2) mod N
            const std::size_t idx = (i + N + N / 2 - q) % N;
            acc += gt[q] * gs[idx];
        }
        err = std::max(err, std::fabs(gts[i] - grid.dx() * acc));
    }
    return err;
}

/// max_i |d^l G(t, x_i) - t^{-(l+1)/alpha} d^l G(1, t^{-1/alpha} x_i)|.
/// The right side lives on the torus rescaled by t^{-1/alpha}, where
/// the node t^{-1/alpha} x_i is again node i.
inline double check_scaling(double t, int l, const FracParams& params, const GridSpec& grid) {
    if (!(t > 0.0)) throw DomainError("check_scaling: t must be positive");
    const auto lhs = kernel(t, l, params, grid).values;
    GridSpec scaled = grid;
    scaled.L = grid.L * std::pow(t, -1.0 / params.alpha);
    const auto rhs = kernel(1.0, l, params, scaled).values;
    const double factor = std::pow(t, -(l + 1.0) / params.alpha);
    double err = 0.0;
    for (std::size_t i = 0; i < grid.N; ++i) err = std::max(err, std::fabs(lhs[i] - factor * rhs[i]));
    return err;
}

struct PositivityResult {
    double min_value = 0.0;
    bool is_density = false;
};

inline PositivityResult check_positivity(double t, const FracParams& params, const GridSpec& grid,
                                         double tol_pos = 1e-9) {
    const auto g = kernel(t, 0, params, grid).values;
    const double mn = *std::min_element(g.begin(), g.end());
    return {mn, mn >= -tol_pos};
}

/// Exponent (1 - (k+1) gamma) / (alpha gamma) of t in |d^k G(t, .)|_gamma.
inline double norm_exponent(double alpha, double gamma, int k) {
    if (!(gamma > 1.0 / (alpha + k + 1.0))) throw DomainError("norm_exponent: gamma must exceed 1/(alpha+k+1)");
    return (1.0 - (k + 1.0) * gamma) / (alpha * gamma);
}

/// (dx sum |v_i|^gamma)^{1/gamma}.
inline double lgamma_norm(std::span<const double> v, double gamma, const GridSpec& grid) {
    double s = 0.0;
    for (double x : v) s += std::pow(std::fabs(x), gamma);
    return std::pow(grid.dx() * s, 1.0 / gamma);
}

/// Log-log regression slope of t -> |d^k G(t, .)|_gamma over t_list.
inline double measure_norm_slope(double gamma, int k, const FracParams& params, const GridSpec& grid,
                                 std::span<const double> t_list) {
    norm_exponent(params.alpha, gamma, k);
    if (t_list.size() < 2) throw DomainError("measure_norm_slope: need at least two times");
    const auto [lo, hi] = std::minmax_element(t_list.begin(), t_list.end());
    if (*hi < 4.0 * *lo) throw DomainError("measure_norm_slope: times must span a factor of 4");
    std::vector<double> norms;
    for (double t : t_list) norms.push_back(lgamma_norm(kernel(t, k, params, grid).values, gamma, grid));
    return loglog_slope(t_list, norms);
}

}  // namespace fspde
