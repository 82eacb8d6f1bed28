#pragma once

// Space-time white noise on the grid: cellwise Brownian-sheet increments and
// their per-mode spectral sums.
//
// Cell i covers [x_i, x_{i+1}] x [t_n, t_{n+1}]. Cells left of the origin
// (i < N/2) and right of it (i >= N/2) draw from disjoint RNG substreams, so
// W is the union of two independent Brownian sheets glued at x = 0.
//
// Dump format (little-endian): 8-byte magic "FSPDEWN1", f64 L, u64 N, f64 T,
// u64 M, u64 seed, u64 stream, then M*N f64 increments in row-major order
// (time level major).

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/model_config.hpp"

namespace fspde {

namespace rng {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Key of one independent substream (one side of one sample path).
constexpr std::uint64_t substream_key(std::uint64_t seed, std::uint64_t stream, std::uint64_t side) {
    return mix(mix(seed) ^ mix(2 * stream + side + 0x5851f42d4c957f2dULL));
}

constexpr std::uint64_t counter_bits(std::uint64_t key, std::uint64_t level, std::uint64_t cell, std::uint64_t word) {
    return mix(key ^ mix(level ^ mix(2 * cell + word)));
}

/// Standard normal at counter (level, cell) of a substream, by Box-Muller.
/// Cells 2q and 2q+1 share one uniform pair and take its cosine and sine branch.
inline std::pair<double, double> normal_pair(std::uint64_t key, std::uint64_t level, std::uint64_t pair) {
    constexpr double scale = 0x1.0p-53;
    const double u1 = static_cast<double>((counter_bits(key, level, pair, 0) >> 11) + 1) * scale;  // (0, 1]
    const double u2 = static_cast<double>(counter_bits(key, level, pair, 1) >> 11) * scale;        // [0, 1)
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(a), r * std::sin(a)};
}

inline double standard_normal(std::uint64_t key, std::uint64_t level, std::uint64_t cell) {
    const auto [c, s] = normal_pair(key, level, cell >> 1);
    return (cell & 1U) ? s : c;
}

}  // namespace rng

struct NoiseRef {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    friend bool operator==(const NoiseRef&, const NoiseRef&) = default;
};

/// dW[n][i] ~ Normal(0, dt dx), independent over cells and levels.
struct SheetIncrements {
    GridSpec grid;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::vector<double> dW;  // M x N, row-major

    [[nodiscard]] double operator()(std::size_t n, std::size_t i) const { return dW[n * grid.N + i]; }
    [[nodiscard]] std::span<const double> row(std::size_t n) const {
        return std::span<const double>(dW).subspan(n * grid.N, grid.N);
    }
    [[nodiscard]] NoiseRef ref() const { return {seed, stream}; }
};

inline SheetIncrements sample_sheet(const GridSpec& grid, std::uint64_t seed, std::uint64_t stream) {
    SheetIncrements s{grid, seed, stream, std::vector<double>(grid.M * grid.N)};
    const double sd = std::sqrt(grid.dt() * grid.dx());
    const std::size_t half = grid.N / 2;
    const std::uint64_t left = rng::substream_key(seed, stream, 0);
    const std::uint64_t right = rng::substream_key(seed, stream, 1);
    for (std::size_t n = 0; n < grid.M; ++n) {
        double* row = s.dW.data() + n * grid.N;
        // cells are counted outward from the origin on each side
        for (std::size_t c = 0; c < half; c += 2) {
            const auto [a, b] = rng::normal_pair(left, n, c >> 1);
            row[half - 1 - c] = sd * a;
            if (c + 1 < half) row[half - 2 - c] = sd * b;
        }
        for (std::size_t c = 0; c < grid.N - half; c += 2) {
            const auto [a, b] = rng::normal_pair(right, n, c >> 1);
            row[half + c] = sd * a;
            if (half + c + 1 < grid.N) row[half + c + 1] = sd * b;
        }
    }
    return s;
}

inline SheetIncrements zero_sheet(const GridSpec& grid) {
    return {grid, 0, 0, std::vector<double>(grid.M * grid.N, 0.0)};
}

inline SheetIncrements scaled(SheetIncrements sheet, double factor) {
    for (auto& v : sheet.dW) v *= factor;
    return sheet;
}

namespace detail {

inline std::size_t grid_index(double value, double step, std::size_t max_index, const char* what) {
    const double r = value / step;
    const double k = std::round(r);
    if (std::fabs(r - k) > 1e-9 * std::max(1.0, std::fabs(r)) || k < 0.0 || k > static_cast<double>(max_index))
        throw DomainError(std::string("cumulate: ") + what + " is not a grid point");
    return static_cast<std::size_t>(k);
}

}  // namespace detail

/// W(t, x): sum of increments over [0, t] x [0, x] (signed rectangle toward the origin).
inline double cumulate(const SheetIncrements& sheet, double t, double x) {
    const auto& g = sheet.grid;
    const std::size_t levels = detail::grid_index(t, g.dt(), g.M, "t");
    const std::size_t node = detail::grid_index(x + g.L, g.dx(), g.N, "x");
    const std::size_t origin = g.N / 2;
    const std::size_t lo = std::min(node, origin), hi = std::max(node, origin);
    double s = 0.0;
    for (std::size_t n = 0; n < levels; ++n)
        for (std::size_t i = lo; i < hi; ++i) s += sheet(n, i);
    return s;
}

/// dEta[n][j] = sum_i e^{i lambda_j y_i} dW[n][i], no dx factor.
struct SpectralNoise {
    std::size_t M = 0;
    std::size_t N = 0;
    std::vector<cplx> dEta;

    [[nodiscard]] std::span<const cplx> row(std::size_t n) const {
        return std::span<const cplx>(dEta).subspan(n * N, N);
    }
};

inline SpectralNoise to_spectral(const SheetIncrements& sheet) {
    const auto& g = sheet.grid;
    SpectralNoise out{g.M, g.N, std::vector<cplx>(g.M * g.N)};
    for (std::size_t n = 0; n < g.M; ++n) {
        const auto row = forward_sum(sheet.row(n), g);
        std::copy(row.begin(), row.end(), out.dEta.begin() + static_cast<std::ptrdiff_t>(n * g.N));
    }
    return out;
}

/// Coarse increments as sums of fine ones over nested cells.
inline SheetIncrements aggregate(const SheetIncrements& fine, const GridSpec& coarse) {
    const auto& f = fine.grid;
    if (coarse.L != f.L || coarse.T != f.T || coarse.N == 0 || coarse.M == 0 || f.N % coarse.N != 0 ||
        f.M % coarse.M != 0)
        throw DomainError("aggregate: grids are not nested");
    const std::size_t rs = f.N / coarse.N, rt = f.M / coarse.M;
    SheetIncrements out{coarse, fine.seed, fine.stream, std::vector<double>(coarse.M * coarse.N, 0.0)};
    for (std::size_t n = 0; n < f.M; ++n)
        for (std::size_t i = 0; i < f.N; ++i) out.dW[(n / rt) * coarse.N + i / rs] += fine(n, i);
    return out;
}

namespace detail {

inline void put_u64(std::ostream& os, std::uint64_t v) {
    char b[8];
    for (int k = 0; k < 8; ++k) b[k] = static_cast<char>((v >> (8 * k)) & 0xFFU);
    os.write(b, 8);
}

inline std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ConfigError("noise dump: truncated file");
    std::uint64_t v = 0;
    for (int k = 0; k < 8; ++k) v |= static_cast<std::uint64_t>(b[k]) << (8 * k);
    return v;
}

inline void put_f64(std::ostream& os, double v) { put_u64(os, std::bit_cast<std::uint64_t>(v)); }
inline double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

constexpr char noise_magic[9] = "FSPDEWN1";

}  // namespace detail

inline void write_noise_dump(const SheetIncrements& sheet, std::ostream& os) {
    os.write(detail::noise_magic, 8);
    detail::put_f64(os, sheet.grid.L);
    detail::put_u64(os, sheet.grid.N);
    detail::put_f64(os, sheet.grid.T);
    detail::put_u64(os, sheet.grid.M);
    detail::put_u64(os, sheet.seed);
    detail::put_u64(os, sheet.stream);
    for (double v : sheet.dW) detail::put_f64(os, v);
}

inline SheetIncrements read_noise_dump(std::istream& is) {
    char magic[8];
    if (!is.read(magic, 8) || std::string(magic, 8) != std::string(detail::noise_magic, 8))
        throw ConfigError("noise dump: bad magic");
    SheetIncrements s;
    s.grid.L = detail::get_f64(is);
    s.grid.N = detail::get_u64(is);
    s.grid.T = detail::get_f64(is);
    s.grid.M = detail::get_u64(is);
    s.seed = detail::get_u64(is);
    s.stream = detail::get_u64(is);
    s.dW.resize(s.grid.M * s.grid.N);
    for (auto& v : s.dW) v = detail::get_f64(is);
    return s;
}

inline void write_noise_dump(const SheetIncrements& sheet, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot open " + path + " for writing");
    write_noise_dump(sheet, os);
}

inline SheetIncrements read_noise_dump(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open " + path);
    return read_noise_dump(is);
}

}  // namespace fspde
