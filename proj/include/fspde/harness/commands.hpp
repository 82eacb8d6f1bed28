#pragma once

// The CLI subcommands as library calls. Each writes its CSV files (and the
// noise dump where a single path is simulated) into `out` and returns the
// paths it wrote.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/green_kernel.hpp"
#include "fspde/harness/convergence.hpp"
#include "fspde/harness/csv.hpp"
#include "fspde/harness/model.hpp"
#include "fspde/harness/monte_carlo.hpp"
#include "fspde/mild_solver.hpp"
#include "fspde/noise.hpp"
#include "fspde/spectral_solver.hpp"
#include "fspde/weak_verifier.hpp"

namespace fspde {

namespace detail {

inline std::string out_path(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / name).string();
}

inline std::size_t level_of(double t, const GridSpec& g) {
    return static_cast<std::size_t>(std::llround(t / g.dt()));
}

inline std::vector<double> output_times(const RunConfig& c) {
    return c.t_out.empty() ? std::vector<double>{c.grid.T} : c.t_out;
}

inline void write_fields(const std::string& path, const std::vector<Field>& states, const RunConfig& c) {
    CsvWriter w(path, {"t", "x", "u"});
    for (double t : output_times(c)) {
        const auto n = level_of(t, c.grid);
        for (std::size_t i = 0; i < c.grid.N; ++i) w.row({c.grid.time(n), c.grid.x(i), states[n][i]});
    }
}

}  // namespace detail

/// d^k G(kernel_t, x_i) with the closed-form torus kernel and the 1-term tail expansion alongside.
inline std::vector<std::string> command_kernel(const RunConfig& c, const std::string& out) {
    const double t = c.kernel_t;
    const int k = c.kernel_k;
    const auto g = kernel(t, k, c.params, c.grid);
    const bool analytic = k == 0 && has_analytic_kernel(c.params);
    const double nan = std::nan("");
    const auto path = detail::out_path(out, "kernel.csv");
    CsvWriter w(path, {"x", "G", "analytic_oracle", "tail_series"});
    const double s = std::pow(t, -1.0 / c.params.alpha);
    for (std::size_t i = 0; i < c.grid.N; ++i) {
        const double x = c.grid.x(i);
        const double oracle = analytic ? analytic_kernel(t, x, c.params, c.grid) : nan;
        const double tail = x != 0.0 ? std::pow(s, k + 1.0) * tail_series(s * x, k, 1, c.params) : nan;
        w.row({x, g.values[i], oracle, tail});
    }
    return {path};
}

/// Fields at the output times, per-mode |u_j(T)|^2 against its exact expectation, and the noise dump.
inline std::vector<std::string> command_simulate_linear(const RunConfig& c, const std::string& out) {
    if (c.model != ModelKind::linear) throw ConfigError("simulate-linear needs model = linear");
    const auto model = build_model(c);
    const auto sheet = sample_sheet(c.grid, c.seed, c.stream);
    const auto traj = evolve_linear(model.linear, c.grid, sheet);

    const auto fields = detail::out_path(out, "fields.csv");
    detail::write_fields(fields, traj.states, c);

    const auto modes = detail::out_path(out, "modes.csv");
    CsvWriter w(modes, {"mode", "lambda", "abs2", "expected", "expected_discrete"});
    const SymbolTable table(model.linear.params, c.grid);
    const double amp = parse_f(c.f).a;
    const auto& u0 = traj.spectral_states.front();
    const auto& uT = traj.spectral_states.back();
    for (std::size_t j = 0; j <= c.grid.N / 2; ++j) {
        const cplx z = table.total(j);
        const double det = std::norm(std::exp(z * c.grid.T) * u0[j]);
        w.row({as_int(j), c.grid.lambda(j), std::norm(uT[j]),
               det + amp * amp * ito_mode_variance(z, c.grid.T, c.grid.L),
               det + amp * amp * discrete_mode_variance(z, c.grid.M, c.grid.dt(), c.grid.L)});
    }

    const auto dump = detail::out_path(out, "noise.bin");
    write_noise_dump(sheet, dump);
    return {fields, modes, dump};
}

/// Picard solution of one path, its sweep distances, optionally the distance to the ETD march.
inline std::vector<std::string> command_simulate_mild(const RunConfig& c, const std::string& out) {
    const auto model = build_model(c);
    const auto sheet = sample_sheet(c.grid, c.seed, c.stream);
    const auto r = picard_solve(model.u0, model.coeffs, c.params, c.grid, sheet, {c.tol, c.max_iter});

    const auto traj = detail::out_path(out, "trajectory.csv");
    detail::write_fields(traj, r.path.u, c);

    const auto diag = detail::out_path(out, "diagnostics.csv");
    {
        CsvWriter w(diag, {"iteration", "distance", "converged"});
        for (std::size_t i = 0; i < r.diagnostics.distances.size(); ++i)
            w.row({as_int(i + 1), r.diagnostics.distances[i], as_int(r.diagnostics.distances[i] < c.tol ? 1 : 0)});
    }
    std::vector<std::string> written{traj, diag};
    if (c.oracle == "etd") {
        const auto ref = etd_march(model.u0, model.coeffs, c.params, c.grid, sheet);
        const auto path = detail::out_path(out, "oracle.csv");
        CsvWriter w(path, {"t", "rel_l2_vs_etd"});
        for (std::size_t n = 0; n <= c.grid.M; ++n) {
            Field d(c.grid.N);
            for (std::size_t i = 0; i < c.grid.N; ++i) d[i] = r.path.u[n][i] - ref.u[n][i];
            const double scale = l2_norm(ref.u[n], c.grid);
            w.row({c.grid.time(n), scale > 0.0 ? l2_norm(d, c.grid) / scale : l2_norm(d, c.grid)});
        }
        written.push_back(path);
    }
    const auto dump = detail::out_path(out, "noise.bin");
    write_noise_dump(sheet, dump);
    written.push_back(dump);
    return written;
}

/// Weak-form residuals of the computed path on the bump battery, per refinement level.
inline std::vector<std::string> command_verify(const RunConfig& c, const std::string& out) {
    const auto grids = refinement_levels(c.grid, std::max<std::size_t>(c.levels, 1), c.refine);
    const auto fine = sample_sheet(grids.back(), c.seed, c.stream);
    const PicardOptions popts{c.tol, c.max_iter};
    const auto path = detail::out_path(out, "verify.csv");
    CsvWriter w(path, {"phi_id", "t", "residual_first", "residual_second", "level"});
    for (std::size_t l = 0; l < grids.size(); ++l) {
        const auto& g = grids[l];
        const auto sheet = l + 1 == grids.size() ? fine : aggregate(fine, g);
        const auto model = model_on(c, g);
        const auto sol = solve_path(model, g, sheet, popts);
        const auto battery = bump_battery(c.params, g);
        for (std::size_t b = 0; b < battery.size(); ++b)
            for (double t : detail::output_times(c)) {
                const auto n = detail::level_of(t, g);
                const double r1 = weak_residual_first(sol.states, sheet, battery[b], n, model.coeffs, c.params, g);
                const auto dual = dual_test_function(battery[b], n, c.params, g);
                const double r2 = weak_residual_second(sol.states, sheet, dual, model.coeffs, c.params, g);
                w.row({as_int(b), g.time(n), r1, r2, as_int(l)});
            }
    }
    return {path};
}

inline std::vector<std::string> command_mc(const RunConfig& c, const std::string& out, std::size_t threads = 0) {
    const auto r = run_mc(c, c.paths, c.seed, {threads, std::nullopt});
    const auto moments = detail::out_path(out, "moments.csv");
    emit_csv(r, moments);
    const auto summary = detail::out_path(out, "summary.csv");
    emit_summary_csv(r, summary);
    return {moments, summary};
}

inline std::vector<std::string> command_converge(const RunConfig& c, const std::string& out) {
    const auto r = convergence_study(c, c.levels);
    const auto path = detail::out_path(out, "convergence.csv");
    emit_csv(r, path);
    return {path};
}

}  // namespace fspde
