#pragma once

// Monte Carlo estimates of E|u(t)|_2^p, p in {2, 4}. Path p uses noise stream
// p of the base seed, so the estimate does not depend on which thread ran
// which path: per-path results are stored by index and reduced in index order.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/harness/model.hpp"
#include "fspde/noise.hpp"
#include "fspde/numerics.hpp"

namespace fspde {

struct MomentReport {
    std::vector<double> times;
    std::vector<double> m2, se2;  // E|u(t)|_2^2 and its standard error
    std::vector<double> m4, se4;  // E|u(t)|_2^4
    std::size_t n_paths = 0;      // paths that entered the estimate
    std::size_t excluded = 0;     // paths dropped for non-convergence
    std::vector<std::size_t> excluded_streams;
    double sup_m2 = 0.0;
    double sup_m4 = 0.0;
};

/// Worker count: FSPDE_THREADS if set and positive, else the hardware concurrency.
inline std::size_t thread_cap() {
    std::size_t hw = std::max(1U, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FSPDE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return hw;
}

/// Runs body(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
    threads = std::max<std::size_t>(1, std::min(threads, count));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(mu);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct McOptions {
    std::size_t threads = 0;              // 0 means thread_cap()
    std::optional<GridSpec> noise_grid;   // sample here and aggregate down, to couple runs across grids
    std::size_t min_paths = 100;
};

inline MomentReport run_mc(const RunConfig& cfg, std::size_t n_paths, std::uint64_t base_seed,
                           const McOptions& opts = {}) {
    if (n_paths < opts.min_paths)
        throw DomainError("run_mc: need at least " + std::to_string(opts.min_paths) + " paths");
    const auto& grid = cfg.grid;
    const Model model = build_model(cfg);
    const PicardOptions popts{cfg.tol, cfg.max_iter, InitialGuess::semigroup};

    struct PathNorms {
        std::vector<double> n2;
        bool ok = true;
    };
    std::vector<PathNorms> per_path(n_paths);
    parallel_for(n_paths, opts.threads ? opts.threads : thread_cap(), [&](std::size_t p) {
        const auto sheet = opts.noise_grid ? aggregate(sample_sheet(*opts.noise_grid, base_seed, p), grid)
                                           : sample_sheet(grid, base_seed, p);
        PathSolution sol;
        try {
            sol = solve_path(model, grid, sheet, popts);
        } catch (const InstabilityError&) {
            sol.converged = false;
        }
        auto& out = per_path[p];
        out.ok = sol.converged;
        if (!out.ok) return;
        out.n2.reserve(grid.M + 1);
        for (const auto& u : sol.states) {
            const double n = l2_norm(u, grid);
            out.n2.push_back(n * n);
        }
    });

    MomentReport r;
    for (std::size_t n = 0; n <= grid.M; ++n) r.times.push_back(grid.time(n));
    std::vector<RunningStats> s2(grid.M + 1), s4(grid.M + 1);
    for (std::size_t p = 0; p < n_paths; ++p) {
        if (!per_path[p].ok) {
            ++r.excluded;
            r.excluded_streams.push_back(p);
            continue;
        }
        ++r.n_paths;
        for (std::size_t n = 0; n <= grid.M; ++n) {
            s2[n].add(per_path[p].n2[n]);
            s4[n].add(per_path[p].n2[n] * per_path[p].n2[n]);
        }
    }
    for (std::size_t n = 0; n <= grid.M; ++n) {
        r.m2.push_back(s2[n].mean());
        r.se2.push_back(s2[n].std_error());
        r.m4.push_back(s4[n].mean());
        r.se4.push_back(s4[n].std_error());
    }
    if (r.n_paths > 0) {
        r.sup_m2 = *std::max_element(r.m2.begin(), r.m2.end());
        r.sup_m4 = *std::max_element(r.m4.begin(), r.m4.end());
    }
    return r;
}

}  // namespace fspde
