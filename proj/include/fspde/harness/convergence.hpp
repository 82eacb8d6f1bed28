#pragma once

// Pathwise self-convergence under grid refinement. The finest sheet is
// sampled once and summed down to every coarser level, so all levels see the
// same Brownian path.

#include <cmath>
#include <cstdint>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/harness/model.hpp"
#include "fspde/noise.hpp"
#include "fspde/numerics.hpp"

namespace fspde {

struct ConvergenceReport {
    std::vector<GridSpec> levels;
    std::vector<double> differences;  // |u_l(T) - u_{l+1}(T)|_2 on the coarser grid
    std::vector<double> orders;       // log2 ratios of consecutive differences
};

/// Level l has M * 2^l steps and N * 2^l (space-time) or N (time) nodes.
inline std::vector<GridSpec> refinement_levels(const GridSpec& base, std::size_t levels, Refinement refine) {
    std::vector<GridSpec> out;
    GridSpec g = base;
    for (std::size_t l = 0; l < levels; ++l) {
        out.push_back(g);
        g.M *= 2;
        if (refine == Refinement::space_time) g.N *= 2;
    }
    return out;
}

/// Restriction of a fine field to the nodes of a coarser nested grid.
inline Field restrict_to(std::span<const double> fine, const GridSpec& fine_grid, const GridSpec& coarse) {
    if (fine_grid.N % coarse.N != 0 || fine_grid.L != coarse.L)
        throw DomainError("restrict_to: grids are not nested");
    const std::size_t r = fine_grid.N / coarse.N;
    Field out(coarse.N);
    for (std::size_t i = 0; i < coarse.N; ++i) out[i] = fine[i * r];
    return out;
}

inline ConvergenceReport convergence_study(const RunConfig& cfg, std::span<const GridSpec> levels) {
    if (levels.size() < 3) throw DomainError("convergence_study: need at least 3 levels");
    for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
        const auto& a = levels[l];
        const auto& b = levels[l + 1];
        if (a.L != b.L || a.T != b.T || b.N % a.N != 0 || b.M % a.M != 0 || (a.N == b.N && a.M == b.M))
            throw DomainError("convergence_study: levels are not strictly nested");
    }
    const auto fine = sample_sheet(levels.back(), cfg.seed, cfg.stream);
    const PicardOptions popts{cfg.tol, cfg.max_iter, InitialGuess::semigroup};
    ConvergenceReport r{{levels.begin(), levels.end()}, {}, {}};
    Field prev;
    for (std::size_t l = 0; l < levels.size(); ++l) {
        const auto& g = levels[l];
        const auto sheet = l + 1 == levels.size() ? fine : aggregate(fine, g);
        const auto sol = solve_path(model_on(cfg, g), g, sheet, popts);
        if (!sol.converged) throw InstabilityError("convergence_study: Picard did not converge at level " + std::to_string(l));
        const auto& uT = sol.states.back();
        if (l > 0) {
            const auto& coarse = levels[l - 1];
            const auto fine_on_coarse = restrict_to(uT, g, coarse);
            Field d(coarse.N);
            for (std::size_t i = 0; i < coarse.N; ++i) d[i] = fine_on_coarse[i] - prev[i];
            r.differences.push_back(l2_norm(d, coarse));
        }
        prev = uT;
    }
    r.orders = observed_orders(r.differences);
    return r;
}

inline ConvergenceReport convergence_study(const RunConfig& cfg, std::size_t levels) {
    const auto grids = refinement_levels(cfg.grid, levels, cfg.refine);
    return convergence_study(cfg, grids);
}

}  // namespace fspde
