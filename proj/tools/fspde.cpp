// fspde: command-line front end.
//
//   fspde kernel|simulate-linear|simulate-mild|verify|mc|converge --config FILE [--seed U64] [--out DIR]
//
// FSPDE_THREADS caps the number of worker threads used by `mc`.

#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fspde/fspde.hpp"

namespace {

struct CommonArgs {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out = "out";
};

void add_common(CLI::App* sub, CommonArgs& a) {
    sub->add_option("--config", a.config, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", a.seed, "override the config seed");
    sub->add_option("--out", a.out, "output directory")->capture_default_str();
}

fspde::RunConfig prepare(const CommonArgs& a, fspde::ValidationMode mode) {
    auto cfg = fspde::read_config_file(a.config);
    if (a.seed) cfg.seed = *a.seed;
    const auto report = mode == fspde::ValidationMode::solver ? fspde::validate_config(cfg)
                                                              : fspde::validate(cfg.params, cfg.grid, mode);
    if (!report.ok()) throw fspde::ConfigError("invalid config " + a.config + ":\n" + fspde::describe(report));
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fractional stochastic PDE solver and verifier"};
    app.require_subcommand(1);

    CommonArgs args;
    std::optional<double> tol;
    std::optional<int> max_iter;
    std::optional<std::string> oracle;
    std::optional<std::size_t> paths;
    std::function<std::vector<std::string>()> action;

    auto* kernel = app.add_subcommand("kernel", "sample d^k G(t, x) with oracles");
    add_common(kernel, args);
    kernel->callback([&] {
        action = [&] { return fspde::command_kernel(prepare(args, fspde::ValidationMode::kernel_oracle), args.out); };
    });

    auto* lin = app.add_subcommand("simulate-linear", "spectral solution of the linear model on one path");
    add_common(lin, args);
    lin->callback([&] {
        action = [&] { return fspde::command_simulate_linear(prepare(args, fspde::ValidationMode::solver), args.out); };
    });

    auto* mild = app.add_subcommand("simulate-mild", "Picard iteration for the mild solution on one path");
    add_common(mild, args);
    mild->add_option("--tol", tol, "Picard stopping tolerance");
    mild->add_option("--max-iter", max_iter, "Picard iteration cap");
    mild->add_option("--oracle", oracle, "etd or none")->check(CLI::IsMember({"etd", "none"}));
    mild->callback([&] {
        action = [&] {
            auto cfg = prepare(args, fspde::ValidationMode::solver);
            if (tol) cfg.tol = *tol;
            if (max_iter) cfg.max_iter = *max_iter;
            if (oracle) cfg.oracle = *oracle;
            return fspde::command_simulate_mild(cfg, args.out);
        };
    });

    auto* verify = app.add_subcommand("verify", "weak-form residuals under refinement");
    add_common(verify, args);
    verify->callback([&] {
        action = [&] { return fspde::command_verify(prepare(args, fspde::ValidationMode::solver), args.out); };
    });

    auto* mc = app.add_subcommand("mc", "Monte Carlo moments E|u(t)|^p, p = 2, 4");
    add_common(mc, args);
    mc->add_option("--paths", paths, "number of sample paths (>= 100)");
    mc->callback([&] {
        action = [&] {
            auto cfg = prepare(args, fspde::ValidationMode::solver);
            if (paths) cfg.paths = *paths;
            return fspde::command_mc(cfg, args.out);
        };
    });

    auto* conv = app.add_subcommand("converge", "pathwise self-convergence on nested grids");
    add_common(conv, args);
    conv->callback([&] {
        action = [&] { return fspde::command_converge(prepare(args, fspde::ValidationMode::solver), args.out); };
    });

    CLI11_PARSE(app, argc, argv);

    try {
        for (const auto& p : action()) std::cout << p << "\n";
    } catch (const fspde::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const fspde::DomainError& e) {
        std::cerr << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const fspde::InstabilityError& e) {
        std::cerr << "instability: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
