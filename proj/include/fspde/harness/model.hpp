#pragma once

// Named coefficient library behind the config selectors, and a single entry
// point that solves one noise path for either model.
//
//   f:   const:c | affine:a,b (a + b u) | sin (sin u)
//   h_k: zero | linear:c (c u) | sin (sin u)
//   u0:  zero | gauss:a,w (a exp(-(x/w)^2)) | sin:a (a sin(pi x / L))

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/frac_calculus.hpp"
#include "fspde/harness/config.hpp"
#include "fspde/mild_solver.hpp"
#include "fspde/model_config.hpp"
#include "fspde/noise.hpp"
#include "fspde/spectral_solver.hpp"

namespace fspde {

/// One library entry: g(u) = a + b u, or b sin u.
struct Selector {
    enum class Kind { affine, sine } kind = Kind::affine;
    double a = 0.0;
    double b = 0.0;

    [[nodiscard]] double operator()(double u) const { return kind == Kind::sine ? b * std::sin(u) : a + b * u; }
    [[nodiscard]] double lipschitz() const { return std::fabs(b); }
    [[nodiscard]] bool depends_on_u() const { return b != 0.0; }
};

namespace detail {

inline std::vector<double> selector_args(const std::string& what, const std::string& s, std::size_t count) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) throw ConfigError(what + ": selector '" + s + "' needs arguments");
    auto args = parse_list(what, s.substr(colon + 1));
    if (args.size() != count)
        throw ConfigError(what + ": selector '" + s + "' takes " + std::to_string(count) + " argument(s)");
    return args;
}

inline std::string selector_name(const std::string& s) { return s.substr(0, s.find(':')); }

}  // namespace detail

inline Selector parse_f(const std::string& s) {
    const auto name = detail::selector_name(s);
    if (name == "const") return {Selector::Kind::affine, detail::selector_args("f", s, 1)[0], 0.0};
    if (name == "affine") {
        const auto a = detail::selector_args("f", s, 2);
        return {Selector::Kind::affine, a[0], a[1]};
    }
    if (s == "sin") return {Selector::Kind::sine, 0.0, 1.0};
    throw ConfigError("f: unknown selector '" + s + "'");
}

inline Selector parse_h(const std::string& s) {
    if (s == "zero") return {};
    if (detail::selector_name(s) == "linear") return {Selector::Kind::affine, 0.0, detail::selector_args("h", s, 1)[0]};
    if (s == "sin") return {Selector::Kind::sine, 0.0, 1.0};
    throw ConfigError("h: unknown selector '" + s + "'");
}

inline Field initial_field(const std::string& s, const GridSpec& grid) {
    Field u(grid.N, 0.0);
    const auto name = detail::selector_name(s);
    if (s == "zero") return u;
    if (name == "gauss") {
        const auto a = detail::selector_args("u0", s, 2);
        if (!(a[1] > 0.0)) throw ConfigError("u0: gauss width must be positive");
        for (std::size_t i = 0; i < grid.N; ++i) u[i] = a[0] * std::exp(-std::pow(grid.x(i) / a[1], 2));
        return u;
    }
    if (name == "sin") {
        const double a = detail::selector_args("u0", s, 1)[0];
        for (std::size_t i = 0; i < grid.N; ++i) u[i] = a * std::sin(std::numbers::pi * grid.x(i) / grid.L);
        return u;
    }
    throw ConfigError("u0: unknown selector '" + s + "'");
}

/// Everything a run needs besides the noise.
struct Model {
    ModelKind kind = ModelKind::linear;
    FracParams params;
    CoefficientSpec coeffs;
    LinearModel linear;  // filled for the linear model only
    Field u0;
};

/// K_T = max(1, sum of Lipschitz constants); envelopes a_k = |g_k(0)| / K_T.
inline CoefficientSpec build_coefficients(const RunConfig& c) {
    CoefficientSpec spec;
    const Selector f = parse_f(c.f);
    std::vector<Selector> hs;
    for (const auto& s : c.h) hs.push_back(parse_h(s));
    double lip = f.lipschitz();
    for (const auto& h : hs) lip += h.lipschitz();
    spec.lipschitz = std::max(1.0, lip);
    for (const auto& h : hs) {
        spec.h.push_back([h](double, double, double u) { return h(u); });
        const double a = std::fabs(h(0.0)) / spec.lipschitz;
        spec.envelopes.push_back([a](double) { return a; });
    }
    spec.f = [f](double, double, double u) { return f(u); };
    const double af = std::fabs(f(0.0)) / spec.lipschitz;
    spec.envelopes.push_back([af](double) { return af; });
    return spec;
}

/// Rules beyond validate(): the linear model needs linear h_k and a u-free f.
inline ValidationReport validate_config(const RunConfig& c) {
    ValidationReport r;
    try {
        r = validate(c.params, c.grid, build_coefficients(c));
    } catch (const ConfigError& e) {
        r.violations.push_back({"selector", e.what()});
        return r;
    }
    if (c.model == ModelKind::linear) {
        if (parse_f(c.f).depends_on_u())
            r.violations.push_back({"linear-f", "linear model needs f independent of u"});
        for (const auto& s : c.h)
            if (parse_h(s).kind == Selector::Kind::sine)
                r.violations.push_back({"linear-h", "linear model needs h_k = zero or linear:c"});
    }
    for (double t : c.t_out)
        if (!(t >= 0.0 && t <= c.grid.T)) r.violations.push_back({"t-out", "output time outside [0, T]"});
    if (!(c.tol > 0.0) || c.max_iter < 1) r.violations.push_back({"picard", "tol must be positive, max_iter >= 1"});
    return r;
}

inline std::string describe(const ValidationReport& r) {
    std::ostringstream o;
    for (const auto& v : r.violations) o << "[" << v.rule << "] " << v.message << "\n";
    return o.str();
}

/// Reads and validates; throws ConfigError carrying every rule id on failure.
inline RunConfig load_config(const std::string& path, ValidationMode mode = ValidationMode::solver) {
    auto c = read_config_file(path);
    const auto r = mode == ValidationMode::solver ? validate_config(c) : validate(c.params, c.grid, mode);
    if (!r.ok()) throw ConfigError("invalid config " + path + ":\n" + describe(r));
    return c;
}

inline Model build_model(const RunConfig& c) {
    Model m;
    m.kind = c.model;
    m.params = c.params;
    m.coeffs = build_coefficients(c);
    m.u0 = initial_field(c.u0, c.grid);
    if (c.model == ModelKind::linear) {
        m.linear.params = c.params;
        m.linear.params.drift.clear();
        for (const auto& s : c.h) m.linear.params.drift.push_back(parse_h(s).b);
        const double amp = parse_f(c.f).a;
        if (amp != 0.0) m.linear.f = [amp](double, double) { return amp; };
        m.linear.u0 = m.u0;
    }
    return m;
}

struct PathSolution {
    std::vector<Field> states;  // levels 0..M
    bool converged = true;
    PicardDiagnostics diagnostics;
};

inline PathSolution solve_path(const Model& model, const GridSpec& grid, const SheetIncrements& sheet,
                               const PicardOptions& opts = {}) {
    PathSolution out;
    if (model.kind == ModelKind::linear) {
        out.states.reserve(grid.M + 1);
        march_linear(model.linear, grid, sheet,
                     [&](std::size_t, const std::vector<cplx>& u) { out.states.push_back(inverse(u, grid)); });
        return out;
    }
    auto r = picard_solve(model.u0, model.coeffs, model.params, grid, sheet, opts);
    out.states = std::move(r.path.u);
    out.converged = r.diagnostics.converged;
    out.diagnostics = std::move(r.diagnostics);
    return out;
}

/// Rebuilds grid-dependent pieces (u0) of a model for another grid.
inline Model model_on(const RunConfig& c, const GridSpec& grid) {
    RunConfig cc = c;
    cc.grid = grid;
    return build_model(cc);
}

/// Level index of each requested output time (nearest level); {M} when none requested.
inline std::vector<std::size_t> output_levels(const RunConfig& c) {
    std::vector<std::size_t> out;
    if (c.t_out.empty()) return {c.grid.M};
    for (double t : c.t_out) out.push_back(static_cast<std::size_t>(std::llround(t / c.grid.dt())));
    return out;
}

}  // namespace fspde
