#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "fspde/fspde.hpp"

using namespace fspde;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = "alpha = 1.5\ndelta = 0.2\nm = 1\nL = 4\nN = 32\nT = 1\nM = 16\n";

fs::path scratch_dir(const std::string& name) {
    const auto d = fs::temp_directory_path() / ("fspde_test_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

bool has_rule(const ValidationReport& r, const std::string& id) {
    for (const auto& v : r.violations)
        if (v.rule == id) return true;
    return false;
}


}  // namespace

TEST(Config, Defaults) {
    const auto c = parse_config(kMinimal);
    EXPECT_EQ(c.params.alpha, 1.5);
    EXPECT_EQ(c.params.m, 1);
    EXPECT_EQ(c.grid, (GridSpec{4.0, 32, 1.0, 16}));
    EXPECT_EQ(c.seed, 0U);
    EXPECT_EQ(c.model, ModelKind::linear);
    EXPECT_EQ(c.f, "const:1");
    EXPECT_EQ(c.h, (std::vector<std::string>{"zero", "zero"}));
    EXPECT_EQ(c.u0, "zero");
    EXPECT_EQ(c.paths, 100U);
    EXPECT_EQ(c.refine, Refinement::space_time);
    EXPECT_TRUE(c.t_out.empty());
}

TEST(Config, CommentsAndWhitespace) {
    const auto c = parse_config(std::string("# header\n\n") + kMinimal + "  seed=7   # trailing\nt_out = 0.25 , 1\n");
    EXPECT_EQ(c.seed, 7U);
    EXPECT_EQ(c.t_out, (std::vector<double>{0.25, 1.0}));
}

TEST(Config, ReportsEveryUnknownKey) {
    const auto e = error_of(std::string(kMinimal) + "alhpa = 2\nsede = 1\n");
    EXPECT_NE(e.find("unknown keys"), std::string::npos);
    EXPECT_NE(e.find("alhpa"), std::string::npos);
    EXPECT_NE(e.find("sede"), std::string::npos);
}

TEST(Config, ReportsEveryMissingKey) {
    const auto e = error_of("alpha = 1.5\ndelta = 0\nm = 0\nL = 4\nN = 32\n");
    EXPECT_NE(e.find("missing required keys"), std::string::npos);
    EXPECT_NE(e.find("T"), std::string::npos);
    EXPECT_NE(e.find("M"), std::string::npos);
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_FALSE(error_of(std::string(kMinimal) + "alpha = 2\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "seed = -1\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "tol = 1e-8x\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "h2 = zero\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "model = quadratic\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "refine = space\n").empty());
    EXPECT_FALSE(error_of(std::string(kMinimal) + "just some words\n").empty());
}

TEST(Config, EmitParseRoundTrip) {
    auto c = parse_config(kMinimal);
    c.params.delta = 0.1;
    c.grid.L = 1.0 / 3.0;
    c.seed = 18446744073709551615ULL;
    c.model = ModelKind::nonlinear;
    c.f = "affine:0.5,0.25";
    c.h = {"linear:-0.3", "sin"};
    c.u0 = "gauss:1,0.5";
    c.tol = 3e-11;
    c.t_out = {0.1, 0.7};
    c.refine = Refinement::time;
    c.oracle = "etd";
    EXPECT_EQ(parse_config(emit_config(c)), c);
}

TEST(Config, ValidationRuleIds) {
    auto c = parse_config(kMinimal);
    EXPECT_TRUE(validate_config(c).ok());
    c.params.alpha = 0.9;
    EXPECT_TRUE(has_rule(validate_config(c), "alpha-range"));

    c = parse_config(kMinimal);
    c.f = "sin";
    EXPECT_TRUE(has_rule(validate_config(c), "linear-f"));
    c.f = "const:1";
    c.h[1] = "sin";
    EXPECT_TRUE(has_rule(validate_config(c), "linear-h"));
    c.model = ModelKind::nonlinear;
    EXPECT_TRUE(validate_config(c).ok());
    c.t_out = {1.5};
    EXPECT_TRUE(has_rule(validate_config(c), "t-out"));
    c.t_out.clear();
    c.max_iter = 0;
    EXPECT_TRUE(has_rule(validate_config(c), "picard"));
    c.max_iter = 10;
    c.f = "cubic";
    EXPECT_TRUE(has_rule(validate_config(c), "selector"));
}

TEST(Config, LoadConfigNamesTheRule) {
    const auto dir = scratch_dir("load");
    const auto path = (dir / "bad.cfg").string();
    std::ofstream(path) << "alpha = 0.9\ndelta = 0\nm = 0\nL = 4\nN = 32\nT = 1\nM = 16\n";
    try {
        load_config(path);
        FAIL() << "expected ConfigError";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("alpha-range"), std::string::npos);
    }
    EXPECT_THROW(load_config(path, ValidationMode::kernel_oracle), ConfigError);
    const auto cauchy = (dir / "cauchy.cfg").string();
    std::ofstream(cauchy) << "alpha = 1\ndelta = 0\nm = 0\nL = 4\nN = 32\nT = 1\nM = 16\n";
    EXPECT_NO_THROW(load_config(cauchy, ValidationMode::kernel_oracle));
    EXPECT_THROW(load_config(cauchy), ConfigError);
    EXPECT_THROW(read_config_file((dir / "missing.cfg").string()), ConfigError);
}

TEST(Selectors, Library) {
    EXPECT_EQ(parse_f("const:2.5")(7.0), 2.5);
    EXPECT_EQ(parse_f("affine:1,0.5")(2.0), 2.0);
    EXPECT_EQ(parse_f("sin")(1.0), std::sin(1.0));
    EXPECT_EQ(parse_h("zero")(3.0), 0.0);
    EXPECT_EQ(parse_h("linear:-0.5")(2.0), -1.0);
    EXPECT_FALSE(parse_f("const:1").depends_on_u());
    EXPECT_TRUE(parse_f("affine:0,1").depends_on_u());
    EXPECT_THROW(parse_f("const"), ConfigError);
    EXPECT_THROW(parse_f("affine:1"), ConfigError);
    EXPECT_THROW(parse_h("quadratic"), ConfigError);

    const GridSpec g{2.0, 8, 1.0, 4};
    const auto gauss = initial_field("gauss:2,0.5", g);
    EXPECT_EQ(gauss[4], 2.0);
    EXPECT_NEAR(gauss[5], 2.0 * std::exp(-1.0), 1e-15);
    const auto s = initial_field("sin:3", g);
    EXPECT_NEAR(s[6], 3.0, 1e-15);
    EXPECT_EQ(initial_field("zero", g), Field(g.N, 0.0));
    EXPECT_THROW(initial_field("gauss:1,0", g), ConfigError);
}

TEST(Selectors, LipschitzAndEnvelopes) {
    auto c = parse_config(kMinimal);
    c.f = "affine:2,0.5";
    c.h = {"linear:0.25", "sin"};
    const auto spec = build_coefficients(c);
    EXPECT_DOUBLE_EQ(spec.lipschitz, 1.75);
    ASSERT_EQ(spec.envelopes.size(), 3U);
    EXPECT_DOUBLE_EQ(spec.envelopes[2](0.0), 2.0 / 1.75);
    EXPECT_EQ(spec.envelopes[0](0.0), 0.0);
    c.f = "const:1";
    c.h = {"zero", "zero"};
    EXPECT_EQ(build_coefficients(c).lipschitz, 1.0);
}

TEST(Selectors, LinearModelCarriesDriftAndAmplitude) {
    auto c = parse_config(kMinimal);
    c.f = "const:0.5";
    c.h = {"linear:-0.2", "linear:0.3"};
    const auto m = build_model(c);
    EXPECT_EQ(m.linear.params.drift, (std::vector<double>{-0.2, 0.3}));
    ASSERT_TRUE(static_cast<bool>(m.linear.f));
    EXPECT_EQ(m.linear.f(0.3, 1.0), 0.5);
    c.f = "const:0";
    EXPECT_FALSE(static_cast<bool>(build_model(c).linear.f));
}

TEST(Csv, Format) {
    const auto dir = scratch_dir("csv");
    const auto path = (dir / "a.csv").string();
    {
        CsvWriter w(path, {"a", "b", "c"});
        w.row({0.1, as_int(3), std::nan("")});
        w.row({-2.5e-300, as_int(0), std::string("x")});
    }
    EXPECT_EQ(slurp(path), "a,b,c\n0.10000000000000001,3,\n-2.5e-300,0,x\n");
    EXPECT_THROW(CsvWriter((dir / "no" / "such" / "dir.csv").string(), {"a"}), ConfigError);
}

TEST(MonteCarlo, LinearMomentMatchesIsometry) {
    auto c = parse_config(kMinimal);
    c.params = {1.5, 0.2, 0, {}};
    c.h = {"linear:-0.3"};
    c.grid = {2.0, 16, 0.5, 16};
    const auto r = run_mc(c, 1000, 3);
    const SymbolTable table(build_model(c).linear.params, c.grid);
    for (std::size_t n : {std::size_t{4}, c.grid.M}) {
        double want = 0.0;
        for (std::size_t k = 0; k < c.grid.N; ++k)
            want += discrete_mode_variance(table.total(k), n, c.grid.dt(), c.grid.L);
        want /= 2.0 * c.grid.L;  // |u|_2^2 = sum_j |u_j|^2 / 2L
        EXPECT_LT(std::fabs(r.m2[n] - want), 3.0 * r.se2[n]) << n << " " << r.m2[n] << " " << want;
    }
    EXPECT_EQ(r.m2[0], 0.0);
    EXPECT_EQ(r.n_paths, 1000U);
    EXPECT_EQ(r.excluded, 0U);
}

TEST(MonteCarlo, NoNoiseMeansNoSpread) {
    auto c = parse_config(kMinimal);
    c.f = "const:0";
    c.u0 = "gauss:1,1";
    const auto r = run_mc(c, 100, 0);
    const auto traj = evolve_linear(build_model(c).linear, c.grid, zero_sheet(c.grid));
    for (std::size_t n = 0; n <= c.grid.M; ++n) {
        EXPECT_EQ(r.se2[n], 0.0);
        EXPECT_NEAR(r.m2[n], std::pow(l2_norm(traj.states[n], c.grid), 2), 1e-12);
        EXPECT_NEAR(r.m4[n], r.m2[n] * r.m2[n], 1e-12);
    }
    EXPECT_EQ(r.sup_m2, r.m2[0]);
}

TEST(MonteCarlo, ThreadCountDoesNotChangeTheEstimate) {
    auto c = parse_config(kMinimal);
    c.model = ModelKind::nonlinear;
    c.f = "sin";
    c.u0 = "gauss:1,1";
    c.grid = {4.0, 16, 0.5, 16};
    const auto one = run_mc(c, 120, 5, {1, std::nullopt});
    const auto four = run_mc(c, 120, 5, {4, std::nullopt});
    EXPECT_EQ(one.m2, four.m2);
    EXPECT_EQ(one.se2, four.se2);
    EXPECT_EQ(one.m4, four.m4);
    EXPECT_EQ(one.se4, four.se4);
}

TEST(MonteCarlo, ExcludesUnconvergedPaths) {
    auto c = parse_config(kMinimal);
    c.model = ModelKind::nonlinear;
    c.f = "sin";
    c.u0 = "gauss:1,1";
    c.grid = {4.0, 16, 0.5, 8};
    c.tol = 1e-14;
    c.max_iter = 1;
    const auto r = run_mc(c, 100, 0);
    EXPECT_EQ(r.n_paths, 0U);
    EXPECT_EQ(r.excluded, 100U);
    EXPECT_EQ(r.excluded_streams.front(), 0U);
    EXPECT_EQ(r.excluded_streams.back(), 99U);
}

TEST(MonteCarlo, NeedsEnoughPaths) {
    EXPECT_THROW(run_mc(parse_config(kMinimal), 99, 0), DomainError);
}

TEST(MonteCarlo, ParallelForRunsEveryIndexOnceAndRethrows) {
    std::vector<int> hits(257, 0);
    parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
    for (int h : hits) EXPECT_EQ(h, 1);
    EXPECT_THROW(parallel_for(10, 3,
                              [](std::size_t i) {
                                  if (i == 7) throw DomainError("boom");
                              }),
                 DomainError);
}

TEST(Convergence, RejectsBadLevelSets) {
    const auto c = parse_config(kMinimal);
    const std::vector<GridSpec> two{{4.0, 32, 1.0, 16}, {4.0, 64, 1.0, 32}};
    EXPECT_THROW(convergence_study(c, two), DomainError);
    const std::vector<GridSpec> odd{{4.0, 32, 1.0, 16}, {4.0, 48, 1.0, 32}, {4.0, 96, 1.0, 64}};
    EXPECT_THROW(convergence_study(c, odd), DomainError);
    const std::vector<GridSpec> flat{{4.0, 32, 1.0, 16}, {4.0, 32, 1.0, 16}, {4.0, 64, 1.0, 32}};
    EXPECT_THROW(convergence_study(c, flat), DomainError);
    EXPECT_THROW(convergence_study(c, std::size_t{2}), DomainError);
}

TEST(Convergence, RefinementLevels) {
    const GridSpec base{4.0, 32, 1.0, 16};
    const auto st = refinement_levels(base, 3, Refinement::space_time);
    EXPECT_EQ(st[2], (GridSpec{4.0, 128, 1.0, 64}));
    const auto t = refinement_levels(base, 3, Refinement::time);
    EXPECT_EQ(t[2], (GridSpec{4.0, 32, 1.0, 64}));
}

TEST(Convergence, DeterministicTemporalOrderIsOne) {
    // without noise the only error is the explicit treatment of h_0 = c u
    auto c = parse_config(kMinimal);
    c.model = ModelKind::nonlinear;
    c.f = "const:0";
    c.h = {"linear:-0.5", "zero"};
    c.u0 = "gauss:1,1";
    c.tol = 1e-13;
    c.refine = Refinement::time;
    c.grid = {4.0, 32, 1.0, 32};
    const auto r = convergence_study(c, 4);
    ASSERT_EQ(r.orders.size(), 2U);
    for (double o : r.orders) EXPECT_NEAR(o, 1.0, 0.1);
}

TEST(Convergence, LinearModelIsExactInTimeWithoutNoise) {
    auto c = parse_config(kMinimal);
    c.f = "const:0";
    c.h = {"linear:-0.5", "linear:0.2"};
    c.u0 = "gauss:1,1";
    c.refine = Refinement::time;
    const auto r = convergence_study(c, 3);
    for (double d : r.differences) EXPECT_LT(d, 1e-12);
}

TEST(Commands, WriteExpectedFiles) {
    const auto dir = scratch_dir("cmds");
    auto c = parse_config(kMinimal);
    c.u0 = "gauss:1,1";
    c.t_out = {0.5, 1.0};
    const auto lin = command_simulate_linear(c, (dir / "lin").string());
    ASSERT_EQ(lin.size(), 3U);
    const auto fields = slurp(lin[0]);
    EXPECT_EQ(fields.substr(0, 6), "t,x,u\n");
    EXPECT_EQ(std::count(fields.begin(), fields.end(), '\n'), 1 + 2 * 32);
    const auto modes = slurp(lin[1]);
    EXPECT_EQ(std::count(modes.begin(), modes.end(), '\n'), 1 + 17);

    const auto back = read_noise_dump(lin[2]);
    const auto want = sample_sheet(c.grid, c.seed, c.stream);
    EXPECT_EQ(back.dW, want.dW);
    EXPECT_EQ(back.grid, c.grid);

    c.model = ModelKind::nonlinear;
    c.f = "sin";
    c.oracle = "etd";
    c.tol = 1e-12;
    const auto mild = command_simulate_mild(c, (dir / "mild").string());
    ASSERT_EQ(mild.size(), 4U);
    EXPECT_EQ(fs::path(mild[2]).filename(), "oracle.csv");
    std::istringstream oracle(slurp(mild[2]));
    std::string line;
    std::getline(oracle, line);
    EXPECT_EQ(line, "t,rel_l2_vs_etd");
    while (std::getline(oracle, line)) EXPECT_LT(std::stod(line.substr(line.find(',') + 1)), 1e-9) << line;

    EXPECT_THROW(command_simulate_linear(c, (dir / "bad").string()), ConfigError);
}

TEST(Commands, KernelColumns) {
    const auto dir = scratch_dir("kernel");
    auto c = parse_config("alpha = 2\ndelta = 0\nm = 0\nL = 10\nN = 64\nT = 1\nM = 1\n");
    const auto out = command_kernel(c, dir.string());
    std::istringstream in(slurp(out[0]));
    std::string line;
    std::getline(in, line);
    EXPECT_EQ(line, "x,G,analytic_oracle,tail_series");
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        double x, g, o;
        char comma;
        std::istringstream row(line);
        row >> x >> comma >> g >> comma >> o;
        EXPECT_NEAR(g, o, 1e-12) << line;
        ++rows;
    }
    EXPECT_EQ(rows, 64U);
}

TEST(Commands, RerunIsByteIdentical) {
    const auto dir = scratch_dir("rerun");
    auto c = parse_config(kMinimal);
    c.model = ModelKind::nonlinear;
    c.f = "affine:1,0.2";
    c.u0 = "sin:1";
    c.levels = 3;
    c.refine = Refinement::time;
    for (const char* run : {"a", "b"}) {
        const auto d = (dir / run).string();
        command_simulate_mild(c, d);
        command_verify(c, d);
        command_mc(c, d, std::string(run) == "a" ? 1 : 3);
        command_converge(c, d);
    }
    std::size_t compared = 0;
    for (const auto& e : fs::directory_iterator(dir / "a")) {
        EXPECT_EQ(slurp(e.path()), slurp(dir / "b" / e.path().filename())) << e.path();
        ++compared;
    }
    EXPECT_EQ(compared, 7U);
}
