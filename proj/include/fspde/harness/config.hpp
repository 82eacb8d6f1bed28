#pragma once

// Run configuration: a flat `key = value` text file, '#' starts a comment.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/model_config.hpp"

namespace fspde {

enum class ModelKind { linear, nonlinear };
enum class Refinement { time, space_time };

struct RunConfig {
    FracParams params;
    GridSpec grid;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    ModelKind model = ModelKind::linear;
    std::string f = "const:1";
    std::vector<std::string> h;  // h_0..h_m selectors, "zero" when absent
    std::string u0 = "zero";
    double tol = 1e-8;
    int max_iter = 50;
    std::size_t paths = 100;
    std::size_t levels = 3;
    std::vector<double> t_out;  // empty means {T}
    double kernel_t = 1.0;
    int kernel_k = 0;
    Refinement refine = Refinement::space_time;
    std::string oracle = "none";

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("key '" + key + "': not a number: " + v);
    return out;
}

template <class Int>
Int parse_int(const std::string& key, const std::string& v) {
    Int out = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || p != v.data() + v.size()) throw ConfigError("key '" + key + "': not an integer: " + v);
    return out;
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
    return out;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
    char buf[32];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        double back = 0.0;
        std::from_chars(buf, buf + std::char_traits<char>::length(buf), back);
        if (back == v) break;
    }
    return buf;
}

inline int h_index(const std::string& key) {
    if (key.size() < 2 || key[0] != 'h') return -1;
    int k = 0;
    const auto [p, ec] = std::from_chars(key.data() + 1, key.data() + key.size(), k);
    return (ec == std::errc() && p == key.data() + key.size() && k >= 0) ? k : -1;
}

}  // namespace detail

inline RunConfig parse_config(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        const auto key = detail::trim(line.substr(0, eq));
        if (kv.count(key)) throw ConfigError("duplicate key '" + key + "'");
        kv[key] = detail::trim(line.substr(eq + 1));
    }

    static const std::set<std::string> required{"alpha", "delta", "m", "L", "N", "T", "M"};
    static const std::set<std::string> optional{"seed",  "stream", "model",    "f",        "u0",     "tol",
                                                "max_iter", "paths", "levels", "t_out", "kernel_t", "kernel_k",
                                                "refine", "oracle"};
    std::string missing, unknown;
    for (const auto& r : required)
        if (!kv.count(r)) missing += (missing.empty() ? "" : ", ") + r;
    for (const auto& [k, v] : kv)
        if (!required.count(k) && !optional.count(k) && detail::h_index(k) < 0)
            unknown += (unknown.empty() ? "" : ", ") + k;
    if (!unknown.empty()) throw ConfigError("unknown keys: " + unknown);
    if (!missing.empty()) throw ConfigError("missing required keys: " + missing);

    RunConfig c;
    c.params.alpha = detail::parse_double("alpha", kv["alpha"]);
    c.params.delta = detail::parse_double("delta", kv["delta"]);
    c.params.m = detail::parse_int<int>("m", kv["m"]);
    c.grid.L = detail::parse_double("L", kv["L"]);
    c.grid.N = detail::parse_int<std::size_t>("N", kv["N"]);
    c.grid.T = detail::parse_double("T", kv["T"]);
    c.grid.M = detail::parse_int<std::size_t>("M", kv["M"]);
    c.h.assign(static_cast<std::size_t>(std::max(c.params.m, 0)) + 1, "zero");
    for (const auto& [k, v] : kv) {
        if (const int hk = detail::h_index(k); hk >= 0) {
            if (hk > c.params.m) throw ConfigError("key '" + k + "' exceeds m = " + std::to_string(c.params.m));
            c.h[static_cast<std::size_t>(hk)] = v;
        }
    }
    auto get = [&](const char* key, auto fn) {
        if (auto it = kv.find(key); it != kv.end()) fn(it->second);
    };
    get("seed", [&](const std::string& v) { c.seed = detail::parse_int<std::uint64_t>("seed", v); });
    get("stream", [&](const std::string& v) { c.stream = detail::parse_int<std::uint64_t>("stream", v); });
    get("model", [&](const std::string& v) {
        if (v == "linear") c.model = ModelKind::linear;
        else if (v == "nonlinear") c.model = ModelKind::nonlinear;
        else throw ConfigError("model must be linear or nonlinear, got " + v);
    });
    get("f", [&](const std::string& v) { c.f = v; });
    get("u0", [&](const std::string& v) { c.u0 = v; });
    get("tol", [&](const std::string& v) { c.tol = detail::parse_double("tol", v); });
    get("max_iter", [&](const std::string& v) { c.max_iter = detail::parse_int<int>("max_iter", v); });
    get("paths", [&](const std::string& v) { c.paths = detail::parse_int<std::size_t>("paths", v); });
    get("levels", [&](const std::string& v) { c.levels = detail::parse_int<std::size_t>("levels", v); });
    get("t_out", [&](const std::string& v) { c.t_out = detail::parse_list("t_out", v); });
    get("kernel_t", [&](const std::string& v) { c.kernel_t = detail::parse_double("kernel_t", v); });
    get("kernel_k", [&](const std::string& v) { c.kernel_k = detail::parse_int<int>("kernel_k", v); });
    get("refine", [&](const std::string& v) {
        if (v == "time") c.refine = Refinement::time;
        else if (v == "space-time") c.refine = Refinement::space_time;
        else throw ConfigError("refine must be time or space-time, got " + v);
    });
    get("oracle", [&](const std::string& v) {
        if (v != "etd" && v != "none") throw ConfigError("oracle must be etd or none, got " + v);
        c.oracle = v;
    });
    return c;
}

inline RunConfig parse_config(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline std::string emit_config(const RunConfig& c) {
    using detail::format_double;
    std::ostringstream o;
    o << "alpha = " << format_double(c.params.alpha) << "\n"
      << "delta = " << format_double(c.params.delta) << "\n"
      << "m = " << c.params.m << "\n"
      << "L = " << format_double(c.grid.L) << "\n"
      << "N = " << c.grid.N << "\n"
      << "T = " << format_double(c.grid.T) << "\n"
      << "M = " << c.grid.M << "\n"
      << "seed = " << c.seed << "\n"
      << "stream = " << c.stream << "\n"
      << "model = " << (c.model == ModelKind::linear ? "linear" : "nonlinear") << "\n"
      << "f = " << c.f << "\n";
    for (std::size_t k = 0; k < c.h.size(); ++k) o << "h" << k << " = " << c.h[k] << "\n";
    o << "u0 = " << c.u0 << "\n"
      << "tol = " << format_double(c.tol) << "\n"
      << "max_iter = " << c.max_iter << "\n"
      << "paths = " << c.paths << "\n"
      << "levels = " << c.levels << "\n";
    if (!c.t_out.empty()) {
        o << "t_out = ";
        for (std::size_t i = 0; i < c.t_out.size(); ++i) o << (i ? "," : "") << format_double(c.t_out[i]);
        o << "\n";
    }
    o << "kernel_t = " << format_double(c.kernel_t) << "\n"
      << "kernel_k = " << c.kernel_k << "\n"
      << "refine = " << (c.refine == Refinement::time ? "time" : "space-time") << "\n"
      << "oracle = " << c.oracle << "\n";
    return o.str();
}

inline RunConfig read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    return parse_config(in);
}

}  // namespace fspde
