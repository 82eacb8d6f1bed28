#pragma once

// CSV output: header row, '.' decimal point, LF line endings, doubles in
// round-trip precision.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include "fspde/error.hpp"
#include "fspde/harness/convergence.hpp"
#include "fspde/harness/monte_carlo.hpp"

namespace fspde {

class CsvWriter {
public:
    using Cell = std::variant<double, long long, std::string>;

    CsvWriter(const std::string& path, std::initializer_list<std::string> header)
        : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw ConfigError("cannot open " + path + " for writing");
        write_line(std::vector<std::string>(header));
    }

    void row(std::initializer_list<Cell> cells) {
        std::vector<std::string> text;
        for (const auto& c : cells) text.push_back(format(c));
        write_line(text);
    }

    static std::string format(const Cell& c) {
        if (const auto* s = std::get_if<std::string>(&c)) return *s;
        if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
        const double v = std::get<double>(c);
        if (std::isnan(v)) return "";
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }

private:
    void write_line(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_.put(',');
            out_ << cells[i];
        }
        out_.put('\n');
        if (!out_) throw ConfigError("write failed: " + path_);
    }

    std::string path_;
    std::ofstream out_;
};

inline long long as_int(std::size_t v) { return static_cast<long long>(v); }

inline void emit_csv(const MomentReport& r, const std::string& path) {
    CsvWriter w(path, {"t", "m2", "se2", "m4", "se4"});
    for (std::size_t n = 0; n < r.times.size(); ++n) w.row({r.times[n], r.m2[n], r.se2[n], r.m4[n], r.se4[n]});
}

inline void emit_summary_csv(const MomentReport& r, const std::string& path) {
    CsvWriter w(path, {"n_paths", "excluded", "sup_m2", "sup_m4"});
    w.row({as_int(r.n_paths), as_int(r.excluded), r.sup_m2, r.sup_m4});
}

/// One row per level; the difference and order columns refer to the step from the previous level.
inline void emit_csv(const ConvergenceReport& r, const std::string& path) {
    CsvWriter w(path, {"level", "N", "M", "difference", "order"});
    const double none = std::nan("");
    for (std::size_t l = 0; l < r.levels.size(); ++l) {
        const double d = l > 0 ? r.differences[l - 1] : none;
        const double o = l > 1 ? r.orders[l - 2] : none;
        w.row({as_int(l), as_int(r.levels[l].N), as_int(r.levels[l].M), d, o});
    }
}

}  // namespace fspde
