#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "plap/error.hpp"
#include "plap/field.hpp"

namespace plap {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline double parse_double(const std::string& token, std::size_t line) {
    const char* first = token.data();
    const char* last = token.data() + token.size();
    double value = 0;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw Error(ErrorKind::ParseError,
                    "line " + std::to_string(line) + ": cannot parse number '" + token + "'");
    }
    return value;
}

}  // namespace detail

/// Header `x,value` or `x,y,value`; one row per node in flat-index order;
/// 17 significant digits so that a read reproduces the doubles bit-exactly.
inline void write_field_csv(std::ostream& os, const Field<double>& u) {
    const Grid<double>& g = u.grid();
    os << (g.dim() == 1 ? "x,value\n" : "x,y,value\n");
    for (Index k = 0; k < u.size(); ++k) {
        os << detail::format_double(g.coords()(k, 0)) << ',';
        if (g.dim() == 2) os << detail::format_double(g.coords()(k, 1)) << ',';
        os << detail::format_double(u[k]) << '\n';
    }
}

inline void write_field_csv(const std::string& path, const Field<double>& u) {
    std::ofstream os(path);
    if (!os) throw Error(ErrorKind::InvalidArgument, "cannot open " + path + " for writing");
    write_field_csv(os, u);
}

/// Rebuilds the grid from the coordinate columns (first and last distinct
/// coordinate per axis are the extent, the distinct count minus two is the
/// interior count) and checks every row against it.
inline Field<double> read_field_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw Error(ErrorKind::ParseError, "line 1: empty field file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    int dim = 0;
    if (line == "x,value") dim = 1;
    else if (line == "x,y,value") dim = 2;
    else throw Error(ErrorKind::ParseError, "line 1: unexpected header '" + line + "'");

    std::vector<std::array<double, 3>> rows;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 3> row{0, 0, 0};
        std::stringstream ss(line);
        std::string tok;
        int col = 0;
        while (std::getline(ss, tok, ',')) {
            if (col > dim) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": too many columns");
            }
            row[static_cast<std::size_t>(col++)] = detail::parse_double(tok, lineno);
        }
        if (col != dim + 1) {
            throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": too few columns");
        }
        rows.push_back(row);
    }
    if (rows.empty()) throw Error(ErrorKind::ParseError, "field file has no rows");

    std::vector<Interval<double>> extent;
    std::vector<Index> n;
    if (dim == 1) {
        extent.push_back({rows.front()[0], rows.back()[0]});
        n.push_back(static_cast<Index>(rows.size()) - 2);
    } else {
        Index my = 0;
        while (my < static_cast<Index>(rows.size()) && rows[static_cast<std::size_t>(my)][0] == rows.front()[0]) ++my;
        if (my == 0 || rows.size() % static_cast<std::size_t>(my) != 0) {
            throw Error(ErrorKind::ParseError, "2D field rows do not form a tensor grid");
        }
        const Index mx = static_cast<Index>(rows.size()) / my;
        extent.push_back({rows.front()[0], rows.back()[0]});
        extent.push_back({rows.front()[1], rows.back()[1]});
        n.push_back(mx - 2);
        n.push_back(my - 2);
    }
    auto grid = build_grid<double>(dim, extent, n);
    Eigen::VectorXd values(grid->node_count());
    for (Index k = 0; k < grid->node_count(); ++k) {
        const auto& row = rows[static_cast<std::size_t>(k)];
        for (int a = 0; a < dim; ++a) {
            if (row[static_cast<std::size_t>(a)] != grid->coords()(k, a)) {
                throw Error(ErrorKind::ParseError, "line " + std::to_string(k + 2) +
                                                       ": coordinate does not match a uniform grid");
            }
        }
        values[k] = row[static_cast<std::size_t>(dim)];
    }
    return Field<double>(std::move(grid), std::move(values));
}

inline Field<double> read_field_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(ErrorKind::InvalidArgument, "cannot open " + path);
    return read_field_csv(is);
}

}  // namespace plap
