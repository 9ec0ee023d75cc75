#pragma once

#include "field.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fracdiff {

/// Shortest decimal form that round-trips to the same double.
inline std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline double parse_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw std::invalid_argument("csv: malformed number '" + s + "'");
    return v;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("csv: missing column '" + name + "'");
    }
};

inline CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    CsvTable t;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (first) {
            t.header = cells;
            first = false;
            continue;
        }
        if (cells.size() != t.header.size())
            throw std::invalid_argument("csv: ragged row in " + path);
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) row[i] = parse_double(cells[i]);
        t.rows.push_back(std::move(row));
    }
    if (first) throw std::invalid_argument("csv: empty file " + path);
    return t;
}

/// Row-major time-outer solution dump: t,x[,y],u with LF endings.
inline void write_field_csv(const std::string& path, const Field& u) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("csv: cannot write " + path);
    out << (u.grid.dimension == 1 ? "t,x,u" : "t,x,y,u") << "\n";
    for (Eigen::Index k = 0; k < u.values.cols(); ++k) {
        const std::string ts = format_double(u.tgrid.t(static_cast<std::size_t>(k)));
        for (std::size_t p = 0; p < u.grid.size(); ++p) {
            const Point x = u.grid.node(p);
            out << ts << ',' << format_double(x.x);
            if (u.grid.dimension == 2) out << ',' << format_double(x.y);
            out << ',' << format_double(u.values(static_cast<Eigen::Index>(p), k)) << "\n";
        }
    }
}

/// Inverse of write_field_csv; grids are reconstructed from the columns.
inline Field read_field_csv(const std::string& path) {
    const CsvTable t = read_csv(path);
    const bool two_d = t.header.size() == 4;
    const std::size_t ct = t.column("t"), cx = t.column("x"), cu = t.column("u");
    const std::size_t cy = two_d ? t.column("y") : 0;

    std::vector<double> times;
    for (const auto& row : t.rows)
        if (times.empty() || row[ct] != times.back()) times.push_back(row[ct]);
    if (times.size() < 3 || t.rows.size() % times.size() != 0)
        throw std::invalid_argument("csv: not a time-outer field dump: " + path);
    const std::size_t nodes = t.rows.size() / times.size();

    Field u;
    u.tgrid.horizon = times.back();
    u.tgrid.nodes = times;
    if (two_d) {
        std::size_t nx = 1;
        while (nx < nodes && t.rows[nx][cy] == t.rows[0][cy]) ++nx;
        u.grid = SpaceGrid::rectangle(t.rows[nx - 1][cx], t.rows[nodes - 1][cy], nx, nodes / nx);
    } else {
        u.grid = SpaceGrid::interval(t.rows[nodes - 1][cx], nodes);
    }
    u.values.resize(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(times.size()));
    for (std::size_t r = 0; r < t.rows.size(); ++r)
        u.values(static_cast<Eigen::Index>(r % nodes), static_cast<Eigen::Index>(r / nodes)) =
            t.rows[r][cu];
    return u;
}

} // namespace fracdiff
