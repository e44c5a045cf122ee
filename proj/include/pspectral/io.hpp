#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pspectral/geometry.hpp"
#include "pspectral/prufer.hpp"

namespace pspectral {

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace detail

/// Write named columns as CSV with full round-trip precision.
inline void write_csv(std::ostream& os, const std::vector<std::string>& names,
                      const std::vector<const std::vector<double>*>& columns) {
    if (names.size() != columns.size())
        throw std::invalid_argument("write_csv: header/column mismatch");
    for (std::size_t j = 0; j < names.size(); ++j)
        os << (j ? "," : "") << names[j];
    os << "\n";
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (const auto* col : columns)
        if (col->size() != rows) throw std::invalid_argument("write_csv: ragged columns");
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < columns.size(); ++j)
            os << (j ? "," : "") << detail::format_double((*columns[j])[i]);
        os << "\n";
    }
}

/// Read a CSV with a header line into named columns.
inline std::map<std::string, std::vector<double>> read_csv(std::istream& is) {
    std::map<std::string, std::vector<double>> out;
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
    std::vector<std::string> names;
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' '))
                cell.pop_back();
            names.push_back(cell);
        }
    }
    for (const auto& n : names) out[n] = {};
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        std::size_t j = 0;
        while (std::getline(ss, cell, ',')) {
            if (j >= names.size()) throw std::invalid_argument("read_csv: ragged row");
            out[names[j]].push_back(std::stod(cell));
            ++j;
        }
        if (j != names.size()) throw std::invalid_argument("read_csv: ragged row");
    }
    return out;
}

/// Trajectory/model dump in the documented column order.
inline void write_model_csv(std::ostream& os, const ModelSolution& sol) {
    write_csv(os, {"t", "theta", "log_r", "w", "w_prime"},
              {&sol.t, &sol.theta, &sol.log_r, &sol.w, &sol.w_prime});
}

inline void write_trajectory_csv(std::ostream& os, const PruferTrajectory& tr) {
    write_csv(os, {"t", "theta", "log_r"}, {&tr.t, &tr.theta, &tr.log_r});
}

inline void write_surface_csv(std::ostream& os, const RevolutionSurface& surf) {
    write_csv(os,
              {"s", "k", "y", "y_prime", "f", "f_prime", "f_pp", "ric_radial",
               "ric_tangential"},
              {&surf.s_grid, &surf.k, &surf.y, &surf.y_prime, &surf.f, &surf.f_prime,
               &surf.f_double_prime, &surf.ric_f_radial, &surf.ric_f_tangential});
}

/// Weighted interval from CSV columns s, rho.
inline WeightedInterval read_interval_csv(std::istream& is, const PExponent& p) {
    auto cols = read_csv(is);
    if (!cols.count("s") || !cols.count("rho"))
        throw std::invalid_argument("interval CSV must have columns s, rho");
    return WeightedInterval(std::move(cols["s"]), std::move(cols["rho"]), p);
}

} // namespace pspectral
