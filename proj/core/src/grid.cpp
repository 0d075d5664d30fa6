#include "ergoswitch/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

BoundaryMode parse_boundary_mode(std::string_view text) {
    if (text == "neumann_zero_slope") return BoundaryMode::neumann_zero_slope;
    if (text == "dirichlet_extrapolate") return BoundaryMode::dirichlet_extrapolate;
    throw InvalidArgument("unknown boundary mode '" + std::string(text) +
                          "' (expected neumann_zero_slope or dirichlet_extrapolate)");
}

std::string_view to_string(BoundaryMode mode) {
    switch (mode) {
        case BoundaryMode::neumann_zero_slope: return "neumann_zero_slope";
        case BoundaryMode::dirichlet_extrapolate: return "dirichlet_extrapolate";
    }
    return "unknown";
}

Grid::Grid(double x_min, double x_max, int n_nodes, BoundaryMode boundary)
    : x_min_(x_min), x_max_(x_max), n_nodes_(n_nodes), boundary_(boundary) {
    if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_min < x_max)) {
        std::ostringstream msg;
        msg << "grid: need finite x_min < x_max, got [" << x_min << ", " << x_max << "]";
        throw InvalidArgument(msg.str());
    }
    if (n_nodes < 3) {
        throw InvalidArgument("grid: need at least 3 nodes, got " + std::to_string(n_nodes));
    }
    h_ = (x_max - x_min) / (n_nodes - 1);

    const double centre = 0.5 * (x_min + x_max);
    const double half_width = 0.3 * (x_max - x_min) * (1.0 + 1e-12);
    inner_begin_ = n_nodes_;
    inner_end_ = 0;
    for (int k = 0; k < n_nodes_; ++k) {
        if (std::abs(node(k) - centre) <= half_width) {
            inner_begin_ = std::min(inner_begin_, k);
            inner_end_ = k + 1;
        }
    }
    if (inner_begin_ >= inner_end_) {
        inner_begin_ = n_nodes_ / 2;
        inner_end_ = inner_begin_ + 1;
    }
}

int Grid::nearest_node(double x) const noexcept {
    const double k = std::round((x - x_min_) / h_);
    return static_cast<int>(std::clamp(k, 0.0, static_cast<double>(n_nodes_ - 1)));
}

ValueField::ValueField(int n_nodes, int regimes, double fill)
    : n_nodes_(n_nodes),
      regimes_(regimes),
      values_(static_cast<std::size_t>(n_nodes) * static_cast<std::size_t>(regimes), fill) {}

bool ValueField::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double sup_distance(const ValueField& a, const ValueField& b, const Grid* inner_of) {
    if (a.nodes() != b.nodes() || a.regimes() != b.regimes()) {
        throw InvalidArgument("sup_distance: field shapes differ");
    }
    const int begin = inner_of ? inner_of->inner_begin() : 0;
    const int end = inner_of ? inner_of->inner_end() : a.nodes();
    double worst = 0.0;
    for (Regime i = 0; i < a.regimes(); ++i)
        for (int k = begin; k < end; ++k) worst = std::max(worst, std::abs(a(k, i) - b(k, i)));
    return worst;
}

void write_value_field(std::ostream& out, const ValueField& field, const Grid& grid) {
    out << "x";
    for (Regime i = 0; i < field.regimes(); ++i) out << ",regime_" << (i + 1);
    out << '\n' << std::setprecision(17);
    for (int k = 0; k < field.nodes(); ++k) {
        out << grid.node(k);
        for (Regime i = 0; i < field.regimes(); ++i) out << ',' << field(k, i);
        out << '\n';
    }
}

void write_value_field(const std::string& path, const ValueField& field, const Grid& grid) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    write_value_field(out, field, grid);
}

ValueField read_value_field(std::istream& in, const Grid& grid) {
    std::string line;
    if (!std::getline(in, line)) throw InvalidArgument("value field: missing header");
    const int regimes = static_cast<int>(std::count(line.begin(), line.end(), ','));
    if (line.rfind("x", 0) != 0 || regimes < 1) {
        throw InvalidArgument("value field: malformed header '" + line + "'");
    }
    ValueField field(grid.size(), regimes);
    for (int k = 0; k < grid.size(); ++k) {
        if (!std::getline(in, line)) {
            throw InvalidArgument("value field: expected " + std::to_string(grid.size()) +
                                  " rows, got " + std::to_string(k));
        }
        std::istringstream row(line);
        std::string cell;
        std::getline(row, cell, ',');
        const double x = std::stod(cell);
        if (std::abs(x - grid.node(k)) > 1e-9 * std::max(1.0, std::abs(x))) {
            throw InvalidArgument("value field: row " + std::to_string(k + 1) +
                                  " does not match grid node");
        }
        for (Regime i = 0; i < regimes; ++i) {
            if (!std::getline(row, cell, ',')) {
                throw InvalidArgument("value field: short row " + std::to_string(k + 1));
            }
            field(k, i) = std::stod(cell);
        }
    }
    return field;
}

}  // namespace ergoswitch
