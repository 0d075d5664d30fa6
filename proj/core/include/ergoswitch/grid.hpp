#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ergoswitch/model.hpp"

namespace ergoswitch {

enum class BoundaryMode {
    /// Ghost node mirrors the boundary value (zero slope beyond the edge).
    neumann_zero_slope,
    /// Ghost node is the linear extrapolation of the two edge nodes.
    dirichlet_extrapolate,
};

BoundaryMode parse_boundary_mode(std::string_view text);
std::string_view to_string(BoundaryMode mode);

/// Equispaced truncation of the real line.
class Grid {
public:
    Grid(double x_min, double x_max, int n_nodes,
         BoundaryMode boundary = BoundaryMode::neumann_zero_slope);

    double x_min() const noexcept { return x_min_; }
    double x_max() const noexcept { return x_max_; }
    int size() const noexcept { return n_nodes_; }
    double h() const noexcept { return h_; }
    BoundaryMode boundary() const noexcept { return boundary_; }

    double node(int k) const noexcept { return x_min_ + k * h_; }
    int nearest_node(double x) const noexcept;

    /// First and one-past-last node of the central 60% of the domain, the
    /// region where truncation error is negligible and fields are assessed.
    int inner_begin() const noexcept { return inner_begin_; }
    int inner_end() const noexcept { return inner_end_; }
    bool is_inner(int k) const noexcept { return k >= inner_begin_ && k < inner_end_; }

private:
    double x_min_;
    double x_max_;
    int n_nodes_;
    double h_;
    BoundaryMode boundary_;
    int inner_begin_ = 0;
    int inner_end_ = 0;
};

inline Grid build_grid(double x_min, double x_max, int n_nodes,
                       BoundaryMode boundary = BoundaryMode::neumann_zero_slope) {
    return Grid(x_min, x_max, n_nodes, boundary);
}

/// Real array indexed by (node, regime), stored regime-major.
class ValueField {
public:
    ValueField() = default;
    ValueField(int n_nodes, int regimes, double fill = 0.0);

    int nodes() const noexcept { return n_nodes_; }
    int regimes() const noexcept { return regimes_; }

    double& operator()(int k, Regime i) noexcept { return values_[index(k, i)]; }
    double operator()(int k, Regime i) const noexcept { return values_[index(k, i)]; }

    std::span<double> regime(Regime i) noexcept {
        return {values_.data() + static_cast<std::size_t>(i) * n_nodes_,
                static_cast<std::size_t>(n_nodes_)};
    }
    std::span<const double> regime(Regime i) const noexcept {
        return {values_.data() + static_cast<std::size_t>(i) * n_nodes_,
                static_cast<std::size_t>(n_nodes_)};
    }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    friend bool operator==(const ValueField&, const ValueField&) = default;

private:
    std::size_t index(int k, Regime i) const noexcept {
        return static_cast<std::size_t>(i) * n_nodes_ + k;
    }

    int n_nodes_ = 0;
    int regimes_ = 0;
    std::vector<double> values_;
};

/// Sup-norm of a - b (optionally restricted to inner nodes).
double sup_distance(const ValueField& a, const ValueField& b, const Grid* inner_of = nullptr);

/// Columnar text: header `x,regime_1,...,regime_m`, one row per node, 17 significant digits.
void write_value_field(std::ostream& out, const ValueField& field, const Grid& grid);
void write_value_field(const std::string& path, const ValueField& field, const Grid& grid);
/// Parses the format written by write_value_field; node coordinates must match the grid.
ValueField read_value_field(std::istream& in, const Grid& grid);

}  // namespace ergoswitch
