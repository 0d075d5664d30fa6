#pragma once

#include <limits>
#include <span>
#include <vector>

#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch {

/// Sentinel returned by the obstacle operator when no other regime exists.
inline constexpr double kInactiveObstacle = -std::numeric_limits<double>::infinity();

/// Three-point row of the discrete generator at one node, ghost nodes folded in.
/// Upwind first difference for the drift, central second difference for the
/// diffusion. The row acts as lower*(V(k-1)-V(k)) + upper*(V(k+1)-V(k)), so
/// diag = -(lower + upper); at the edges the coefficient pointing outside the
/// grid is zero. The scheme is monotone iff lower, upper >= 0.
struct Stencil {
    double lower = 0.0;
    double diag = 0.0;
    double upper = 0.0;
};

Stencil generator_stencil(const SwitchingModel& model, const Grid& grid, int k, Regime i,
                          double u);

/// Precomputed stencils, running rewards and switching costs for a (model, grid) pair.
/// All solvers evaluate the Hamiltonian through this table.
class DiscreteGenerator {
public:
    DiscreteGenerator(const SwitchingModel& model, const Grid& grid);

    const SwitchingModel& model() const noexcept { return *model_; }
    const Grid& grid() const noexcept { return *grid_; }
    int nodes() const noexcept { return nodes_; }
    int regimes() const noexcept { return regimes_; }
    int controls() const noexcept { return controls_; }

    const Stencil& stencil(int k, Regime i, int u_idx) const noexcept {
        return stencils_[slot(k, i, u_idx)];
    }
    double reward(int k, Regime i, int u_idx) const noexcept { return rewards_[slot(k, i, u_idx)]; }
    double cost(int k, Regime from, Regime to) const noexcept {
        return costs_[(static_cast<std::size_t>(k) * regimes_ + from) * regimes_ + to];
    }

    /// L^{i,u} V at every node.
    void apply(const ValueField& v, Regime i, int u_idx, std::span<double> out) const;

    /// min_u [L^{i,u} V + f(., i, u)] at every node; ties go to the lowest index.
    void hamiltonian(const ValueField& v, Regime i, std::span<double> out,
                     std::span<int> argmin = {}) const;
    void hamiltonian(const ValueField& v, ValueField& out) const;

    /// max over (k, i, u) of sigma^2/h^2 + |b|/h.
    double max_rate() const noexcept { return max_rate_; }

private:
    std::size_t slot(int k, Regime i, int u_idx) const noexcept {
        return (static_cast<std::size_t>(i) * controls_ + u_idx) * nodes_ + k;
    }

    const SwitchingModel* model_;
    const Grid* grid_;
    int nodes_;
    int regimes_;
    int controls_;
    std::vector<Stencil> stencils_;
    std::vector<double> rewards_;
    std::vector<double> costs_;
    double max_rate_ = 0.0;
};

std::vector<double> apply_generator(const ValueField& v, const SwitchingModel& model,
                                    const Grid& grid, Regime i, double u);

std::vector<double> hamiltonian(const ValueField& v, const SwitchingModel& model,
                                const Grid& grid, Regime i);

/// (MV)(x,i) = max_{j != i} [V(x,j) - c(x,i,j)], or kInactiveObstacle when m = 1.
ValueField switching_obstacle(const ValueField& v, const SwitchingModel& model, const Grid& grid);
ValueField switching_obstacle(const ValueField& v, const DiscreteGenerator& gen);

/// Smallest W >= V with W >= MW, by Gauss-Seidel sweeps over the regimes.
/// Throws ConvergenceError if the sweeps fail to settle within m+1 passes.
ValueField project_obstacle(const ValueField& v, const SwitchingModel& model, const Grid& grid);
void project_obstacle_in_place(ValueField& w, const DiscreteGenerator& gen);

/// g sampled on the grid.
ValueField sample_terminal(const SwitchingModel& model, const Grid& grid);

}  // namespace ergoswitch
