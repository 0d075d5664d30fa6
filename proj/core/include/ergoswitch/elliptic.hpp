#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch {

/// n * sum_j [V(x,j) - V(x,i) - c(x,i,j)]^+ at every (node, regime).
ValueField penalty_term(const ValueField& v, const SwitchingModel& model, const Grid& grid,
                        double n);

/// Sup-norm of beta V - H(V) - penalty(V), over inner nodes or the whole grid.
double penalized_residual(const ValueField& v, const DiscreteGenerator& gen, double beta,
                          double n, bool inner_only = true);

struct PenalizedSolve {
    double beta = 0.0;
    double n_penalty = 0.0;
    ValueField field;
    double residual = 0.0;  // inner nodes
    std::size_t iterations = 0;
};

struct PenalizedOptions {
    std::size_t max_iterations = 5'000'000;
};

/// Solves the penalized discounted system by damped pseudo-time iteration
///   V <- V + dtau (H(V) - beta V+ + n sum_j [V_j - c - V+]^+),
/// with the generator explicit and the discount and penalty implicit at each
/// node (V+ is the updated value, found exactly from the piecewise-linear
/// local equation). dtau = 0.9 * cfl_bound, independent of beta and n; the
/// update is monotone and contracts in sup-norm. Iterates until the residual
/// over the whole grid is <= tol.
PenalizedSolve solve_penalized(const SwitchingModel& model, const Grid& grid, double beta,
                               double n, const std::optional<ValueField>& warm_start, double tol,
                               const PenalizedOptions& options = {});
PenalizedSolve solve_penalized(const DiscreteGenerator& gen, double beta, double n,
                               const std::optional<ValueField>& warm_start, double tol,
                               const PenalizedOptions& options = {});

struct PenaltyLevel {
    double n = 0.0;
    double residual = 0.0;
    std::size_t iterations = 0;
    double sup_gap = 0.0;  // distance to the previous level (0 for the first)
    ValueField field;
};

struct EllipticSolve {
    double beta = 0.0;
    ValueField field;
    std::vector<double> n_schedule;  // levels actually solved
    std::vector<double> cauchy_gaps;
    double obstacle_residual = 0.0;  // sup (MV - V)^+ over inner nodes
    double tol = 0.0;
    std::vector<PenaltyLevel> levels;
};

struct EllipticOptions {
    /// Residual target for each penalized solve; <= 0 selects 0.1 * beta * tol,
    /// which bounds the field error of every level by 0.1 * tol.
    double penalized_tol = 0.0;
    PenalizedOptions penalized;
};

/// {1, 2, 4, ..., 2^k}.
std::vector<double> geometric_schedule(int k);

/// Runs the penalized solver along an increasing schedule with warm starts and
/// stops once consecutive levels differ by at most `tol` in sup-norm. Throws
/// ConvergenceError if the schedule is exhausted first, or if a level drops
/// below its predecessor by more than 10 * tol.
EllipticSolve solve_elliptic(const SwitchingModel& model, const Grid& grid, double beta,
                             const std::vector<double>& n_schedule, double tol,
                             const EllipticOptions& options = {});
EllipticSolve solve_elliptic(const DiscreteGenerator& gen, double beta,
                             const std::vector<double>& n_schedule, double tol,
                             const EllipticOptions& options = {});

/// Largest |V(x+h,i) - V(x,i)| / h over adjacent inner nodes, per regime.
std::vector<double> estimate_lipschitz(const ValueField& field, const Grid& grid);

/// max over nodes and regime pairs of |V(x,i) - V(x,j)|.
double regime_gap(const ValueField& field);

/// sup over inner nodes of (MV - V)^+.
double obstacle_violation(const ValueField& field, const DiscreteGenerator& gen);

}  // namespace ergoswitch
