#include "ergoswitch/elliptic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <sstream>

#include "ergoswitch/error.hpp"
#include "ergoswitch/parabolic.hpp"

namespace ergoswitch {

namespace {

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

double local_penalty(const ValueField& v, const DiscreteGenerator& gen, int k, Regime i) {
    double sum = 0.0;
    for (Regime j = 0; j < gen.regimes(); ++j) {
        if (j != i) sum += positive_part(v(k, j) - v(k, i) - gen.cost(k, i, j));
    }
    return sum;
}

// Solves v (1 + damp) = q + weight * sum_r (a_r - v)^+ for v, where the
// obstacles a are sorted in decreasing order. The left side minus the right
// side is strictly increasing and piecewise linear, so the active set is the
// prefix of `a` lying above the solution.
double solve_local(double q, double damp, double weight, std::span<const double> a) {
    double active_sum = 0.0;
    for (std::size_t r = 0;; ++r) {
        const double v = (q + weight * active_sum) / (1.0 + damp + weight * static_cast<double>(r));
        if (r == a.size() || v >= a[r]) return v;
        active_sum += a[r];
    }
}

void check_inputs(const DiscreteGenerator& gen, double beta, double n, double tol) {
    if (!(beta > 0.0) || !std::isfinite(beta)) {
        throw InvalidArgument("penalized solve: beta must be positive");
    }
    if (!(n >= 0.0) || !std::isfinite(n)) {
        throw InvalidArgument("penalized solve: penalty level must be nonnegative");
    }
    if (!(tol > 0.0)) throw InvalidArgument("penalized solve: tol must be positive");
    (void)gen;
}

}  // namespace

ValueField penalty_term(const ValueField& v, const SwitchingModel& model, const Grid& grid,
                        double n) {
    if (!(n >= 0.0)) throw InvalidArgument("penalty_term: n must be nonnegative");
    const DiscreteGenerator gen(model, grid);
    ValueField out(grid.size(), model.regimes());
    if (v.nodes() != grid.size() || v.regimes() != model.regimes()) {
        throw InvalidArgument("penalty_term: field shape does not match grid/model");
    }
    if (n == 0.0) return out;
    for (Regime i = 0; i < model.regimes(); ++i)
        for (int k = 0; k < grid.size(); ++k) out(k, i) = n * local_penalty(v, gen, k, i);
    return out;
}

double penalized_residual(const ValueField& v, const DiscreteGenerator& gen, double beta,
                          double n, bool inner_only) {
    ValueField h;
    gen.hamiltonian(v, h);
    const int begin = inner_only ? gen.grid().inner_begin() : 0;
    const int end = inner_only ? gen.grid().inner_end() : gen.nodes();
    double worst = 0.0;
    for (Regime i = 0; i < gen.regimes(); ++i) {
        for (int k = begin; k < end; ++k) {
            const double r = beta * v(k, i) - h(k, i) - n * local_penalty(v, gen, k, i);
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

PenalizedSolve solve_penalized(const DiscreteGenerator& gen, double beta, double n,
                               const std::optional<ValueField>& warm_start, double tol,
                               const PenalizedOptions& options) {
    check_inputs(gen, beta, n, tol);
    const int nodes = gen.nodes();
    const int m = gen.regimes();

    ValueField v(nodes, m, 0.0);
    if (warm_start) {
        if (warm_start->nodes() != nodes || warm_start->regimes() != m) {
            throw InvalidArgument("penalized solve: warm start has the wrong shape");
        }
        v = *warm_start;
    }

    const double dtau = 0.9 * cfl_bound(gen);
    const double damp = dtau * beta;
    const double weight = dtau * n;
    ValueField h(nodes, m);
    ValueField next(nodes, m);
    std::vector<double> obstacles;
    obstacles.reserve(m);

    double residual = std::numeric_limits<double>::infinity();
    std::size_t iter = 0;
    for (;; ++iter) {
        gen.hamiltonian(v, h);
        residual = 0.0;
        for (Regime i = 0; i < m; ++i) {
            for (int k = 0; k < nodes; ++k) {
                const double vi = v(k, i);
                obstacles.clear();
                double penalty = 0.0;
                for (Regime j = 0; j < m; ++j) {
                    if (j == i) continue;
                    const double a = v(k, j) - gen.cost(k, i, j);
                    penalty += positive_part(a - vi);
                    obstacles.push_back(a);
                }
                const double r = beta * vi - h(k, i) - n * penalty;
                residual = std::max(residual, std::abs(r));
                if (weight > 0.0) {
                    std::sort(obstacles.begin(), obstacles.end(), std::greater<>());
                } else {
                    obstacles.clear();
                }
                next(k, i) = solve_local(vi + dtau * h(k, i), damp, weight, obstacles);
            }
        }
        if (!std::isfinite(residual)) {
            throw ConvergenceError("penalized solve diverged (non-finite residual)", residual);
        }
        if (residual <= tol) break;
        if (iter >= options.max_iterations) {
            std::ostringstream msg;
            msg << "penalized solve (beta=" << beta << ", n=" << n << ") hit the iteration cap "
                << options.max_iterations << " with residual " << residual;
            throw ConvergenceError(msg.str(), residual);
        }
        std::swap(v, next);
    }

    PenalizedSolve out;
    out.beta = beta;
    out.n_penalty = n;
    out.residual = penalized_residual(v, gen, beta, n, true);
    out.iterations = iter;
    out.field = std::move(v);
    return out;
}

PenalizedSolve solve_penalized(const SwitchingModel& model, const Grid& grid, double beta,
                               double n, const std::optional<ValueField>& warm_start, double tol,
                               const PenalizedOptions& options) {
    const DiscreteGenerator gen(model, grid);
    return solve_penalized(gen, beta, n, warm_start, tol, options);
}

std::vector<double> geometric_schedule(int k) {
    if (k < 0 || k > 60) throw InvalidArgument("geometric_schedule: k out of range");
    std::vector<double> out;
    for (int e = 0; e <= k; ++e) out.push_back(std::ldexp(1.0, e));
    return out;
}

EllipticSolve solve_elliptic(const DiscreteGenerator& gen, double beta,
                             const std::vector<double>& n_schedule, double tol,
                             const EllipticOptions& options) {
    if (n_schedule.size() < 2) {
        throw InvalidArgument("solve_elliptic: penalty schedule needs at least two levels");
    }
    for (std::size_t s = 1; s < n_schedule.size(); ++s) {
        if (!(n_schedule[s] > n_schedule[s - 1])) {
            throw InvalidArgument("solve_elliptic: penalty schedule must be increasing");
        }
    }
    if (!(tol > 0.0)) throw InvalidArgument("solve_elliptic: tol must be positive");
    const double inner_tol = options.penalized_tol > 0.0 ? options.penalized_tol : 0.1 * beta * tol;

    EllipticSolve out;
    out.beta = beta;
    out.tol = tol;
    std::optional<ValueField> warm;
    for (double n : n_schedule) {
        PenalizedSolve level = solve_penalized(gen, beta, n, warm, inner_tol, options.penalized);
        PenaltyLevel record{n, level.residual, level.iterations, 0.0, level.field};
        if (warm) {
            double drop = 0.0;
            const auto prev = warm->values();
            const auto cur = level.field.values();
            for (std::size_t e = 0; e < cur.size(); ++e) drop = std::max(drop, prev[e] - cur[e]);
            if (drop > 10.0 * tol) {
                std::ostringstream msg;
                msg << "solve_elliptic: penalized solutions decreased by " << drop << " from n="
                    << out.n_schedule.back() << " to n=" << n << " (discretization fault)";
                throw ConvergenceError(msg.str(), drop);
            }
            record.sup_gap = sup_distance(*warm, level.field);
            out.cauchy_gaps.push_back(record.sup_gap);
        }
        out.n_schedule.push_back(n);
        warm = level.field;
        out.levels.push_back(std::move(record));
        if (!out.cauchy_gaps.empty() && out.cauchy_gaps.back() <= tol) break;
    }
    if (out.cauchy_gaps.back() > tol) {
        std::ostringstream msg;
        msg << "solve_elliptic: penalty schedule exhausted at n=" << out.n_schedule.back()
            << " with gap " << out.cauchy_gaps.back() << " > tol " << tol;
        throw ConvergenceError(msg.str(), out.cauchy_gaps.back());
    }
    out.field = std::move(*warm);
    out.obstacle_residual = obstacle_violation(out.field, gen);
    return out;
}

EllipticSolve solve_elliptic(const SwitchingModel& model, const Grid& grid, double beta,
                             const std::vector<double>& n_schedule, double tol,
                             const EllipticOptions& options) {
    const DiscreteGenerator gen(model, grid);
    return solve_elliptic(gen, beta, n_schedule, tol, options);
}

std::vector<double> estimate_lipschitz(const ValueField& field, const Grid& grid) {
    if (field.nodes() != grid.size()) {
        throw InvalidArgument("estimate_lipschitz: field does not match grid");
    }
    std::vector<double> out(field.regimes(), 0.0);
    for (Regime i = 0; i < field.regimes(); ++i) {
        for (int k = grid.inner_begin(); k + 1 < grid.inner_end(); ++k) {
            out[i] = std::max(out[i], std::abs(field(k + 1, i) - field(k, i)) / grid.h());
        }
    }
    return out;
}

double regime_gap(const ValueField& field) {
    double worst = 0.0;
    for (int k = 0; k < field.nodes(); ++k)
        for (Regime i = 0; i < field.regimes(); ++i)
            for (Regime j = i + 1; j < field.regimes(); ++j)
                worst = std::max(worst, std::abs(field(k, i) - field(k, j)));
    return worst;
}

double obstacle_violation(const ValueField& field, const DiscreteGenerator& gen) {
    if (gen.regimes() == 1) return 0.0;
    const ValueField mv = switching_obstacle(field, gen);
    double worst = 0.0;
    for (Regime i = 0; i < gen.regimes(); ++i)
        for (int k = gen.grid().inner_begin(); k < gen.grid().inner_end(); ++k)
            worst = std::max(worst, mv(k, i) - field(k, i));
    return worst;
}

}  // namespace ergoswitch
