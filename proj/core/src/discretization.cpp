#include "ergoswitch/discretization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

namespace {

void require_finite(double value, const char* what, double x, Regime i, double u) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << what << " is not finite at x=" << x << ", regime=" << (i + 1) << ", u=" << u;
        throw EvaluationError(msg.str());
    }
}

void require_shape(const ValueField& v, int nodes, int regimes) {
    if (v.nodes() != nodes || v.regimes() != regimes) {
        throw InvalidArgument("value field shape does not match grid/model");
    }
}

}  // namespace

Stencil generator_stencil(const SwitchingModel& model, const Grid& grid, int k, Regime i,
                          double u) {
    const double x = grid.node(k);
    const double h = grid.h();
    const double b = model.drift(x, i, u);
    const double sigma = model.diffusion(x, i, u);
    require_finite(b, "drift", x, i, u);
    require_finite(sigma, "diffusion", x, i, u);

    Stencil s;
    const double a = 0.5 * sigma * sigma / (h * h);
    s.lower = a;
    s.upper = a;
    if (b > 0.0) {
        s.upper += b / h;
    } else if (b < 0.0) {
        s.lower -= b / h;
    }

    const bool neumann = grid.boundary() == BoundaryMode::neumann_zero_slope;
    if (k == 0) {
        // ghost V(-1) = V(0)  or  2 V(0) - V(1)
        if (!neumann) s.upper -= s.lower;
        s.lower = 0.0;
    }
    if (k == grid.size() - 1) {
        if (!neumann) s.lower -= s.upper;
        s.upper = 0.0;
    }
    s.diag = -(s.lower + s.upper);
    return s;
}

DiscreteGenerator::DiscreteGenerator(const SwitchingModel& model, const Grid& grid)
    : model_(&model),
      grid_(&grid),
      nodes_(grid.size()),
      regimes_(model.regimes()),
      controls_(model.control_count()) {
    const std::size_t n = static_cast<std::size_t>(nodes_) * regimes_ * controls_;
    stencils_.resize(n);
    rewards_.resize(n);
    costs_.resize(static_cast<std::size_t>(nodes_) * regimes_ * regimes_);
    const double h = grid.h();
    const auto& us = model.controls();
    for (Regime i = 0; i < regimes_; ++i) {
        for (int l = 0; l < controls_; ++l) {
            for (int k = 0; k < nodes_; ++k) {
                const double x = grid.node(k);
                stencils_[slot(k, i, l)] = generator_stencil(model, grid, k, i, us[l]);
                const double f = model.running_reward(x, i, us[l]);
                require_finite(f, "running reward", x, i, us[l]);
                rewards_[slot(k, i, l)] = f;
                const double sigma = model.diffusion(x, i, us[l]);
                const double b = model.drift(x, i, us[l]);
                max_rate_ = std::max(max_rate_, sigma * sigma / (h * h) + std::abs(b) / h);
            }
        }
    }
    for (int k = 0; k < nodes_; ++k) {
        for (Regime i = 0; i < regimes_; ++i) {
            for (Regime j = 0; j < regimes_; ++j) {
                const double c = model.switch_cost(grid.node(k), i, j);
                require_finite(c, "switch cost", grid.node(k), i, j);
                costs_[(static_cast<std::size_t>(k) * regimes_ + i) * regimes_ + j] = c;
            }
        }
    }
}

void DiscreteGenerator::apply(const ValueField& v, Regime i, int u_idx,
                              std::span<double> out) const {
    require_shape(v, nodes_, regimes_);
    const auto vi = v.regime(i);
    for (int k = 0; k < nodes_; ++k) {
        const Stencil& s = stencil(k, i, u_idx);
        const double left = k > 0 ? vi[k - 1] : vi[k];
        const double right = k + 1 < nodes_ ? vi[k + 1] : vi[k];
        out[k] = s.lower * (left - vi[k]) + s.upper * (right - vi[k]);
    }
}

void DiscreteGenerator::hamiltonian(const ValueField& v, Regime i, std::span<double> out,
                                    std::span<int> argmin) const {
    require_shape(v, nodes_, regimes_);
    const auto vi = v.regime(i);
    for (int k = 0; k < nodes_; ++k) {
        const double dl = (k > 0 ? vi[k - 1] : vi[k]) - vi[k];
        const double dr = (k + 1 < nodes_ ? vi[k + 1] : vi[k]) - vi[k];
        double best = std::numeric_limits<double>::infinity();
        int best_idx = 0;
        for (int l = 0; l < controls_; ++l) {
            const std::size_t s_idx = slot(k, i, l);
            const Stencil& s = stencils_[s_idx];
            const double value = s.lower * dl + s.upper * dr + rewards_[s_idx];
            if (value < best) {
                best = value;
                best_idx = l;
            }
        }
        out[k] = best;
        if (!argmin.empty()) argmin[k] = best_idx;
    }
}

void DiscreteGenerator::hamiltonian(const ValueField& v, ValueField& out) const {
    if (out.nodes() != nodes_ || out.regimes() != regimes_) out = ValueField(nodes_, regimes_);
    for (Regime i = 0; i < regimes_; ++i) hamiltonian(v, i, out.regime(i));
}

std::vector<double> apply_generator(const ValueField& v, const SwitchingModel& model,
                                    const Grid& grid, Regime i, double u) {
    require_shape(v, grid.size(), model.regimes());
    std::vector<double> out(grid.size());
    const auto vi = v.regime(i);
    for (int k = 0; k < grid.size(); ++k) {
        const Stencil s = generator_stencil(model, grid, k, i, u);
        const double left = k > 0 ? vi[k - 1] : vi[k];
        const double right = k + 1 < grid.size() ? vi[k + 1] : vi[k];
        out[k] = s.lower * (left - vi[k]) + s.upper * (right - vi[k]);
    }
    return out;
}

std::vector<double> hamiltonian(const ValueField& v, const SwitchingModel& model,
                                const Grid& grid, Regime i) {
    const DiscreteGenerator gen(model, grid);
    std::vector<double> out(grid.size());
    gen.hamiltonian(v, i, out);
    return out;
}

ValueField switching_obstacle(const ValueField& v, const DiscreteGenerator& gen) {
    require_shape(v, gen.nodes(), gen.regimes());
    ValueField out(gen.nodes(), gen.regimes(), kInactiveObstacle);
    for (int k = 0; k < gen.nodes(); ++k) {
        for (Regime i = 0; i < gen.regimes(); ++i) {
            double best = kInactiveObstacle;
            for (Regime j = 0; j < gen.regimes(); ++j) {
                if (j != i) best = std::max(best, v(k, j) - gen.cost(k, i, j));
            }
            out(k, i) = best;
        }
    }
    return out;
}

ValueField switching_obstacle(const ValueField& v, const SwitchingModel& model, const Grid& grid) {
    const DiscreteGenerator gen(model, grid);
    return switching_obstacle(v, gen);
}

void project_obstacle_in_place(ValueField& w, const DiscreteGenerator& gen) {
    require_shape(w, gen.nodes(), gen.regimes());
    const int m = gen.regimes();
    if (m == 1) return;
    for (int k = 0; k < gen.nodes(); ++k) {
        bool settled = false;
        for (int sweep = 0; sweep <= m && !settled; ++sweep) {
            settled = true;
            for (Regime i = 0; i < m; ++i) {
                double target = w(k, i);
                for (Regime j = 0; j < m; ++j) {
                    if (j != i) target = std::max(target, w(k, j) - gen.cost(k, i, j));
                }
                if (target > w(k, i)) {
                    w(k, i) = target;
                    settled = false;
                }
            }
        }
        if (!settled) {
            std::ostringstream msg;
            msg << "no-free-loop violated numerically: obstacle projection did not settle at x="
                << gen.grid().node(k);
            throw ConvergenceError(msg.str(), 0.0);
        }
    }
}

ValueField project_obstacle(const ValueField& v, const SwitchingModel& model, const Grid& grid) {
    const DiscreteGenerator gen(model, grid);
    ValueField w = v;
    project_obstacle_in_place(w, gen);
    return w;
}

ValueField sample_terminal(const SwitchingModel& model, const Grid& grid) {
    ValueField g(grid.size(), model.regimes());
    for (Regime i = 0; i < model.regimes(); ++i) {
        for (int k = 0; k < grid.size(); ++k) {
            const double x = grid.node(k);
            const double value = model.terminal_reward(x, i);
            require_finite(value, "terminal reward", x, i, 0.0);
            g(k, i) = value;
        }
    }
    return g;
}

}  // namespace ergoswitch
