#pragma once

// Random models and fields for the property checks.

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int pick(Rng& rng, int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct ModelParams {
    int regimes;
    std::vector<double> controls;
    std::vector<double> mean_reversion;  // per regime, > 0
    std::vector<double> wiggle;          // amplitude of a sin(x) drift term
    std::vector<double> control_push;    // drift sensitivity to u
    std::vector<double> vol;             // base diffusion
    std::vector<double> vol_slope;       // diffusion = vol + vol_slope * tanh(x)
    std::vector<double> reward_level;
    std::vector<double> reward_slope;
    std::vector<double> costs;  // m x m, zero diagonal, positive off-diagonal
};

// Smooth coefficients with random shapes; switching costs are positive so
// every cycle costs something. Diffusion may vanish in places.
inline ergoswitch::SwitchingModel random_model(Rng& rng, int max_regimes = 3,
                                               int max_controls = 3) {
    auto p = std::make_shared<ModelParams>();
    p->regimes = pick(rng, 1, max_regimes);
    const int n_controls = pick(rng, 1, max_controls);
    for (int l = 0; l < n_controls; ++l) p->controls.push_back(uniform(rng, -1.0, 1.0));
    std::sort(p->controls.begin(), p->controls.end());
    for (int i = 0; i < p->regimes; ++i) {
        p->mean_reversion.push_back(uniform(rng, 0.5, 2.0));
        p->wiggle.push_back(uniform(rng, -0.4, 0.4));
        p->control_push.push_back(uniform(rng, -1.0, 1.0));
        p->vol.push_back(uniform(rng, 0.0, 1.2));
        p->vol_slope.push_back(uniform(rng, -0.3, 0.3));
        p->reward_level.push_back(uniform(rng, -2.0, 2.0));
        p->reward_slope.push_back(uniform(rng, -1.0, 1.0));
    }
    const int m = p->regimes;
    p->costs.assign(static_cast<std::size_t>(m * m), 0.0);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) p->costs[i * m + j] = uniform(rng, 0.05, 1.0);

    ergoswitch::ModelCoefficients c{
        [p](double x, int i, double u) {
            return -p->mean_reversion[i] * x + p->wiggle[i] * std::sin(x) + p->control_push[i] * u;
        },
        [p](double x, int i, double u) {
            return p->vol[i] + p->vol_slope[i] * std::tanh(x) + 0.1 * u * u;
        },
        [p](double x, int i, double u) {
            return p->reward_level[i] + p->reward_slope[i] * std::sin(x) + u * x * 0.5;
        },
        [p](double, int i, int j) { return p->costs[i * p->regimes + j]; },
        [p](double x, int i) { return 0.1 * p->reward_level[i] * std::cos(x); },
    };
    return ergoswitch::SwitchingModel("random", m, p->controls, std::move(c), 0.1, 1.5, true);
}

inline ergoswitch::Grid random_grid(Rng& rng) {
    const double half = uniform(rng, 1.0, 6.0);
    const int nodes = pick(rng, 5, 80);
    const auto mode = pick(rng, 0, 1) ? ergoswitch::BoundaryMode::neumann_zero_slope
                                      : ergoswitch::BoundaryMode::dirichlet_extrapolate;
    return ergoswitch::Grid(-half, half, nodes, mode);
}

inline ergoswitch::ValueField random_field(Rng& rng, int nodes, int regimes, double scale = 5.0) {
    ergoswitch::ValueField v(nodes, regimes);
    for (double& x : v.values()) x = uniform(rng, -scale, scale);
    return v;
}

// v + a nonnegative perturbation, zero at a random subset of entries.
inline ergoswitch::ValueField dominating_field(Rng& rng, const ergoswitch::ValueField& v) {
    ergoswitch::ValueField w = v;
    for (double& x : w.values())
        if (pick(rng, 0, 2)) x += uniform(rng, 0.0, 2.0);
    return w;
}

}  // namespace gen
