#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch {

/// Largest stable explicit step: 1 / max over (node, regime, control) of sigma^2/h^2 + |b|/h.
double cfl_bound(const SwitchingModel& model, const Grid& grid);
double cfl_bound(const DiscreteGenerator& gen);

/// One explicit Euler step in T followed by the switching projection.
/// Throws InvalidArgument when dt exceeds the CFL bound.
ValueField step_parabolic(const ValueField& v, double dt, const SwitchingModel& model,
                          const Grid& grid);
void step_parabolic_in_place(ValueField& v, double dt, const DiscreteGenerator& gen,
                             ValueField& scratch);

struct LongRunAverage {
    double horizon;
    double lambda;       // V(T, x0, i0) / T
    double probe_value;  // V(T, x0, i0)
};

struct ParabolicRun {
    std::vector<std::pair<double, ValueField>> snapshots;
    std::vector<LongRunAverage> averages;
    double dt = 0.0;  // largest step actually used
    double cfl_bound = 0.0;
    int probe_node = 0;
    Regime probe_regime = 0;
    std::vector<std::string> warnings;
};

/// Marches V(T) from the projected terminal reward up to t_max. Snapshots are
/// recorded at every requested time in (0, t_max] and always at t_max. The
/// step is 0.9 * cfl_bound, shortened inside each interval so that snapshot
/// times are hit exactly.
ParabolicRun solve_parabolic(const SwitchingModel& model, const Grid& grid, double t_max,
                             std::vector<double> snapshot_times, double x0, Regime i0);

}  // namespace ergoswitch
