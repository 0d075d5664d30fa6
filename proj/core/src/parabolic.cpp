#include "ergoswitch/parabolic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

double cfl_bound(const DiscreteGenerator& gen) {
    const double rate = gen.max_rate();
    return rate > 0.0 ? 1.0 / rate : std::numeric_limits<double>::infinity();
}

double cfl_bound(const SwitchingModel& model, const Grid& grid) {
    return cfl_bound(DiscreteGenerator(model, grid));
}

void step_parabolic_in_place(ValueField& v, double dt, const DiscreteGenerator& gen,
                             ValueField& scratch) {
    const double bound = cfl_bound(gen);
    if (!(dt > 0.0) || dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step_parabolic: dt=" << dt << " outside (0, cfl_bound=" << bound << "]";
        throw InvalidArgument(msg.str());
    }
    gen.hamiltonian(v, scratch);
    auto out = v.values();
    const auto h = scratch.values();
    for (std::size_t n = 0; n < out.size(); ++n) out[n] += dt * h[n];
    project_obstacle_in_place(v, gen);
}

ValueField step_parabolic(const ValueField& v, double dt, const SwitchingModel& model,
                          const Grid& grid) {
    const DiscreteGenerator gen(model, grid);
    ValueField next = v;
    ValueField scratch;
    step_parabolic_in_place(next, dt, gen, scratch);
    return next;
}

ParabolicRun solve_parabolic(const SwitchingModel& model, const Grid& grid, double t_max,
                             std::vector<double> snapshot_times, double x0, Regime i0) {
    if (!(t_max > 0.0) || !std::isfinite(t_max)) {
        throw InvalidArgument("solve_parabolic: t_max must be positive");
    }
    if (i0 < 0 || i0 >= model.regimes()) {
        throw InvalidArgument("solve_parabolic: probe regime out of range");
    }
    for (double t : snapshot_times) {
        if (!(t > 0.0) || t > t_max) {
            throw InvalidArgument("solve_parabolic: snapshot times must lie in (0, t_max]");
        }
    }
    std::sort(snapshot_times.begin(), snapshot_times.end());
    snapshot_times.erase(std::unique(snapshot_times.begin(), snapshot_times.end()),
                         snapshot_times.end());
    if (snapshot_times.empty() || snapshot_times.back() < t_max) snapshot_times.push_back(t_max);

    const DiscreteGenerator gen(model, grid);
    ParabolicRun run;
    run.cfl_bound = cfl_bound(gen);
    run.probe_node = grid.nearest_node(x0);
    run.probe_regime = i0;

    ValueField v = sample_terminal(model, grid);
    const ValueField g = v;
    project_obstacle_in_place(v, gen);
    if (v != g) {
        run.warnings.push_back(
            "terminal reward violates g >= max_j[g_j - c]; initial field was projected");
    }

    const double target_dt = 0.9 * run.cfl_bound;
    ValueField scratch;
    double t = 0.0;
    for (double t_next : snapshot_times) {
        const double span = t_next - t;
        const long steps = std::max(1L, static_cast<long>(std::ceil(span / target_dt - 1e-9)));
        const double dt = span / static_cast<double>(steps);
        run.dt = std::max(run.dt, dt);
        for (long s = 0; s < steps; ++s) {
            step_parabolic_in_place(v, dt, gen, scratch);
            if (!v.all_finite()) {
                std::ostringstream msg;
                msg << "solve_parabolic: non-finite value at T=" << (t + (s + 1) * dt);
                throw EvaluationError(msg.str());
            }
        }
        t = t_next;
        const double probe = v(run.probe_node, i0);
        run.averages.push_back({t_next, probe / t_next, probe});
        run.snapshots.emplace_back(t_next, v);
    }
    return run;
}

}  // namespace ergoswitch
