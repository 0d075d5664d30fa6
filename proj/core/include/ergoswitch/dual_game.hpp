#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "ergoswitch/model.hpp"
#include "ergoswitch/validation.hpp"

namespace ergoswitch {

struct McConfig {
    std::size_t n_paths = 10'000;
    double dt = 0.01;
    double horizon = 12.0;
    std::uint64_t seed = 1;
    /// Discretised jump measure on the control set; empty means uniform with total mass 1.
    std::vector<double> theta_mu_weights;
    /// Bound on exp(-beta * horizon) * sup|f| / beta, checked before simulating.
    double tail_tolerance = 1e-2;
    /// Domain on which sup|f| is estimated for the tail check.
    Interval envelope_domain{};
    /// Worker threads; 0 uses the hardware concurrency. Results do not depend on it.
    unsigned threads = 0;
};

/// Regime-jump intensities xi(x, i) toward each target regime, valued in (0, n_bound].
struct RegimeIntensity {
    std::function<void(double x, Regime i, std::span<double> rates)> rates;
    double n_bound = 1.0;
    std::string label;

    /// xi(x, i)_j = levels[j] for every (x, i).
    static RegimeIntensity constant(std::vector<double> levels);
};

/// Control-jump intensity tilts nu(x, l), valued in [1, k_bound + 1].
struct ControlIntensity {
    std::function<double(double x, int control)> rate;
    double k_bound = 0.0;
    std::string label;

    /// A single level applies to every control; otherwise one level per control.
    static ControlIntensity constant(std::vector<double> levels);
};

struct IntensityPolicy {
    RegimeIntensity xi;
    ControlIntensity nu;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;

    friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

/// Seed of path `index` derived from the master seed (splitmix64 counter hash).
std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index);

/// One Euler-Maruyama path of the randomized forward system (X, I, Gamma) under
/// the given intensities; returns
///   sum_k e^{-beta t_k} f(X_k, I_k, Gamma_k) dt - sum_jumps e^{-beta tau} c(X_tau, I_tau-, j).
/// Every step consumes the same random numbers whatever the intensities: one
/// normal, m + 1 uniforms for the regime clocks, p + 1 uniforms for the control clocks.
double simulate_path(const SwitchingModel& model, double x, Regime i, int u_idx,
                     const IntensityPolicy& policy, double beta, const McConfig& cfg,
                     std::uint64_t seed);

/// Mean and standard error over cfg.n_paths paths seeded by path_seed(cfg.seed, p).
McEstimate estimate_payoff(const SwitchingModel& model, double x, Regime i, int u_idx,
                           const IntensityPolicy& policy, double beta, const McConfig& cfg);

/// Estimates at cfg.dt and cfg.dt / 2 on coupled paths: each coarse Brownian
/// increment is the sum of the two fine ones and the coarse jump clocks reuse
/// the first fine substep's uniforms.
struct DtRefinement {
    McEstimate coarse;
    McEstimate fine;
    double shift = 0.0;         // fine.mean - coarse.mean
    double shift_stderr = 0.0;  // standard error of the pathwise difference
};
DtRefinement estimate_dt_refinement(const SwitchingModel& model, double x, Regime i, int u_idx,
                                    const IntensityPolicy& policy, double beta,
                                    const McConfig& cfg);

struct SupInfEntry {
    std::size_t xi_index = 0;
    std::size_t nu_index = 0;
    McEstimate estimate;
};

struct SupInfResult {
    std::size_t best_xi = 0;
    std::size_t worst_nu = 0;
    McEstimate saddle;
    std::vector<SupInfEntry> table;  // every (xi, nu) pair, xi-major
};

/// Finite sup over xi of inf over nu of estimate_payoff, with common random
/// numbers across pairs. Ties go to the lowest index. u_idx < 0 starts Gamma
/// at the middle control.
SupInfResult sup_inf_search(const SwitchingModel& model, double x, Regime i, double beta,
                            const std::vector<RegimeIntensity>& xi_family,
                            const std::vector<ControlIntensity>& nu_family, const McConfig& cfg,
                            int u_idx = -1);

/// Second moments E|X_t|^2 at t = 1, 2, 4, 8 (ladder values in witness_points);
/// passes iff the largest is at most 4 * E|X_1|^2.
ValidationReport check_moment_bound(const SwitchingModel& model, double x, Regime i, int u_idx,
                                    const IntensityPolicy& policy, const McConfig& cfg);

/// sup |f| over the envelope domain, regimes and controls (201 sample points).
double reward_envelope(const SwitchingModel& model, Interval domain);

}  // namespace ergoswitch
