#pragma once

#include <utility>
#include <vector>

#include "ergoswitch/elliptic.hpp"
#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch {

/// Ergodic constant and corrector extracted by the vanishing-discount limit.
struct ErgodicEstimate {
    double lambda = 0.0;  // beta_min * V^beta_min(x0, i0)
    ValueField phi;       // V^beta_min - V^beta_min(x0, i0); zero at the reference
    std::vector<double> beta_schedule;
    std::vector<double> lambda_per_beta;
    double richardson_lambda = 0.0;  // intercept of the least-squares line through (beta, lambda_beta)
    double residual = 0.0;           // ergodic_residual(richardson_lambda, phi)
    int reference_node = 0;
    Regime reference_regime = 0;
    std::vector<EllipticSolve> solves;  // one per beta, same order as the schedule
};

struct ErgodicOptions {
    std::vector<double> n_schedule = geometric_schedule(12);
    double tol = 5e-4;
    EllipticOptions elliptic;
};

/// Least-squares intercept of lambda_beta ~ lambda + a * beta.
double richardson_intercept(const std::vector<double>& betas, const std::vector<double>& lambdas);

ErgodicEstimate extract_ergodic(const SwitchingModel& model, const Grid& grid,
                                const std::vector<double>& beta_schedule, double x0, Regime i0,
                                const ErgodicOptions& options = {});

/// sup over inner nodes and regimes of |min(lambda - H(phi), phi - M phi)|.
double ergodic_residual(double lambda, const ValueField& phi, const SwitchingModel& model,
                        const Grid& grid);

using Probe = std::pair<int, Regime>;  // (node, regime)

/// max - min of beta V^beta over the probes.
double lambda_probe_spread(const ValueField& v_beta, double beta, const std::vector<Probe>& probes);
double lambda_probe_spread(const SwitchingModel& model, const Grid& grid, double beta,
                           const std::vector<Probe>& probes, const ErgodicOptions& options = {});

/// |V(t_max, x0, i0) / t_max - lambda| from a fresh parabolic run.
double compare_parabolic(const SwitchingModel& model, const Grid& grid, double lambda,
                         double t_max, double x0, Regime i0);

}  // namespace ergoswitch
