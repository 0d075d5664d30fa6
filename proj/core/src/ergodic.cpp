#include "ergoswitch/ergodic.hpp"

#include <algorithm>
#include <cmath>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/error.hpp"
#include "ergoswitch/parabolic.hpp"

namespace ergoswitch {

double richardson_intercept(const std::vector<double>& betas, const std::vector<double>& lambdas) {
    if (betas.size() != lambdas.size() || betas.empty()) {
        throw InvalidArgument("richardson_intercept: mismatched or empty samples");
    }
    if (betas.size() == 1) return lambdas.front();
    const double count = static_cast<double>(betas.size());
    double mean_b = 0.0;
    double mean_l = 0.0;
    for (std::size_t s = 0; s < betas.size(); ++s) {
        mean_b += betas[s];
        mean_l += lambdas[s];
    }
    mean_b /= count;
    mean_l /= count;
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t s = 0; s < betas.size(); ++s) {
        sxx += (betas[s] - mean_b) * (betas[s] - mean_b);
        sxy += (betas[s] - mean_b) * (lambdas[s] - mean_l);
    }
    if (sxx == 0.0) return mean_l;
    return mean_l - (sxy / sxx) * mean_b;
}

ErgodicEstimate extract_ergodic(const SwitchingModel& model, const Grid& grid,
                                const std::vector<double>& beta_schedule, double x0, Regime i0,
                                const ErgodicOptions& options) {
    if (beta_schedule.empty()) throw InvalidArgument("extract_ergodic: empty beta schedule");
    for (std::size_t s = 0; s < beta_schedule.size(); ++s) {
        if (!(beta_schedule[s] > 0.0)) {
            throw InvalidArgument("extract_ergodic: discount factors must be positive");
        }
        if (s > 0 && !(beta_schedule[s] < beta_schedule[s - 1])) {
            throw InvalidArgument("extract_ergodic: beta schedule must be strictly decreasing");
        }
    }
    if (i0 < 0 || i0 >= model.regimes()) {
        throw InvalidArgument("extract_ergodic: reference regime out of range");
    }

    const DiscreteGenerator gen(model, grid);
    ErgodicEstimate out;
    out.beta_schedule = beta_schedule;
    out.reference_node = grid.nearest_node(x0);
    out.reference_regime = i0;
    for (double beta : beta_schedule) {
        EllipticSolve solve = solve_elliptic(gen, beta, options.n_schedule, options.tol,
                                             options.elliptic);
        out.lambda_per_beta.push_back(beta * solve.field(out.reference_node, i0));
        out.solves.push_back(std::move(solve));
    }
    const ValueField& smallest = out.solves.back().field;
    out.lambda = out.lambda_per_beta.back();
    out.phi = smallest;
    const double anchor = smallest(out.reference_node, i0);
    for (double& value : out.phi.values()) value -= anchor;
    out.phi(out.reference_node, i0) = 0.0;
    out.richardson_lambda = richardson_intercept(out.beta_schedule, out.lambda_per_beta);
    out.residual = ergodic_residual(out.richardson_lambda, out.phi, model, grid);
    return out;
}

double ergodic_residual(double lambda, const ValueField& phi, const SwitchingModel& model,
                        const Grid& grid) {
    const DiscreteGenerator gen(model, grid);
    ValueField h;
    gen.hamiltonian(phi, h);
    const ValueField mphi = switching_obstacle(phi, gen);
    double worst = 0.0;
    for (Regime i = 0; i < model.regimes(); ++i) {
        for (int k = grid.inner_begin(); k < grid.inner_end(); ++k) {
            const double hjb_branch = lambda - h(k, i);
            const double obstacle_branch = phi(k, i) - mphi(k, i);  // +inf when m = 1
            worst = std::max(worst, std::abs(std::min(hjb_branch, obstacle_branch)));
        }
    }
    return worst;
}

double lambda_probe_spread(const ValueField& v_beta, double beta,
                           const std::vector<Probe>& probes) {
    if (probes.size() < 2) throw InvalidArgument("lambda_probe_spread: need at least two probes");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& [k, i] : probes) {
        if (k < 0 || k >= v_beta.nodes() || i < 0 || i >= v_beta.regimes()) {
            throw InvalidArgument("lambda_probe_spread: probe out of range");
        }
        const double value = beta * v_beta(k, i);
        lo = std::min(lo, value);
        hi = std::max(hi, value);
    }
    return hi - lo;
}

double lambda_probe_spread(const SwitchingModel& model, const Grid& grid, double beta,
                           const std::vector<Probe>& probes, const ErgodicOptions& options) {
    const EllipticSolve solve =
        solve_elliptic(model, grid, beta, options.n_schedule, options.tol, options.elliptic);
    return lambda_probe_spread(solve.field, beta, probes);
}

double compare_parabolic(const SwitchingModel& model, const Grid& grid, double lambda,
                         double t_max, double x0, Regime i0) {
    const ParabolicRun run = solve_parabolic(model, grid, t_max, {}, x0, i0);
    return std::abs(run.averages.back().lambda - lambda);
}

}  // namespace ergoswitch
