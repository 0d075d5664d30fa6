#include "properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/dual_game.hpp"
#include "ergoswitch/parabolic.hpp"
#include "generators.hpp"

namespace props {

using namespace ergoswitch;

namespace {

void fail(Result& r, int c, const std::string& what) {
    if (r.failures++ == 0) r.first_failure = "case " + std::to_string(c) + ": " + what;
}

double scale_of(const ValueField& v) {
    double s = 1.0;
    for (double x : v.values()) s = std::max(s, std::abs(x));
    return s;
}

}  // namespace

Result parabolic_step_monotone(int cases, std::uint64_t seed) {
    Result r{"parabolic step monotone"};
    gen::Rng rng(seed);
    for (int c = 0; c < cases; ++c, ++r.cases) {
        const SwitchingModel model = gen::random_model(rng);
        const Grid grid = gen::random_grid(rng);
        const ValueField v = gen::random_field(rng, grid.size(), model.regimes());
        const ValueField w = gen::dominating_field(rng, v);
        const double dt = cfl_bound(model, grid) * gen::uniform(rng, 0.05, 1.0);
        const ValueField sv = step_parabolic(v, dt, model, grid);
        const ValueField sw = step_parabolic(w, dt, model, grid);
        const double tol = 1e-12 * scale_of(w);
        for (std::size_t e = 0; e < sv.values().size(); ++e) {
            const double drop = sv.values()[e] - sw.values()[e];
            r.worst = std::max(r.worst, drop);
            if (drop > tol) {
                fail(r, c, "step(W) < step(V) by " + std::to_string(drop));
                break;
            }
        }
    }
    return r;
}

Result projection_idempotent_monotone(int cases, std::uint64_t seed) {
    Result r{"project_obstacle idempotent and monotone"};
    gen::Rng rng(seed);
    for (int c = 0; c < cases; ++c, ++r.cases) {
        const SwitchingModel model = gen::random_model(rng, 5, 1);
        const Grid grid = gen::random_grid(rng);
        const ValueField v = gen::random_field(rng, grid.size(), model.regimes());
        const ValueField w = gen::dominating_field(rng, v);
        const ValueField pv = project_obstacle(v, model, grid);
        const ValueField ppv = project_obstacle(pv, model, grid);
        const ValueField pw = project_obstacle(w, model, grid);
        const ValueField mpv = switching_obstacle(pv, model, grid);
        const double tol = 1e-12 * scale_of(w);
        const double idem = sup_distance(pv, ppv);
        r.worst = std::max(r.worst, idem);
        if (idem > tol) {
            fail(r, c, "P(P(V)) != P(V), distance " + std::to_string(idem));
            continue;
        }
        for (std::size_t e = 0; e < pv.values().size(); ++e) {
            if (pv.values()[e] - pw.values()[e] > tol) {
                fail(r, c, "V <= W but P(V) > P(W)");
                break;
            }
            if (pv.values()[e] < v.values()[e] || mpv.values()[e] - pv.values()[e] > tol) {
                fail(r, c, "P(V) is not above V and MP(V)");
                break;
            }
        }
    }
    return r;
}

Result generator_annihilates_constants(int cases, std::uint64_t seed) {
    Result r{"generator annihilates constants"};
    gen::Rng rng(seed);
    for (int c = 0; c < cases; ++c, ++r.cases) {
        const SwitchingModel model = gen::random_model(rng);
        const Grid grid = gen::random_grid(rng);
        const double kappa = gen::uniform(rng, -1e3, 1e3);
        const ValueField v(grid.size(), model.regimes(), kappa);
        double worst = 0.0;
        for (Regime i = 0; i < model.regimes(); ++i) {
            for (double u : model.controls()) {
                for (double lv : apply_generator(v, model, grid, i, u)) {
                    worst = std::max(worst, std::abs(lv));
                }
            }
        }
        r.worst = std::max(r.worst, worst);
        if (worst > 1e-12) fail(r, c, "|L kappa| = " + std::to_string(worst));
    }
    return r;
}

Result hamiltonian_lower_envelope(int cases, std::uint64_t seed) {
    Result r{"hamiltonian lower envelope over controls"};
    gen::Rng rng(seed);
    for (int c = 0; c < cases; ++c, ++r.cases) {
        const SwitchingModel model = gen::random_model(rng, 2, 6);
        const Grid grid = gen::random_grid(rng);
        const ValueField v = gen::random_field(rng, grid.size(), model.regimes());
        const double tol = 1e-12 * scale_of(v) / (grid.h() * grid.h());
        bool ok = true;
        for (Regime i = 0; i < model.regimes() && ok; ++i) {
            const std::vector<double> h = hamiltonian(v, model, grid, i);
            std::vector<double> best(h.size(), std::numeric_limits<double>::infinity());
            for (double u : model.controls()) {
                const std::vector<double> lv = apply_generator(v, model, grid, i, u);
                for (int k = 0; k < grid.size(); ++k) {
                    const double candidate = lv[k] + model.running_reward(grid.node(k), i, u);
                    best[k] = std::min(best[k], candidate);
                    if (h[k] > candidate + tol) ok = false;
                }
            }
            for (int k = 0; k < grid.size(); ++k) {
                r.worst = std::max(r.worst, std::abs(best[k] - h[k]));
                if (std::abs(best[k] - h[k]) > tol) ok = false;
            }
        }
        if (!ok) fail(r, c, "H(V) is not the pointwise minimum over controls");
    }
    return r;
}

Result mc_deterministic(int cases, std::uint64_t seed) {
    Result r{"Monte Carlo bit-exact under a fixed seed"};
    gen::Rng rng(seed);
    for (int c = 0; c < cases; ++c, ++r.cases) {
        const SwitchingModel model = gen::random_model(rng);
        const int m = model.regimes();
        const int p = model.control_count();
        std::vector<double> xi(m);
        for (double& level : xi) level = gen::uniform(rng, 1e-3, 5.0);
        std::vector<double> nu(p);
        for (double& level : nu) level = gen::uniform(rng, 1.0, 4.0);
        const IntensityPolicy policy{RegimeIntensity::constant(xi), ControlIntensity::constant(nu)};

        McConfig cfg;
        cfg.n_paths = static_cast<std::size_t>(gen::pick(rng, 8, 48));
        cfg.dt = gen::uniform(rng, 0.01, 0.05);
        cfg.seed = rng();
        cfg.tail_tolerance = 1.0;
        const double beta = gen::uniform(rng, 0.5, 2.0);
        const double envelope = reward_envelope(model, cfg.envelope_domain);
        cfg.horizon = std::max(cfg.dt, std::log(std::max(envelope / beta, 1.0)) / beta + cfg.dt);
        const double x = gen::uniform(rng, -2.0, 2.0);
        const Regime i = gen::pick(rng, 0, m - 1);
        const int u = gen::pick(rng, 0, p - 1);

        cfg.threads = 1;
        const McEstimate a = estimate_payoff(model, x, i, u, policy, beta, cfg);
        cfg.threads = static_cast<unsigned>(gen::pick(rng, 2, 4));
        const McEstimate b = estimate_payoff(model, x, i, u, policy, beta, cfg);
        const double one = simulate_path(model, x, i, u, policy, beta, cfg, path_seed(cfg.seed, 3));
        const double two = simulate_path(model, x, i, u, policy, beta, cfg, path_seed(cfg.seed, 3));
        if (!(a == b) || std::memcmp(&one, &two, sizeof one) != 0) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "estimates differ: " << a.mean << " vs " << b.mean;
            fail(r, c, msg.str());
        }
    }
    return r;
}

Result mc_dt_halving(int cases, std::uint64_t seed, std::size_t paths_per_case) {
    Result r{"dt-halving Monte Carlo drift within 2 stderr"};
    gen::Rng rng(seed);
    const SwitchingModel model = preset("ou_quadratic");
    const IntensityPolicy policy{RegimeIntensity::constant({1.0}), ControlIntensity::constant({1.0})};
    for (int c = 0; c < cases; ++c, ++r.cases) {
        McConfig cfg;
        cfg.n_paths = paths_per_case;
        cfg.dt = gen::pick(rng, 0, 1) ? 0.02 : 0.04;
        cfg.seed = rng();
        const double beta = gen::uniform(rng, 0.75, 2.0);
        const double x = gen::uniform(rng, -1.5, 1.5);
        const double envelope = reward_envelope(model, cfg.envelope_domain);
        cfg.horizon = std::ceil(std::log(envelope / (beta * cfg.tail_tolerance)) / beta) + 1.0;
        const DtRefinement d = estimate_dt_refinement(model, x, 0, 0, policy, beta, cfg);
        const double ratio = std::abs(d.shift) / d.fine.std_error;
        r.worst = std::max(r.worst, ratio);
        if (!(ratio <= 2.0)) {
            std::ostringstream msg;
            msg << "shift " << d.shift << " vs stderr " << d.fine.std_error << " (x=" << x
                << ", beta=" << beta << ", dt=" << cfg.dt << ")";
            fail(r, c, msg.str());
        }
    }
    return r;
}

Result mc_dt_halving_reference(std::size_t paths, std::uint64_t seed) {
    Result r{"dt-halving Monte Carlo drift at x=0, beta=1"};
    const SwitchingModel model = preset("ou_quadratic");
    const IntensityPolicy policy{RegimeIntensity::constant({1.0}), ControlIntensity::constant({1.0})};
    McConfig cfg;
    cfg.n_paths = paths;
    cfg.dt = 0.01;
    cfg.horizon = 12.0;
    cfg.seed = seed;
    const DtRefinement d = estimate_dt_refinement(model, 0.0, 0, 0, policy, 1.0, cfg);
    r.cases = 1;
    r.worst = std::abs(d.shift) / d.fine.std_error;
    if (!(r.worst <= 2.0)) {
        std::ostringstream msg;
        msg << "shift " << d.shift << " vs stderr " << d.fine.std_error;
        fail(r, 0, msg.str());
    }
    return r;
}

}  // namespace props
