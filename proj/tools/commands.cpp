#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "ergoswitch/dual_game.hpp"
#include "ergoswitch/elliptic.hpp"
#include "ergoswitch/ergodic.hpp"
#include "ergoswitch/error.hpp"
#include "ergoswitch/parabolic.hpp"
#include "ergoswitch/validation.hpp"
#include "experiment_config.hpp"

namespace ergoswitch::cli {

namespace fs = std::filesystem;

Stage parse_stage(const std::string& text) {
    if (text == "parabolic") return Stage::parabolic;
    if (text == "elliptic") return Stage::elliptic;
    if (text == "ergodic") return Stage::ergodic;
    if (text == "dualgame") return Stage::dualgame;
    if (text == "all") return Stage::all;
    throw ConfigError("unknown stage '" + text +
                      "' (expected parabolic, elliptic, ergodic, dualgame or all)");
}

namespace {

// Short tag for file names: 10 -> "10", 0.05 -> "0.05".
std::string tag(double value) {
    std::ostringstream s;
    s << value;
    return s.str();
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << std::setprecision(17);
    return out;
}

std::vector<ValidationReport> run_validators(const ExperimentConfig& cfg,
                                             const SwitchingModel& model, const Grid& grid) {
    const Interval domain{cfg.grid.x_min, cfg.grid.x_max};
    return {
        check_dissipativity(model, cfg.validate.samples, cfg.validate.seed, domain),
        check_no_free_loop(model, cfg.validate.cost_samples, domain),
        check_terminal_consistency(model, grid),
    };
}

bool print_reports(const std::vector<ValidationReport>& reports, std::ostream& out) {
    bool ok = true;
    for (const auto& r : reports) {
        out << r << "\n";
        ok = ok && r.passed;
    }
    return ok;
}

void check_regime(Regime i, const SwitchingModel& model, const std::string& field) {
    if (i >= model.regimes()) {
        throw ConfigError("field '" + field + "': regime " + std::to_string(i + 1) +
                          " exceeds the model's " + std::to_string(model.regimes()));
    }
}

struct Summary {
    std::ostringstream body;
    std::optional<double> beta_v_beta;
    double beta_min = 0.0;
    std::optional<double> richardson;
    std::optional<double> parabolic;
    double t_max = 0.0;
};

class Runner {
public:
    Runner(const ExperimentConfig& cfg, const SwitchingModel& model, const Grid& grid,
           fs::path dir)
        : cfg_(cfg), model_(model), grid_(grid), dir_(std::move(dir)) {
        summary_.body << std::setprecision(17);
    }

    void parabolic(std::ostream& log) {
        const ParabolicSection p = cfg_.parabolic.value_or(ParabolicSection{});
        check_regime(p.probe_regime, model_, "parabolic.probe_regime");
        log << "parabolic: T = " << p.t_max << "\n";
        const ParabolicRun run =
            solve_parabolic(model_, grid_, p.t_max, p.snapshots, p.probe_x, p.probe_regime);
        auto csv = open_output(dir_ / "parabolic.csv");
        csv << "T,lambda_T,probe_value\n";
        for (const auto& avg : run.averages) {
            csv << avg.horizon << "," << avg.lambda << "," << avg.probe_value << "\n";
        }
        for (const auto& [t, field] : run.snapshots) {
            auto file = open_output(dir_ / ("parabolic_T" + tag(t) + ".csv"));
            write_value_field(file, field, grid_);
        }
        for (const auto& w : run.warnings) log << "parabolic: warning: " << w << "\n";
        summary_.parabolic = run.averages.back().lambda;
        summary_.t_max = p.t_max;
        auto& s = summary_.body;
        s << "[parabolic]\n";
        s << "dt = " << run.dt << "\n";
        s << "cfl_bound = " << run.cfl_bound << "\n";
        s << "probe = x " << tag(grid_.node(run.probe_node)) << ", regime " << run.probe_regime + 1
          << "\n";
        s << "lambda_T = " << run.averages.back().lambda << " (T = " << tag(p.t_max) << ")\n\n";
    }

    void elliptic(std::ostream& log) {
        const EllipticSection e = cfg_.elliptic.value_or(EllipticSection{});
        const std::vector<double> schedule =
            e.n_schedule.empty() ? geometric_schedule(12) : e.n_schedule;
        const DiscreteGenerator gen(model_, grid_);
        auto csv = open_output(dir_ / "elliptic.csv");
        csv << "beta,n,residual,iterations,sup_gap\n";
        auto& s = summary_.body;
        s << "[elliptic]\n";
        for (double beta : e.betas) {
            log << "elliptic: beta = " << beta << "\n";
            const EllipticSolve solve = solve_elliptic(gen, beta, schedule, e.tol);
            for (const auto& level : solve.levels) {
                csv << beta << "," << level.n << "," << level.residual << "," << level.iterations
                    << "," << level.sup_gap << "\n";
            }
            auto file = open_output(dir_ / ("elliptic_beta" + tag(beta) + ".csv"));
            write_value_field(file, solve.field, grid_);
            const auto lip = estimate_lipschitz(solve.field, grid_);
            s << "beta " << tag(beta) << ": n = " << solve.n_schedule.back()
              << ", cauchy_gap = " << solve.cauchy_gaps.back()
              << ", obstacle_residual = " << solve.obstacle_residual
              << ", regime_gap = " << regime_gap(solve.field)
              << ", inner_lipschitz = " << *std::max_element(lip.begin(), lip.end()) << "\n";
        }
        s << "\n";
    }

    void ergodic(std::ostream& log) {
        const ErgodicSection e = cfg_.ergodic.value_or(ErgodicSection{});
        check_regime(e.ref_regime, model_, "ergodic.ref_regime");
        ErgodicOptions options;
        if (cfg_.elliptic) {
            if (!cfg_.elliptic->n_schedule.empty()) options.n_schedule = cfg_.elliptic->n_schedule;
            options.tol = cfg_.elliptic->tol;
        }
        log << "ergodic: " << e.betas.size() << " discount factors\n";
        const ErgodicEstimate est =
            extract_ergodic(model_, grid_, e.betas, e.ref_x, e.ref_regime, options);

        std::vector<Probe> probes;
        for (double x : e.probe_x) {
            for (Regime i = 0; i < model_.regimes(); ++i) probes.emplace_back(grid_.nearest_node(x), i);
        }
        auto csv = open_output(dir_ / "ergodic.csv");
        csv << "beta,lambda_beta,probe_spread\n";
        for (std::size_t s = 0; s < est.beta_schedule.size(); ++s) {
            const double beta = est.beta_schedule[s];
            const double spread =
                probes.size() >= 2 ? lambda_probe_spread(est.solves[s].field, beta, probes) : 0.0;
            csv << beta << "," << est.lambda_per_beta[s] << "," << spread << "\n";
        }
        auto phi = open_output(dir_ / "ergodic_phi.csv");
        write_value_field(phi, est.phi, grid_);

        summary_.beta_v_beta = est.lambda;
        summary_.beta_min = est.beta_schedule.back();
        summary_.richardson = est.richardson_lambda;

        double t_max = cfg_.parabolic.value_or(ParabolicSection{}).t_max;
        double gap = 0.0;
        if (summary_.parabolic) {
            t_max = summary_.t_max;
            gap = std::abs(*summary_.parabolic - est.richardson_lambda);
        } else {
            gap = compare_parabolic(model_, grid_, est.richardson_lambda, t_max, e.ref_x,
                                    e.ref_regime);
        }
        auto& s = summary_.body;
        s << "[ergodic]\n";
        s << "reference = x " << tag(grid_.node(est.reference_node)) << ", regime "
          << est.reference_regime + 1 << "\n";
        s << "richardson_lambda = " << est.richardson_lambda << "\n";
        s << "residual = " << est.residual << "\n";
        s << "compare_parabolic_gap = " << gap << " (T = " << tag(t_max) << ")\n\n";
    }

    void dualgame(std::ostream& log) {
        if (!cfg_.mc) throw ConfigError("stage dualgame needs an [mc] section");
        const McSection& mc = *cfg_.mc;
        check_regime(mc.regime, model_, "mc.regime");
        if (mc.control >= static_cast<int>(model_.controls().size())) {
            throw ConfigError("field 'mc.control' exceeds the number of controls");
        }
        std::vector<RegimeIntensity> xi;
        for (const auto& levels : mc.xi_family) {
            if (static_cast<int>(levels.size()) != model_.regimes()) {
                throw ConfigError("field 'mc.xi_family': every group needs one level per regime");
            }
            xi.push_back(RegimeIntensity::constant(levels));
        }
        std::vector<ControlIntensity> nu;
        for (const auto& levels : mc.nu_family) {
            if (levels.size() != 1 && levels.size() != model_.controls().size()) {
                throw ConfigError(
                    "field 'mc.nu_family': every group needs one level or one per control");
            }
            nu.push_back(ControlIntensity::constant(levels));
        }
        McConfig config = mc.config;
        config.envelope_domain = {cfg_.grid.x_min, cfg_.grid.x_max};
        log << "dualgame: " << xi.size() << " x " << nu.size() << " intensity pairs, "
            << config.n_paths << " paths, seed " << config.seed << "\n";
        const SupInfResult result =
            sup_inf_search(model_, mc.x, mc.regime, mc.beta, xi, nu, config, mc.control);

        auto csv = open_output(dir_ / "dualgame.csv");
        csv << "xi_id,nu_id,mean,stderr,n_paths\n";
        for (const auto& entry : result.table) {
            csv << entry.xi_index + 1 << "," << entry.nu_index + 1 << "," << entry.estimate.mean
                << "," << entry.estimate.std_error << "," << entry.estimate.n_paths << "\n";
        }
        csv << "saddle,saddle," << result.saddle.mean << "," << result.saddle.std_error << ","
            << result.saddle.n_paths << "\n";

        auto& s = summary_.body;
        s << "[dualgame]\n";
        s << "seed = " << config.seed << "\n";
        s << "best_xi = " << result.best_xi + 1 << " " << xi[result.best_xi].label << "\n";
        s << "worst_nu = " << result.worst_nu + 1 << " " << nu[result.worst_nu].label << "\n";
        s << "saddle = " << result.saddle.mean << " +- " << result.saddle.std_error << "\n\n";
    }

    void write_summary(Stage stage) {
        auto out = open_output(dir_ / "summary.txt");
        out << "model = " << model_.name() << "\n";
        out << "grid = [" << grid_.x_min() << ", " << grid_.x_max() << "], " << grid_.size()
            << " nodes\n\n";
        out << summary_.body.str();

        struct Route {
            std::string name;
            std::optional<double> value;
        };
        const std::vector<Route> routes{{"beta_v_beta", summary_.beta_v_beta},
                                        {"richardson", summary_.richardson},
                                        {"parabolic_average", summary_.parabolic}};
        if (stage != Stage::all && !(summary_.beta_v_beta || summary_.parabolic)) return;
        out << "[lambda]\n";
        for (const auto& r : routes) {
            if (!r.value) continue;
            out << r.name << " = " << *r.value;
            if (r.name == "beta_v_beta") out << " (beta = " << tag(summary_.beta_min) << ")";
            if (r.name == "parabolic_average") out << " (T = " << tag(summary_.t_max) << ")";
            out << "\n";
        }
        for (std::size_t a = 0; a < routes.size(); ++a) {
            for (std::size_t b = a + 1; b < routes.size(); ++b) {
                if (!routes[a].value || !routes[b].value) continue;
                out << "gap " << routes[a].name << " " << routes[b].name << " = "
                    << std::abs(*routes[a].value - *routes[b].value) << "\n";
            }
        }
    }

private:
    const ExperimentConfig& cfg_;
    const SwitchingModel& model_;
    const Grid& grid_;
    fs::path dir_;
    Summary summary_;
};

}  // namespace

int cmd_validate(const fs::path& config, std::ostream& out, std::ostream& err) {
    try {
        const ExperimentConfig cfg = load_config(config);
        const SwitchingModel model = build_model(cfg);
        const Grid grid = build_grid(cfg);
        return print_reports(run_validators(cfg, model, grid), out) ? exit_code::ok
                                                                    : exit_code::failure;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "validate: " << e.what() << "\n";
        return exit_code::failure;
    }
}

int cmd_run(const fs::path& config, const RunOptions& options, std::ostream& out,
            std::ostream& err) {
    ExperimentConfig cfg;
    std::optional<SwitchingModel> model;
    std::optional<Grid> grid;
    try {
        cfg = load_config(config);
        if (options.seed && cfg.mc) cfg.mc->config.seed = *options.seed;
        if (options.out_dir) cfg.output_dir = *options.out_dir;
        if (options.stage == Stage::dualgame && !cfg.mc) {
            throw ConfigError("stage dualgame needs an [mc] section");
        }
        model.emplace(build_model(cfg));
        grid.emplace(build_grid(cfg));
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << "\n";
        return exit_code::usage;
    }

    try {
        if (!print_reports(run_validators(cfg, *model, *grid), out)) {
            if (!options.force) {
                err << "validation failed; rerun with --force to proceed anyway\n";
                return exit_code::failure;
            }
            err << "validation failed; continuing because of --force\n";
        }
    } catch (const std::exception& e) {
        err << "validate: " << e.what() << "\n";
        return exit_code::failure;
    }

    std::error_code ec;
    fs::create_directories(cfg.output_dir, ec);
    if (ec) {
        err << "cannot create output directory '" << cfg.output_dir.string()
            << "': " << ec.message() << "\n";
        return exit_code::usage;
    }

    Runner runner(cfg, *model, *grid, cfg.output_dir);
    const bool all = options.stage == Stage::all;
    struct Step {
        Stage stage;
        const char* name;
        void (Runner::*fn)(std::ostream&);
    };
    const Step steps[] = {{Stage::parabolic, "parabolic", &Runner::parabolic},
                          {Stage::elliptic, "elliptic", &Runner::elliptic},
                          {Stage::ergodic, "ergodic", &Runner::ergodic},
                          {Stage::dualgame, "dualgame", &Runner::dualgame}};
    for (const auto& step : steps) {
        if (!(all || options.stage == step.stage)) continue;
        // stage=all runs the Monte Carlo game only when it is configured
        if (all && step.stage == Stage::dualgame && !cfg.mc) continue;
        try {
            (runner.*step.fn)(out);
        } catch (const ConfigError& e) {
            err << "config error in stage " << step.name << ": " << e.what() << "\n";
            return exit_code::usage;
        } catch (const std::exception& e) {
            err << "stage " << step.name << " failed: " << e.what() << "\n";
            return exit_code::failure;
        }
    }
    try {
        runner.write_summary(options.stage);
    } catch (const std::exception& e) {
        err << "summary: " << e.what() << "\n";
        return exit_code::failure;
    }
    out << "outputs written to " << cfg.output_dir.string() << "\n";
    return exit_code::ok;
}

}  // namespace ergoswitch::cli
