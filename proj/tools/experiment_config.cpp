#include "experiment_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "ergoswitch/elliptic.hpp"
#include "ergoswitch/error.hpp"

namespace ergoswitch::cli {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(std::string_view text, const std::string& field) {
    const std::string t = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(value)) {
        throw ConfigError("field '" + field + "': expected a number, got '" + t + "'");
    }
    return value;
}

long parse_integer(std::string_view text, const std::string& field) {
    const std::string t = trim(text);
    long value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
        throw ConfigError("field '" + field + "': expected an integer, got '" + t + "'");
    }
    return value;
}

std::vector<double> parse_list(std::string_view text, const std::string& field) {
    std::string s(text);
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream in(s);
    std::vector<double> out;
    std::string token;
    while (in >> token) out.push_back(parse_number(token, field));
    return out;
}

std::vector<std::vector<double>> parse_groups(std::string_view text, char separator,
                                              const std::string& field) {
    std::vector<std::vector<double>> out;
    std::string s(text);
    std::istringstream in(s);
    std::string group;
    while (std::getline(in, group, separator)) {
        auto values = parse_list(group, field);
        if (values.empty()) throw ConfigError("field '" + field + "': empty group");
        out.push_back(std::move(values));
    }
    if (out.empty()) throw ConfigError("field '" + field + "': no values");
    return out;
}

// Section reader that records which keys were consumed so leftovers can be reported.
class Section {
public:
    Section(const pt::ptree& tree, std::string name) : tree_(tree), name_(std::move(name)) {}

    std::optional<std::string> raw(const std::string& key) {
        used_.insert(key);
        if (auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '\0'))) {
            return trim(*v);
        }
        return std::nullopt;
    }
    std::string field(const std::string& key) const { return name_ + "." + key; }

    double number(const std::string& key, double fallback) {
        auto v = raw(key);
        return v ? parse_number(*v, field(key)) : fallback;
    }
    long integer(const std::string& key, long fallback) {
        auto v = raw(key);
        return v ? parse_integer(*v, field(key)) : fallback;
    }
    std::vector<double> list(const std::string& key, std::vector<double> fallback) {
        auto v = raw(key);
        return v ? parse_list(*v, field(key)) : std::move(fallback);
    }
    void positive(const std::string& key, double value) const {
        if (!(value > 0.0)) throw ConfigError("field '" + field(key) + "' must be positive");
    }

    void reject_unknown() const {
        for (const auto& [key, value] : tree_) {
            if (!used_.count(key)) throw ConfigError("unknown field '" + field(key) + "'");
        }
    }

private:
    const pt::ptree& tree_;
    std::string name_;
    std::set<std::string> used_;
};

Regime regime_index(long one_based, const std::string& field) {
    if (one_based < 1) throw ConfigError("field '" + field + "': regimes are numbered from 1");
    return static_cast<Regime>(one_based - 1);
}

}  // namespace

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
    pt::ptree tree;
    try {
        pt::ini_parser::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(path.string() + ":" + std::to_string(e.line()) + ": " + e.message());
    }

    ExperimentConfig cfg;
    cfg.source = path;
    const auto base = path.parent_path();
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    static const std::set<std::string> known{"model", "grid", "validate", "parabolic",
                                             "elliptic", "ergodic", "mc", "output"};
    for (const auto& [name, child] : tree) {
        if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");
        if (child.data().size() > 0 && child.empty()) {
            throw ConfigError("key '" + name + "' must live inside a [section]");
        }
    }

    const auto model_tree = tree.get_child_optional("model");
    if (!model_tree) throw ConfigError("missing [model] section");
    {
        Section s(*model_tree, "model");
        auto preset = s.raw("preset");
        auto table = s.raw("table");
        if (preset.has_value() == table.has_value()) {
            throw ConfigError("[model] needs exactly one of 'preset' or 'table'");
        }
        if (preset) {
            cfg.model.preset = *preset;
        } else {
            cfg.model.table = resolve(*table);
            if (!std::filesystem::exists(cfg.model.table)) {
                throw ConfigError("field 'model.table': file '" + cfg.model.table.string() +
                                  "' does not exist");
            }
            auto cost = s.raw("switch_cost");
            if (!cost) throw ConfigError("field 'model.switch_cost' is required with 'table'");
            cfg.model.switch_cost = parse_groups(*cost, ';', s.field("switch_cost"));
            cfg.model.gamma = s.number("gamma", cfg.model.gamma);
            s.positive("gamma", cfg.model.gamma);
            cfg.model.lipschitz_f = s.number("lipschitz_f", cfg.model.lipschitz_f);
        }
        s.reject_unknown();
    }

    if (const auto t = tree.get_child_optional("grid")) {
        Section s(*t, "grid");
        cfg.grid.x_min = s.number("x_min", cfg.grid.x_min);
        cfg.grid.x_max = s.number("x_max", cfg.grid.x_max);
        cfg.grid.n_nodes = static_cast<int>(s.integer("n_nodes", cfg.grid.n_nodes));
        if (auto b = s.raw("boundary")) {
            try {
                cfg.grid.boundary = parse_boundary_mode(*b);
            } catch (const Error& e) {
                throw ConfigError("field 'grid.boundary': " + std::string(e.what()));
            }
        }
        if (!(cfg.grid.x_min < cfg.grid.x_max)) {
            throw ConfigError("fields 'grid.x_min'/'grid.x_max': need x_min < x_max");
        }
        if (cfg.grid.n_nodes < 3) throw ConfigError("field 'grid.n_nodes' must be >= 3");
        s.reject_unknown();
    }

    if (const auto t = tree.get_child_optional("validate")) {
        Section s(*t, "validate");
        cfg.validate.samples = static_cast<int>(s.integer("samples", cfg.validate.samples));
        cfg.validate.cost_samples =
            static_cast<int>(s.integer("cost_samples", cfg.validate.cost_samples));
        cfg.validate.seed = static_cast<std::uint64_t>(s.integer("seed", 0));
        if (cfg.validate.samples < 1) throw ConfigError("field 'validate.samples' must be >= 1");
        if (cfg.validate.cost_samples < 1) {
            throw ConfigError("field 'validate.cost_samples' must be >= 1");
        }
        s.reject_unknown();
    }

    if (const auto t = tree.get_child_optional("parabolic")) {
        Section s(*t, "parabolic");
        ParabolicSection p;
        p.t_max = s.number("t_max", p.t_max);
        s.positive("t_max", p.t_max);
        p.snapshots = s.list("snapshots", {});
        for (double snap : p.snapshots) {
            if (!(snap > 0.0) || snap > p.t_max) {
                throw ConfigError("field 'parabolic.snapshots': times must lie in (0, t_max]");
            }
        }
        p.probe_x = s.number("probe_x", p.probe_x);
        p.probe_regime = regime_index(s.integer("probe_regime", 1), s.field("probe_regime"));
        s.reject_unknown();
        cfg.parabolic = p;
    }

    if (const auto t = tree.get_child_optional("elliptic")) {
        Section s(*t, "elliptic");
        EllipticSection e;
        e.betas = s.list("betas", e.betas);
        for (double b : e.betas)
            if (!(b > 0.0)) throw ConfigError("field 'elliptic.betas': values must be positive");
        if (e.betas.empty()) throw ConfigError("field 'elliptic.betas' is empty");
        const long exponent = s.integer("n_max_exponent", 12);
        if (exponent < 1 || exponent > 40) {
            throw ConfigError("field 'elliptic.n_max_exponent' must be in [1, 40]");
        }
        e.n_schedule = s.list("n_schedule", geometric_schedule(static_cast<int>(exponent)));
        if (e.n_schedule.size() < 2) {
            throw ConfigError("field 'elliptic.n_schedule' needs at least two levels");
        }
        for (std::size_t k = 1; k < e.n_schedule.size(); ++k) {
            if (!(e.n_schedule[k] > e.n_schedule[k - 1])) {
                throw ConfigError("field 'elliptic.n_schedule' must be increasing");
            }
        }
        e.tol = s.number("tol", e.tol);
        s.positive("tol", e.tol);
        s.reject_unknown();
        cfg.elliptic = e;
    }

    if (const auto t = tree.get_child_optional("ergodic")) {
        Section s(*t, "ergodic");
        ErgodicSection e;
        e.betas = s.list("betas", e.betas);
        if (e.betas.empty()) throw ConfigError("field 'ergodic.betas' is empty");
        for (std::size_t k = 0; k < e.betas.size(); ++k) {
            if (!(e.betas[k] > 0.0) || (k > 0 && !(e.betas[k] < e.betas[k - 1]))) {
                throw ConfigError(
                    "field 'ergodic.betas' must be positive and strictly decreasing");
            }
        }
        e.ref_x = s.number("ref_x", e.ref_x);
        e.ref_regime = regime_index(s.integer("ref_regime", 1), s.field("ref_regime"));
        e.probe_x = s.list("probe_x", e.probe_x);
        if (e.probe_x.empty()) throw ConfigError("field 'ergodic.probe_x' is empty");
        s.reject_unknown();
        cfg.ergodic = e;
    }

    if (const auto t = tree.get_child_optional("mc")) {
        Section s(*t, "mc");
        McSection mc;
        mc.x = s.number("x", mc.x);
        mc.regime = regime_index(s.integer("regime", 1), s.field("regime"));
        const long control = s.integer("control", 0);
        if (control < 0) throw ConfigError("field 'mc.control' must be >= 1 (0 = middle)");
        mc.control = static_cast<int>(control) - 1;
        mc.beta = s.number("beta", mc.beta);
        s.positive("beta", mc.beta);
        const long paths = s.integer("n_paths", static_cast<long>(mc.config.n_paths));
        if (paths < 2) throw ConfigError("field 'mc.n_paths' must be >= 2");
        mc.config.n_paths = static_cast<std::size_t>(paths);
        mc.config.dt = s.number("dt", mc.config.dt);
        s.positive("dt", mc.config.dt);
        mc.config.horizon = s.number("horizon", mc.config.horizon);
        if (!(mc.config.horizon >= mc.config.dt)) {
            throw ConfigError("field 'mc.horizon' must be >= mc.dt");
        }
        mc.config.seed = static_cast<std::uint64_t>(s.integer("seed", 1));
        mc.config.theta_mu_weights = s.list("theta_mu_weights", {});
        mc.config.tail_tolerance = s.number("tail_tolerance", mc.config.tail_tolerance);
        s.positive("tail_tolerance", mc.config.tail_tolerance);
        mc.config.threads = static_cast<unsigned>(s.integer("threads", 0));
        auto xi = s.raw("xi_family");
        if (!xi) throw ConfigError("field 'mc.xi_family' is required in [mc]");
        mc.xi_family = parse_groups(*xi, '|', s.field("xi_family"));
        if (auto nu = s.raw("nu_family")) mc.nu_family = parse_groups(*nu, '|', s.field("nu_family"));
        for (const auto& g : mc.xi_family)
            for (double v : g)
                if (!(v > 0.0)) throw ConfigError("field 'mc.xi_family': intensities must be > 0");
        for (const auto& g : mc.nu_family)
            for (double v : g)
                if (!(v >= 1.0)) throw ConfigError("field 'mc.nu_family': tilts must be >= 1");
        s.reject_unknown();
        cfg.mc = mc;
    }

    if (const auto t = tree.get_child_optional("output")) {
        Section s(*t, "output");
        if (auto dir = s.raw("dir")) cfg.output_dir = resolve(*dir);
        s.reject_unknown();
    } else {
        cfg.output_dir = resolve(cfg.output_dir.string());
    }
    return cfg;
}

SwitchingModel build_model(const ExperimentConfig& config) {
    try {
        if (!config.model.preset.empty()) return preset(config.model.preset);
        return load_tabulated_model(config.model.table, config.model.switch_cost,
                                    config.model.gamma, config.model.lipschitz_f);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(std::string("[model]: ") + e.what());
    }
}

Grid build_grid(const ExperimentConfig& config) {
    return Grid(config.grid.x_min, config.grid.x_max, config.grid.n_nodes, config.grid.boundary);
}

namespace {

struct Table {
    std::vector<double> xs;
    std::vector<double> controls;
    int regimes = 0;
    // [regime][control][node]
    std::vector<std::vector<std::vector<double>>> drift, diffusion, reward;
    std::vector<std::vector<double>> terminal;  // [regime][node]

    // Piecewise-linear interpolation with linear extrapolation.
    double interpolate(const std::vector<double>& ys, double x) const {
        if (xs.size() == 1) return ys.front();
        std::size_t hi = std::upper_bound(xs.begin(), xs.end(), x) - xs.begin();
        hi = std::clamp<std::size_t>(hi, 1, xs.size() - 1);
        const std::size_t lo = hi - 1;
        const double w = (x - xs[lo]) / (xs[hi] - xs[lo]);
        return ys[lo] + w * (ys[hi] - ys[lo]);
    }
    int control_index(double u) const {
        const auto it = std::lower_bound(controls.begin(), controls.end(), u);
        if (it != controls.end() && *it == u) return static_cast<int>(it - controls.begin());
        throw InvalidArgument("tabulated model evaluated at a control outside its table");
    }
};

}  // namespace

SwitchingModel load_tabulated_model(const std::filesystem::path& path,
                                    std::vector<std::vector<double>> switch_cost, double gamma,
                                    double lipschitz_f) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open coefficient table '" + path.string() + "'");
    std::string line;
    std::getline(in, line);
    if (trim(line) != "x,regime,control,drift,diffusion,running_reward,terminal_reward") {
        throw ConfigError(path.string() +
                          ":1: header must be "
                          "x,regime,control,drift,diffusion,running_reward,terminal_reward");
    }
    struct Row {
        double x;
        int regime;
        double control;
        double b, s, f, g;
    };
    std::vector<Row> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        std::vector<std::string> cells;
        std::istringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        const std::string where = path.string() + ":" + std::to_string(line_no);
        if (cells.size() != 7) throw ConfigError(where + ": expected 7 columns");
        const long regime = parse_integer(cells[1], where + " regime");
        if (regime < 1) throw ConfigError(where + ": regimes are numbered from 1");
        rows.push_back({parse_number(cells[0], where + " x"), static_cast<int>(regime - 1),
                        parse_number(cells[2], where + " control"),
                        parse_number(cells[3], where + " drift"),
                        parse_number(cells[4], where + " diffusion"),
                        parse_number(cells[5], where + " running_reward"),
                        parse_number(cells[6], where + " terminal_reward")});
    }
    if (rows.empty()) throw ConfigError(path.string() + ": no coefficient rows");

    auto table = std::make_shared<Table>();
    for (const auto& r : rows) {
        table->xs.push_back(r.x);
        table->controls.push_back(r.control);
        table->regimes = std::max(table->regimes, r.regime + 1);
    }
    for (auto* v : {&table->xs, &table->controls}) {
        std::sort(v->begin(), v->end());
        v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    const int m = table->regimes;
    const std::size_t p = table->controls.size();
    const std::size_t nx = table->xs.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    auto cube = [&] {
        return std::vector(m, std::vector(p, std::vector<double>(nx, nan)));
    };
    table->drift = cube();
    table->diffusion = cube();
    table->reward = cube();
    table->terminal.assign(m, std::vector<double>(nx, nan));
    for (const auto& r : rows) {
        const std::size_t k = std::lower_bound(table->xs.begin(), table->xs.end(), r.x) -
                              table->xs.begin();
        const std::size_t l = std::lower_bound(table->controls.begin(), table->controls.end(),
                                               r.control) -
                              table->controls.begin();
        table->drift[r.regime][l][k] = r.b;
        table->diffusion[r.regime][l][k] = r.s;
        table->reward[r.regime][l][k] = r.f;
        table->terminal[r.regime][k] = r.g;
    }
    for (int i = 0; i < m; ++i) {
        for (std::size_t l = 0; l < p; ++l) {
            for (std::size_t k = 0; k < nx; ++k) {
                if (std::isnan(table->drift[i][l][k])) {
                    std::ostringstream msg;
                    msg << path.string() << ": missing row for x=" << table->xs[k]
                        << ", regime=" << (i + 1) << ", control=" << table->controls[l];
                    throw ConfigError(msg.str());
                }
            }
        }
    }

    if (static_cast<int>(switch_cost.size()) != m) {
        throw ConfigError("field 'model.switch_cost': expected " + std::to_string(m) +
                          " rows (one per regime)");
    }
    for (const auto& r : switch_cost) {
        if (static_cast<int>(r.size()) != m) {
            throw ConfigError("field 'model.switch_cost': every row needs " + std::to_string(m) +
                              " entries");
        }
    }

    ModelCoefficients c{
        [table](double x, Regime i, double u) {
            return table->interpolate(table->drift[i][table->control_index(u)], x);
        },
        [table](double x, Regime i, double u) {
            return table->interpolate(table->diffusion[i][table->control_index(u)], x);
        },
        [table](double x, Regime i, double u) {
            return table->interpolate(table->reward[i][table->control_index(u)], x);
        },
        [costs = std::move(switch_cost)](double, Regime i, Regime j) { return costs[i][j]; },
        [table](double x, Regime i) { return table->interpolate(table->terminal[i], x); },
    };
    return SwitchingModel(path.stem().string(), m, table->controls, std::move(c), gamma,
                          lipschitz_f, true);
}

}  // namespace ergoswitch::cli
