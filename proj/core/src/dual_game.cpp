#include "ergoswitch/dual_game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

RegimeIntensity RegimeIntensity::constant(std::vector<double> levels) {
    if (levels.empty()) throw InvalidArgument("regime intensity: no levels");
    RegimeIntensity out;
    out.n_bound = *std::max_element(levels.begin(), levels.end());
    std::ostringstream label;
    label << "xi=(";
    for (std::size_t j = 0; j < levels.size(); ++j) label << (j ? " " : "") << levels[j];
    label << ")";
    out.label = label.str();
    out.rates = [levels = std::move(levels)](double, Regime, std::span<double> rates) {
        if (rates.size() != levels.size()) {
            throw InvalidArgument("regime intensity: level count does not match regime count");
        }
        std::copy(levels.begin(), levels.end(), rates.begin());
    };
    return out;
}

ControlIntensity ControlIntensity::constant(std::vector<double> levels) {
    if (levels.empty()) throw InvalidArgument("control intensity: no levels");
    ControlIntensity out;
    out.k_bound = std::max(0.0, *std::max_element(levels.begin(), levels.end()) - 1.0);
    std::ostringstream label;
    label << "nu=(";
    for (std::size_t l = 0; l < levels.size(); ++l) label << (l ? " " : "") << levels[l];
    label << ")";
    out.label = label.str();
    out.rate = [levels = std::move(levels)](double, int control) {
        if (levels.size() == 1) return levels.front();
        if (control < 0 || static_cast<std::size_t>(control) >= levels.size()) {
            throw InvalidArgument("control intensity: level count does not match control count");
        }
        return levels[control];
    };
    return out;
}

std::uint64_t path_seed(std::uint64_t master_seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(master_seed ^ mix(index));
}

double reward_envelope(const SwitchingModel& model, Interval domain) {
    constexpr int kSamples = 201;
    double worst = 0.0;
    for (int s = 0; s < kSamples; ++s) {
        const double x = domain.lo + (domain.hi - domain.lo) * s / (kSamples - 1.0);
        for (Regime i = 0; i < model.regimes(); ++i)
            for (double u : model.controls())
                worst = std::max(worst, std::abs(model.running_reward(x, i, u)));
    }
    return worst;
}

namespace {

struct StepNoise {
    double z = 0.0;
    std::vector<double> regime_u;
    double regime_tie = 0.0;
    std::vector<double> control_u;
    double control_tie = 0.0;
};

struct PathState {
    double x = 0.0;
    Regime regime = 0;
    int control = 0;
    double payoff = 0.0;
};

constexpr double kBoundSlack = 1e-12;

class PathEngine {
public:
    PathEngine(const SwitchingModel& model, const IntensityPolicy& policy, double beta,
               const McConfig& cfg)
        : model_(model),
          policy_(policy),
          beta_(beta),
          m_(model.regimes()),
          p_(model.control_count()),
          xi_(m_),
          fired_(std::max(m_, p_)) {
        if (!(beta > 0.0)) throw InvalidArgument("dual game: beta must be positive");
        if (!(cfg.dt > 0.0) || !(cfg.dt <= cfg.horizon)) {
            throw InvalidArgument("dual game: need 0 < dt <= horizon");
        }
        if (!policy.xi.rates || !policy.nu.rate) {
            throw InvalidArgument("dual game: intensity policy is incomplete");
        }
        if (cfg.theta_mu_weights.empty()) {
            weights_.assign(p_, 1.0 / p_);
        } else {
            weights_ = cfg.theta_mu_weights;
            if (static_cast<int>(weights_.size()) != p_) {
                throw InvalidArgument("dual game: theta_mu_weights must have one entry per control");
            }
            double total = 0.0;
            for (double w : weights_) {
                if (!(w >= 0.0)) throw InvalidArgument("dual game: negative theta_mu weight");
                total += w;
            }
            if (std::abs(total - 1.0) > 1e-9) {
                throw InvalidArgument("dual game: theta_mu_weights must sum to 1");
            }
        }
    }

    int regimes() const noexcept { return m_; }
    int controls() const noexcept { return p_; }

    void draw(std::mt19937_64& rng, std::normal_distribution<double>& normal,
              StepNoise& noise) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        noise.regime_u.resize(m_);
        noise.control_u.resize(p_);
        noise.z = normal(rng);
        for (double& u : noise.regime_u) u = unif(rng);
        noise.regime_tie = unif(rng);
        for (double& u : noise.control_u) u = unif(rng);
        noise.control_tie = unif(rng);
    }

    // Left-endpoint reward, Euler-Maruyama move, then at most one regime jump
    // and one control jump at the end of the step.
    void advance(PathState& s, const StepNoise& noise, double dt, double discount_now,
                 double discount_next, long step) {
        const double u = model_.controls()[s.control];
        s.payoff += discount_now * model_.running_reward(s.x, s.regime, u) * dt;
        const double b = model_.drift(s.x, s.regime, u);
        const double sigma = model_.diffusion(s.x, s.regime, u);
        const double x_next = s.x + b * dt + sigma * std::sqrt(dt) * noise.z;

        policy_.xi.rates(s.x, s.regime, xi_);
        int n_fired = 0;
        for (int j = 0; j < m_; ++j) {
            const double rate = xi_[j];
            if (!(rate > 0.0) || rate > policy_.xi.n_bound * (1.0 + kBoundSlack)) {
                std::ostringstream msg;
                msg << "regime intensity " << rate << " outside (0, " << policy_.xi.n_bound
                    << "] at step " << step;
                throw InvalidArgument(msg.str());
            }
            if (noise.regime_u[j] < -std::expm1(-rate * dt)) fired_[n_fired++] = j;
        }
        int regime_target = -1;
        if (n_fired > 0) {
            regime_target = fired_[std::min(n_fired - 1, static_cast<int>(noise.regime_tie * n_fired))];
        }

        n_fired = 0;
        for (int l = 0; l < p_; ++l) {
            const double tilt = policy_.nu.rate(s.x, l);
            if (!(tilt >= 1.0 - kBoundSlack) ||
                tilt > (policy_.nu.k_bound + 1.0) * (1.0 + kBoundSlack)) {
                std::ostringstream msg;
                msg << "control intensity " << tilt << " outside [1, " << policy_.nu.k_bound + 1.0
                    << "] at step " << step;
                throw InvalidArgument(msg.str());
            }
            if (noise.control_u[l] < -std::expm1(-tilt * weights_[l] * dt)) fired_[n_fired++] = l;
        }
        int control_target = -1;
        if (n_fired > 0) {
            control_target =
                fired_[std::min(n_fired - 1, static_cast<int>(noise.control_tie * n_fired))];
        }

        if (regime_target >= 0) {
            s.payoff -= discount_next * model_.switch_cost(x_next, s.regime, regime_target);
            s.regime = regime_target;
        }
        if (control_target >= 0) s.control = control_target;
        s.x = x_next;
        if (!std::isfinite(s.x) || !std::isfinite(s.payoff)) {
            std::ostringstream msg;
            msg << "dual game: non-finite state at step " << step;
            throw EvaluationError(msg.str());
        }
    }

    double beta() const noexcept { return beta_; }

private:
    const SwitchingModel& model_;
    const IntensityPolicy& policy_;
    double beta_;
    int m_;
    int p_;
    std::vector<double> weights_;
    std::vector<double> xi_;
    std::vector<int> fired_;
};

long step_count(double horizon, double dt) {
    return std::max(1L, static_cast<long>(std::ceil(horizon / dt - 1e-9)));
}

void check_start(const SwitchingModel& model, double x, Regime i, int u_idx) {
    if (!std::isfinite(x)) throw InvalidArgument("dual game: initial state must be finite");
    if (i < 0 || i >= model.regimes()) throw InvalidArgument("dual game: regime out of range");
    if (u_idx < 0 || u_idx >= model.control_count()) {
        throw InvalidArgument("dual game: control index out of range");
    }
}

void check_tail(const SwitchingModel& model, double beta, const McConfig& cfg) {
    const double tail = std::exp(-beta * cfg.horizon) * reward_envelope(model, cfg.envelope_domain) / beta;
    if (tail > cfg.tail_tolerance) {
        std::ostringstream msg;
        msg << "dual game: horizon " << cfg.horizon << " leaves a truncation tail of " << tail
            << " > tolerance " << cfg.tail_tolerance;
        throw InvalidArgument(msg.str());
    }
}

double run_path(PathEngine& engine, double x, Regime i, int u_idx, double dt, long steps,
                std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StepNoise noise;
    PathState s{x, i, u_idx, 0.0};
    const double decay = std::exp(-engine.beta() * dt);
    double discount = 1.0;
    for (long k = 0; k < steps; ++k) {
        engine.draw(rng, normal, noise);
        const double next = discount * decay;
        engine.advance(s, noise, dt, discount, next, k);
        discount = next;
    }
    return s.payoff;
}

std::pair<double, double> run_coupled_path(PathEngine& engine, double x, Regime i, int u_idx,
                                           double dt, long steps, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    StepNoise first;
    StepNoise second;
    StepNoise coarse_noise;
    PathState coarse{x, i, u_idx, 0.0};
    PathState fine = coarse;
    const double half = 0.5 * dt;
    const double decay = std::exp(-engine.beta() * dt);
    const double half_decay = std::exp(-engine.beta() * half);
    double discount = 1.0;
    for (long k = 0; k < steps; ++k) {
        engine.draw(rng, normal, first);
        engine.draw(rng, normal, second);
        coarse_noise = first;
        coarse_noise.z = (first.z + second.z) / std::sqrt(2.0);
        const double mid = discount * half_decay;
        const double next = discount * decay;
        engine.advance(fine, first, half, discount, mid, 2 * k);
        engine.advance(fine, second, half, mid, next, 2 * k + 1);
        engine.advance(coarse, coarse_noise, dt, discount, next, k);
        discount = next;
    }
    return {coarse.payoff, fine.payoff};
}

template <typename Fn>
void for_each_path(std::size_t n_paths, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n_paths));
    if (workers <= 1) {
        fn(0, n_paths);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    const std::size_t chunk = (n_paths + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t begin = w * chunk;
        const std::size_t end = std::min(n_paths, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

McEstimate summarize(const std::vector<double>& samples, std::uint64_t seed) {
    McEstimate out;
    out.n_paths = samples.size();
    out.seed = seed;
    const double n = static_cast<double>(samples.size());
    const double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    double ss = 0.0;
    for (double v : samples) ss += (v - mean) * (v - mean);
    out.mean = mean;
    out.std_error = samples.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    return out;
}

}  // namespace

double simulate_path(const SwitchingModel& model, double x, Regime i, int u_idx,
                     const IntensityPolicy& policy, double beta, const McConfig& cfg,
                     std::uint64_t seed) {
    check_start(model, x, i, u_idx);
    PathEngine engine(model, policy, beta, cfg);
    return run_path(engine, x, i, u_idx, cfg.dt, step_count(cfg.horizon, cfg.dt), seed);
}

McEstimate estimate_payoff(const SwitchingModel& model, double x, Regime i, int u_idx,
                           const IntensityPolicy& policy, double beta, const McConfig& cfg) {
    if (cfg.n_paths < 2) throw InvalidArgument("estimate_payoff: need at least two paths");
    check_start(model, x, i, u_idx);
    check_tail(model, beta, cfg);
    const long steps = step_count(cfg.horizon, cfg.dt);
    std::vector<double> payoffs(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        PathEngine engine(model, policy, beta, cfg);
        for (std::size_t p = begin; p < end; ++p) {
            payoffs[p] = run_path(engine, x, i, u_idx, cfg.dt, steps, path_seed(cfg.seed, p));
        }
    });
    return summarize(payoffs, cfg.seed);
}

DtRefinement estimate_dt_refinement(const SwitchingModel& model, double x, Regime i, int u_idx,
                                    const IntensityPolicy& policy, double beta,
                                    const McConfig& cfg) {
    if (cfg.n_paths < 2) throw InvalidArgument("estimate_dt_refinement: need at least two paths");
    check_start(model, x, i, u_idx);
    check_tail(model, beta, cfg);
    const long steps = step_count(cfg.horizon, cfg.dt);
    std::vector<double> coarse(cfg.n_paths);
    std::vector<double> fine(cfg.n_paths);
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        PathEngine engine(model, policy, beta, cfg);
        for (std::size_t p = begin; p < end; ++p) {
            std::tie(coarse[p], fine[p]) =
                run_coupled_path(engine, x, i, u_idx, cfg.dt, steps, path_seed(cfg.seed, p));
        }
    });
    std::vector<double> diff(cfg.n_paths);
    for (std::size_t p = 0; p < cfg.n_paths; ++p) diff[p] = fine[p] - coarse[p];
    DtRefinement out;
    out.coarse = summarize(coarse, cfg.seed);
    out.fine = summarize(fine, cfg.seed);
    const McEstimate d = summarize(diff, cfg.seed);
    out.shift = out.fine.mean - out.coarse.mean;
    out.shift_stderr = d.std_error;
    return out;
}

SupInfResult sup_inf_search(const SwitchingModel& model, double x, Regime i, double beta,
                            const std::vector<RegimeIntensity>& xi_family,
                            const std::vector<ControlIntensity>& nu_family, const McConfig& cfg,
                            int u_idx) {
    if (xi_family.empty() || nu_family.empty()) {
        throw InvalidArgument("sup_inf_search: intensity families must be nonempty");
    }
    if (u_idx < 0) u_idx = model.control_count() / 2;
    SupInfResult out;
    double best_value = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < xi_family.size(); ++a) {
        std::size_t inner_arg = 0;
        McEstimate inner;
        for (std::size_t b = 0; b < nu_family.size(); ++b) {
            const IntensityPolicy policy{xi_family[a], nu_family[b]};
            const McEstimate est = estimate_payoff(model, x, i, u_idx, policy, beta, cfg);
            out.table.push_back({a, b, est});
            if (b == 0 || est.mean < inner.mean) {
                inner = est;
                inner_arg = b;
            }
        }
        if (inner.mean > best_value) {
            best_value = inner.mean;
            out.best_xi = a;
            out.worst_nu = inner_arg;
            out.saddle = inner;
        }
    }
    return out;
}

ValidationReport check_moment_bound(const SwitchingModel& model, double x, Regime i, int u_idx,
                                    const IntensityPolicy& policy, const McConfig& cfg) {
    check_start(model, x, i, u_idx);
    if (cfg.n_paths < 1) throw InvalidArgument("check_moment_bound: need at least one path");
    const std::vector<double> ladder{1.0, 2.0, 4.0, 8.0};
    std::vector<long> marks;
    for (double t : ladder) marks.push_back(std::max(1L, std::lround(t / cfg.dt)));
    const long steps = marks.back();

    // Per-path squared states at the ladder marks; the reward is irrelevant here.
    std::vector<double> squares(cfg.n_paths * ladder.size());
    for_each_path(cfg.n_paths, cfg.threads, [&](std::size_t begin, std::size_t end) {
        PathEngine engine(model, policy, 1.0, cfg);
        StepNoise noise;
        for (std::size_t p = begin; p < end; ++p) {
            std::mt19937_64 rng(path_seed(cfg.seed, p));
            std::normal_distribution<double> normal(0.0, 1.0);
            PathState s{x, i, u_idx, 0.0};
            std::size_t mark = 0;
            for (long k = 0; k < steps; ++k) {
                engine.draw(rng, normal, noise);
                engine.advance(s, noise, cfg.dt, 0.0, 0.0, k);
                if (k + 1 == marks[mark]) squares[p * ladder.size() + mark++] = s.x * s.x;
            }
        }
    });

    ValidationReport report;
    report.check = "moment_bound";
    report.witness_points.assign(ladder.size(), 0.0);
    for (std::size_t p = 0; p < cfg.n_paths; ++p)
        for (std::size_t r = 0; r < ladder.size(); ++r)
            report.witness_points[r] += squares[p * ladder.size() + r];
    for (double& v : report.witness_points) v /= static_cast<double>(cfg.n_paths);

    const double bound = 4.0 * report.witness_points.front();
    const auto worst = std::max_element(report.witness_points.begin(), report.witness_points.end());
    report.observed = *worst;
    report.tolerance = 0.0;
    report.worst_violation = std::max(0.0, *worst - bound);
    report.passed = report.worst_violation <= report.tolerance;
    std::ostringstream w;
    w << "E|X_t|^2 at t=1,2,4,8:";
    for (double v : report.witness_points) w << ' ' << v;
    w << " (bound " << bound << ")";
    report.witness = w.str();
    return report;
}

}  // namespace ergoswitch
