#include "ergoswitch/validation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

std::ostream& operator<<(std::ostream& out, const ValidationReport& report) {
    out << std::setprecision(6) << "[" << (report.passed ? "PASS" : "FAIL") << "] "
        << report.check << ": worst violation " << report.worst_violation << " (tolerance "
        << report.tolerance << "), observed " << report.observed;
    if (!report.witness.empty()) out << ", witness " << report.witness;
    return out;
}

namespace {

double radical_inverse(std::uint64_t index, std::uint64_t base) {
    double result = 0.0;
    double scale = 1.0 / static_cast<double>(base);
    while (index > 0) {
        result += static_cast<double>(index % base) * scale;
        index /= base;
        scale /= static_cast<double>(base);
    }
    return result;
}

double checked(double value, const char* what, double x, Regime i, double u) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << what << " is not finite at x=" << x << ", regime=" << (i + 1) << ", u=" << u;
        throw EvaluationError(msg.str());
    }
    return value;
}

}  // namespace

ValidationReport check_dissipativity(const SwitchingModel& model, int samples, std::uint64_t seed,
                                     Interval domain, double tolerance) {
    if (samples < 1) throw InvalidArgument("check_dissipativity: samples must be >= 1");
    if (!(domain.lo < domain.hi)) throw InvalidArgument("check_dissipativity: empty domain");

    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(samples);
    const double width = domain.hi - domain.lo;
    const int low_discrepancy = (samples + 1) / 2;
    for (int s = 0; s < low_discrepancy; ++s) {
        pairs.emplace_back(domain.lo + width * radical_inverse(s + 1, 2),
                           domain.lo + width * radical_inverse(s + 1, 3));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(domain.lo, domain.hi);
    while (static_cast<int>(pairs.size()) < samples) {
        const double x = unif(rng);
        pairs.emplace_back(x, unif(rng));
    }

    ValidationReport report;
    report.check = "dissipativity";
    report.tolerance = tolerance;
    report.observed = -std::numeric_limits<double>::infinity();
    for (const auto& [x, y] : pairs) {
        for (Regime i = 0; i < model.regimes(); ++i) {
            for (double u : model.controls()) {
                const double bx = checked(model.drift(x, i, u), "drift", x, i, u);
                const double by = checked(model.drift(y, i, u), "drift", y, i, u);
                const double sx = checked(model.diffusion(x, i, u), "diffusion", x, i, u);
                const double sy = checked(model.diffusion(y, i, u), "diffusion", y, i, u);
                const double d = x - y;
                const double ds = sx - sy;
                const double lhs = d * (bx - by) + 0.5 * ds * ds + model.gamma() * d * d;
                if (lhs > report.observed) {
                    report.observed = lhs;
                    std::ostringstream w;
                    w << "x=" << x << ", x'=" << y << ", regime=" << (i + 1) << ", u=" << u;
                    report.witness = w.str();
                    report.witness_points = {x, y};
                }
            }
        }
    }
    report.worst_violation = std::max(report.observed, 0.0);
    report.passed = report.worst_violation <= tolerance;
    return report;
}

std::vector<std::vector<Regime>> enumerate_simple_cycles(int m) {
    if (m > 10) throw InvalidArgument("enumerate_simple_cycles: too many regimes");
    std::vector<std::vector<Regime>> cycles;
    // Each subset (bitmask) with >= 2 members; fix the smallest member first and
    // permute the rest.
    for (unsigned mask = 0; mask < (1u << m); ++mask) {
        std::vector<Regime> members;
        for (Regime i = 0; i < m; ++i)
            if (mask & (1u << i)) members.push_back(i);
        if (members.size() < 2) continue;
        std::vector<Regime> rest(members.begin() + 1, members.end());
        do {
            std::vector<Regime> cycle{members.front()};
            cycle.insert(cycle.end(), rest.begin(), rest.end());
            cycles.push_back(std::move(cycle));
        } while (std::next_permutation(rest.begin(), rest.end()));
    }
    return cycles;
}

ValidationReport check_no_free_loop(const SwitchingModel& model, int samples, Interval domain) {
    if (samples < 1) throw InvalidArgument("check_no_free_loop: samples must be >= 1");
    // Strict positivity of cycle costs is tested as cost >= kMinCycleCost.
    constexpr double kMinCycleCost = 1e-12;
    const int m = model.regimes();
    const auto cycles = enumerate_simple_cycles(m);

    ValidationReport report;
    report.check = "no_free_loop";
    report.tolerance = 0.0;
    report.observed = std::numeric_limits<double>::infinity();
    double worst = -std::numeric_limits<double>::infinity();
    auto record = [&](double violation, const std::string& witness, double x) {
        if (violation > worst) {
            worst = violation;
            report.witness = witness;
            report.witness_points = {x};
        }
    };

    for (int s = 0; s < samples; ++s) {
        const double x =
            samples == 1 ? 0.5 * (domain.lo + domain.hi)
                         : domain.lo + (domain.hi - domain.lo) * s / static_cast<double>(samples - 1);
        for (Regime i = 0; i < m; ++i) {
            for (Regime j = 0; j < m; ++j) {
                const double c = checked(model.switch_cost(x, i, j), "switch cost", x, i, j);
                std::ostringstream w;
                w << "c(x=" << x << ", " << (i + 1) << ", " << (j + 1) << ") = " << c;
                record(i == j ? std::abs(c) : -c, w.str(), x);
            }
        }
        for (const auto& cycle : cycles) {
            double cost = 0.0;
            for (std::size_t a = 0; a < cycle.size(); ++a) {
                cost += model.switch_cost(x, cycle[a], cycle[(a + 1) % cycle.size()]);
            }
            report.observed = std::min(report.observed, cost);
            std::ostringstream w;
            w << "cycle ";
            for (Regime r : cycle) w << (r + 1) << "->";
            w << (cycle.front() + 1) << " at x=" << x << " costs " << cost;
            record(kMinCycleCost - cost, w.str(), x);
        }
    }
    if (cycles.empty()) report.observed = 0.0;
    report.worst_violation = worst;
    report.passed = report.worst_violation <= report.tolerance;
    return report;
}

ValidationReport check_terminal_consistency(const SwitchingModel& model, const Grid& grid,
                                            double tolerance) {
    ValidationReport report;
    report.check = "terminal_consistency";
    report.tolerance = tolerance;
    report.observed = -std::numeric_limits<double>::infinity();
    const int m = model.regimes();
    for (int k = 0; k < grid.size(); ++k) {
        const double x = grid.node(k);
        for (Regime i = 0; i < m; ++i) {
            const double gi = checked(model.terminal_reward(x, i), "terminal reward", x, i, 0.0);
            for (Regime j = 0; j < m; ++j) {
                if (j == i) continue;
                const double gj =
                    checked(model.terminal_reward(x, j), "terminal reward", x, j, 0.0);
                const double deficit = gj - model.switch_cost(x, i, j) - gi;
                if (deficit > report.observed) {
                    report.observed = deficit;
                    std::ostringstream w;
                    w << "x=" << x << ", regime " << (i + 1) << " vs " << (j + 1);
                    report.witness = w.str();
                    report.witness_points = {x};
                }
            }
        }
    }
    if (m == 1) report.observed = 0.0;
    report.worst_violation = std::max(report.observed, 0.0);
    report.passed = report.worst_violation <= tolerance;
    return report;
}

}  // namespace ergoswitch
