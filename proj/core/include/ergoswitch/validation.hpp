#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch {

/// Outcome of a numerical audit of one standing assumption.
/// `passed` is true iff `worst_violation <= tolerance`.
struct ValidationReport {
    std::string check;
    bool passed = true;
    double worst_violation = 0.0;
    double tolerance = 0.0;
    /// Check-specific extreme value (max dissipativity LHS, min cycle cost, worst deficit).
    double observed = 0.0;
    /// Where the worst violation occurred, human readable.
    std::string witness;
    std::vector<double> witness_points;
};

std::ostream& operator<<(std::ostream& out, const ValidationReport& report);

struct Interval {
    double lo = -5.0;
    double hi = 5.0;
};

/// Samples pairs (x, x') in `domain` (half Halton points, half seeded uniform)
/// and evaluates (x-x')(b(x)-b(x')) + 1/2|sigma(x)-sigma(x')|^2 + gamma|x-x'|^2
/// for every regime and control. The violation is the positive part of the maximum.
ValidationReport check_dissipativity(const SwitchingModel& model, int samples, std::uint64_t seed,
                                     Interval domain = {}, double tolerance = 1e-10);

/// Checks c(x,i,i) = 0, c >= 0, and that every simple switching cycle has
/// strictly positive cost at `samples` equispaced points of `domain`.
ValidationReport check_no_free_loop(const SwitchingModel& model, int samples,
                                    Interval domain = {});

/// Checks g(x,i) >= max_{j != i}[g(x,j) - c(x,i,j)] at every grid node.
ValidationReport check_terminal_consistency(const SwitchingModel& model, const Grid& grid,
                                            double tolerance = 1e-12);

/// Every simple cycle i1 -> ... -> ik -> i1 over {0..m-1} with k >= 2 distinct
/// regimes, each listed once, starting from its smallest regime.
std::vector<std::vector<Regime>> enumerate_simple_cycles(int m);

}  // namespace ergoswitch
