#include <catch_amalgamated.hpp>

#include <cmath>

#include "ergoswitch/elliptic.hpp"
#include "ergoswitch/error.hpp"
#include "oracles.hpp"

using namespace ergoswitch;
using Catch::Matchers::WithinAbs;

namespace {

double sup_error(const ValueField& v, Regime i, double target) {
    double worst = 0.0;
    for (int k = 0; k < v.nodes(); ++k) worst = std::max(worst, std::abs(v(k, i) - target));
    return worst;
}

}  // namespace

TEST_CASE("penalty term") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-1.0, 1.0, 3);
    ValueField v(3, 2);
    for (int k = 0; k < 3; ++k) {
        v(k, 0) = 9.0;
        v(k, 1) = 10.0;
    }
    const ValueField p = penalty_term(v, model, grid, 1.0);
    CHECK_THAT(p(1, 0), WithinAbs(0.9, 1e-12));
    CHECK(p(1, 1) == 0.0);
    CHECK_THAT(penalty_term(v, model, grid, 10.0)(1, 0), WithinAbs(9.0, 1e-12));
}

TEST_CASE("penalized flat system matches the scalar fixed point") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-5.0, 5.0, 101);
    for (double n : {1.0, 100.0}) {
        const auto expected = oracle::two_regime_penalized(0.1, n);
        const PenalizedSolve s = solve_penalized(model, grid, 0.1, n, std::nullopt, 1e-6);
        CHECK(sup_error(s.field, 0, expected.v1) <= 1e-4);
        CHECK(sup_error(s.field, 1, expected.v2) <= 1e-4);
        CHECK(s.residual <= 1e-6);
    }
    CHECK_THAT(oracle::two_regime_penalized(0.1, 1.0).v1, WithinAbs(9.0, 1e-9));
    CHECK_THAT(oracle::two_regime_penalized(0.1, 100.0).v1, WithinAbs(9.9 * 100 / 100.1, 1e-9));
}

TEST_CASE("OU discounted value at beta = 1") {
    const SwitchingModel model = preset("ou_quadratic");
    const Grid grid(-6.0, 6.0, 481);
    const PenalizedSolve s = solve_penalized(model, grid, 1.0, 1.0, std::nullopt, 1e-6);
    CHECK_THAT(s.field(grid.nearest_node(0.0), 0), WithinAbs(oracle::ou_discounted_value(0.0, 1.0), 0.01));
    CHECK_THAT(s.field(grid.nearest_node(1.0), 0), WithinAbs(oracle::ou_discounted_value(1.0, 1.0), 0.02));
}

TEST_CASE("warm starts converge faster") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-5.0, 5.0, 101);
    const DiscreteGenerator gen(model, grid);
    const PenalizedSolve cold = solve_penalized(gen, 0.1, 64.0, std::nullopt, 1e-6);
    const PenalizedSolve base = solve_penalized(gen, 0.1, 32.0, std::nullopt, 1e-6);
    const PenalizedSolve warm = solve_penalized(gen, 0.1, 64.0, base.field, 1e-6);
    CHECK(warm.iterations < cold.iterations);
    CHECK(sup_distance(warm.field, cold.field) <= 1e-4);
    CHECK(penalized_residual(warm.field, gen, 0.1, 64.0, false) <= 1e-6);
}

TEST_CASE("iteration budget exhaustion is a convergence error") {
    const SwitchingModel model = preset("ou_quadratic");
    const Grid grid(-5.0, 5.0, 101);
    PenalizedOptions options;
    options.max_iterations = 10;
    try {
        solve_penalized(model, grid, 0.1, 1.0, std::nullopt, 1e-8, options);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_residual() > 1e-8);
    }
}

TEST_CASE("discounted QVI on the flat system") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-5.0, 5.0, 101);
    const auto expected = oracle::two_regime_discounted(0.1);
    const EllipticSolve s = solve_elliptic(model, grid, 0.1, geometric_schedule(12), 5e-4);
    CHECK(sup_error(s.field, 0, expected.v1) <= 0.01);
    CHECK(sup_error(s.field, 1, expected.v2) <= 0.01);
    CHECK(s.cauchy_gaps.back() <= 5e-4);
    CHECK(s.levels.size() == s.n_schedule.size());
    for (std::size_t l = 1; l < s.levels.size(); ++l) CHECK(s.levels[l].n > s.levels[l - 1].n);
    CHECK(s.obstacle_residual <= 5e-3);
    CHECK(regime_gap(s.field) <= 0.1 + 5e-3);
}

TEST_CASE("discounted OU at beta = 0.5 and its Lipschitz constant") {
    const SwitchingModel model = preset("ou_quadratic");
    const Grid grid(-5.0, 5.0, 201);
    const EllipticSolve s = solve_elliptic(model, grid, 0.5, geometric_schedule(12), 5e-4);
    CHECK_THAT(s.field(grid.nearest_node(0.0), 0), WithinAbs(oracle::ou_discounted_value(0.0, 0.5), 0.02));
    // V' = 2x / (beta + 2) peaks at |x| = 3 on the inner domain
    const auto lip = estimate_lipschitz(s.field, grid);
    CHECK_THAT(lip[0], WithinAbs(2.4, 0.1));
}

TEST_CASE("a schedule that stops short raises ConvergenceError") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-2.0, 2.0, 21);
    CHECK_THROWS_AS(solve_elliptic(model, grid, 0.1, {1.0, 2.0}, 1e-4), ConvergenceError);
    CHECK_THROWS_AS(solve_elliptic(model, grid, 0.1, {1.0}, 1e-4), InvalidArgument);
    CHECK_THROWS_AS(solve_elliptic(model, grid, 0.1, {2.0, 1.0}, 1e-4), InvalidArgument);
}

TEST_CASE("geometric schedule") {
    const auto s = geometric_schedule(3);
    REQUIRE(s.size() == 4);
    CHECK(s[0] == 1.0);
    CHECK(s[3] == 8.0);
}
