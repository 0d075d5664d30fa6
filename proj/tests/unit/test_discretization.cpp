#include <catch_amalgamated.hpp>

#include <cmath>
#include <limits>

#include "ergoswitch/discretization.hpp"
#include "ergoswitch/error.hpp"
#include "ergoswitch/model.hpp"

using namespace ergoswitch;
using Catch::Matchers::WithinAbs;

namespace {

SwitchingModel constant_drift(double b, double sigma = 1.0) {
    ModelCoefficients c{
        [b](double, Regime, double) { return b; },
        [sigma](double, Regime, double) { return sigma; },
        [](double, Regime, double) { return 0.0; },
        [](double, Regime, Regime) { return 0.0; },
        [](double, Regime) { return 0.0; },
    };
    return SwitchingModel("constant_drift", 1, {0.0}, std::move(c), 1.0, 0.0, true);
}

ValueField sampled(const Grid& grid, int regimes, double (*fn)(double)) {
    ValueField v(grid.size(), regimes);
    for (Regime i = 0; i < regimes; ++i)
        for (int k = 0; k < grid.size(); ++k) v(k, i) = fn(grid.node(k));
    return v;
}

}  // namespace

TEST_CASE("stencils are monotone and rows sum to zero") {
    const SwitchingModel model = preset("robust_drift");
    const Grid grid(-4.0, 4.0, 41, BoundaryMode::dirichlet_extrapolate);
    for (int k = 0; k < grid.size(); ++k) {
        for (double u : model.controls()) {
            const Stencil s = generator_stencil(model, grid, k, 0, u);
            CHECK(s.lower >= 0.0);
            CHECK(s.upper >= 0.0);
            CHECK(s.diag == -(s.lower + s.upper));
        }
    }
    CHECK(generator_stencil(model, grid, 0, 0, 0.0).lower == 0.0);
    CHECK(generator_stencil(model, grid, grid.size() - 1, 0, 0.0).upper == 0.0);
}

TEST_CASE("generator of a constant is zero") {
    const SwitchingModel model = preset("ou_quadratic");
    const Grid grid(-5.0, 5.0, 201);
    const ValueField v(grid.size(), 1, 3.7);
    for (double lv : apply_generator(v, model, grid, 0, 0.0)) CHECK(std::abs(lv) <= 1e-12);
}

TEST_CASE("generator of x^2 under OU matches 1 - 2x^2 up to the upwind bias") {
    const SwitchingModel model = preset("ou_quadratic");
    const Grid grid(-5.0, 5.0, 201);
    const ValueField v = sampled(grid, 1, [](double x) { return x * x; });
    const auto lv = apply_generator(v, model, grid, 0, 0.0);
    for (int k = grid.inner_begin(); k < grid.inner_end(); ++k) {
        const double x = grid.node(k);
        CHECK(std::abs(lv[k] - (1.0 - 2.0 * x * x)) <= std::abs(x) * grid.h() + 1e-9);
    }
    CHECK_THAT(lv[grid.nearest_node(0.0)], WithinAbs(1.0, 1e-12));
}

TEST_CASE("generator is exact on linear functions for constant drift") {
    for (double b : {-0.7, 0.0, 1.3}) {
        const SwitchingModel model = constant_drift(b);
        const Grid grid(-2.0, 2.0, 21);
        const ValueField v = sampled(grid, 1, [](double x) { return 3.0 * x + 1.0; });
        const auto lv = apply_generator(v, model, grid, 0, 0.0);
        for (int k = 1; k + 1 < grid.size(); ++k) CHECK_THAT(lv[k], WithinAbs(3.0 * b, 1e-11));
    }
}

TEST_CASE("hamiltonian takes the adversarial control") {
    const SwitchingModel model = preset("robust_drift");
    const Grid grid(-3.0, 3.0, 61);
    const ValueField zero(grid.size(), 2, 0.0);
    const auto h = hamiltonian(zero, model, grid, 0);
    for (int k = 0; k < grid.size(); ++k) CHECK_THAT(h[k], WithinAbs(-std::abs(grid.node(k)), 1e-12));

    const DiscreteGenerator gen(model, grid);
    std::vector<double> out(grid.size());
    std::vector<int> argmin(grid.size());
    gen.hamiltonian(zero, 0, out, argmin);
    CHECK(argmin[grid.nearest_node(2.0)] == 0);                       // u = -1 for x > 0
    CHECK(argmin[grid.nearest_node(-2.0)] == model.control_count() - 1);  // u = +1 for x < 0
    CHECK(argmin[grid.nearest_node(0.0)] == 0);                       // tie -> lowest index
}

TEST_CASE("switching obstacle") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-1.0, 1.0, 5);
    ValueField v(grid.size(), 2);
    for (int k = 0; k < grid.size(); ++k) {
        v(k, 0) = 9.9;
        v(k, 1) = 10.0;
    }
    const ValueField mv = switching_obstacle(v, model, grid);
    for (int k = 0; k < grid.size(); ++k) {
        CHECK_THAT(mv(k, 0), WithinAbs(9.9, 1e-12));
        CHECK_THAT(mv(k, 1), WithinAbs(9.8, 1e-12));
    }
    const SwitchingModel single = preset("ou_quadratic");
    const ValueField one(grid.size(), 1, 2.0);
    CHECK(switching_obstacle(one, single, grid)(2, 0) == kInactiveObstacle);
}

TEST_CASE("projection lifts the cheaper regime") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-1.0, 1.0, 3);
    ValueField v(grid.size(), 2);
    for (int k = 0; k < grid.size(); ++k) {
        v(k, 0) = 0.4;
        v(k, 1) = 0.6;
    }
    const ValueField w = project_obstacle(v, model, grid);
    for (int k = 0; k < grid.size(); ++k) {
        CHECK_THAT(w(k, 0), WithinAbs(0.5, 1e-15));
        CHECK(w(k, 1) == 0.6);
    }
}

TEST_CASE("projection rejects a numerically free loop") {
    ModelCoefficients c{
        [](double x, Regime, double) { return -x; },
        [](double, Regime, double) { return 1.0; },
        [](double, Regime, double) { return 0.0; },
        [](double, Regime i, Regime j) { return i == j ? 0.0 : -0.1; },
        [](double, Regime) { return 0.0; },
    };
    const SwitchingModel model("negative_cost", 2, {0.0}, std::move(c), 1.0, 0.0, true);
    const Grid grid(-1.0, 1.0, 3);
    CHECK_THROWS_AS(project_obstacle(ValueField(3, 2, 0.0), model, grid), ConvergenceError);
}

TEST_CASE("non-finite coefficients are reported") {
    ModelCoefficients c{
        [](double x, Regime, double) { return x > 0.5 ? std::numeric_limits<double>::quiet_NaN() : -x; },
        [](double, Regime, double) { return 1.0; },
        [](double, Regime, double) { return 0.0; },
        [](double, Regime, Regime) { return 0.0; },
        [](double, Regime) { return 0.0; },
    };
    const SwitchingModel model("nan_drift", 1, {0.0}, std::move(c), 1.0, 0.0, true);
    CHECK_THROWS_AS(DiscreteGenerator(model, Grid(-1.0, 1.0, 5)), EvaluationError);
}

TEST_CASE("terminal reward is sampled at the nodes") {
    const SwitchingModel model = preset("two_regime_flat");
    const Grid grid(-1.0, 1.0, 5);
    CHECK(sample_terminal(model, grid) == ValueField(5, 2, 0.0));
}
