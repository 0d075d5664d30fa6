#include "ergoswitch/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "ergoswitch/error.hpp"

namespace ergoswitch {

SwitchingModel::SwitchingModel(std::string name, int regimes, std::vector<double> controls,
                               ModelCoefficients coefficients, double gamma, double lipschitz_f,
                               bool cost_constant_in_x, int dim)
    : name_(std::move(name)),
      dim_(dim),
      regimes_(regimes),
      controls_(std::move(controls)),
      coeffs_(std::move(coefficients)),
      gamma_(gamma),
      lipschitz_f_(lipschitz_f),
      cost_constant_in_x_(cost_constant_in_x) {
    if (dim_ != 1) {
        throw InvalidArgument("model '" + name_ + "': only state dimension 1 is supported");
    }
    if (regimes_ < 1) {
        throw InvalidArgument("model '" + name_ + "': need at least one regime");
    }
    if (controls_.empty()) {
        throw InvalidArgument("model '" + name_ + "': control set is empty");
    }
    if (!(gamma_ > 0.0) || !std::isfinite(gamma_)) {
        throw InvalidArgument("model '" + name_ + "': gamma must be a positive finite number");
    }
    if (!(lipschitz_f_ >= 0.0) || !std::isfinite(lipschitz_f_)) {
        throw InvalidArgument("model '" + name_ + "': lipschitz_f must be nonnegative");
    }
    if (!coeffs_.drift || !coeffs_.diffusion || !coeffs_.running_reward ||
        !coeffs_.switch_cost || !coeffs_.terminal_reward) {
        throw InvalidArgument("model '" + name_ + "': every coefficient must be set");
    }
}

double SwitchingModel::max_switch_cost(double x) const {
    double worst = 0.0;
    for (Regime i = 0; i < regimes_; ++i)
        for (Regime j = 0; j < regimes_; ++j)
            if (i != j) worst = std::max(worst, switch_cost(x, i, j));
    return worst;
}

SwitchingModel freeze_regime(const SwitchingModel& model, Regime i) {
    if (i < 0 || i >= model.regimes()) {
        throw InvalidArgument("freeze_regime: regime out of range");
    }
    const auto& c = model.coefficients();
    ModelCoefficients frozen{
        [b = c.drift, i](double x, Regime, double u) { return b(x, i, u); },
        [s = c.diffusion, i](double x, Regime, double u) { return s(x, i, u); },
        [f = c.running_reward, i](double x, Regime, double u) { return f(x, i, u); },
        [](double, Regime, Regime) { return 0.0; },
        [g = c.terminal_reward, i](double x, Regime) { return g(x, i); },
    };
    return SwitchingModel(model.name() + "/regime_" + std::to_string(i + 1), 1, model.controls(),
                          std::move(frozen), model.gamma(), model.lipschitz_f(), true,
                          model.dim());
}

std::vector<std::string> preset_names() {
    return {"ou_quadratic", "two_regime_flat", "robust_drift"};
}

namespace {

double flat_cost(double, Regime i, Regime j) { return i == j ? 0.0 : 0.1; }

}  // namespace

SwitchingModel preset(std::string_view name) {
    if (name == "ou_quadratic") {
        ModelCoefficients c{
            [](double x, Regime, double) { return -x; },
            [](double, Regime, double) { return 1.0; },
            [](double x, Regime, double) { return x * x; },
            [](double, Regime, Regime) { return 0.0; },
            [](double, Regime) { return 0.0; },
        };
        // f = x^2 is only locally Lipschitz; 12 is its constant on |x| <= 6.
        return SwitchingModel("ou_quadratic", 1, {0.0}, std::move(c), 1.0, 12.0, true);
    }
    if (name == "two_regime_flat") {
        ModelCoefficients c{
            [](double x, Regime, double) { return -x; },
            [](double, Regime, double) { return 1.0; },
            [](double, Regime i, double) { return i == 0 ? 0.0 : 1.0; },
            flat_cost,
            [](double, Regime) { return 0.0; },
        };
        return SwitchingModel("two_regime_flat", 2, {0.0}, std::move(c), 1.0, 0.0, true);
    }
    if (name == "robust_drift") {
        std::vector<double> controls(11);
        for (int k = 0; k < 11; ++k) controls[k] = -1.0 + 0.2 * k;
        ModelCoefficients c{
            [](double x, Regime, double u) { return -x + 0.5 * u; },
            [](double, Regime, double) { return 1.0; },
            [](double x, Regime i, double u) { return (i == 0 ? 0.0 : 1.0) + x * u; },
            flat_cost,
            [](double, Regime) { return 0.0; },
        };
        return SwitchingModel("robust_drift", 2, std::move(controls), std::move(c), 1.0, 1.0,
                              true);
    }
    std::ostringstream msg;
    msg << "unknown preset '" << name << "'; available:";
    for (const auto& n : preset_names()) msg << ' ' << n;
    throw InvalidArgument(msg.str());
}

}  // namespace ergoswitch
