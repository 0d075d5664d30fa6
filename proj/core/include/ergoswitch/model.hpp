#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ergoswitch {

/// Regimes are 0-based internally; CSV headers and the CLI use 1-based names.
using Regime = int;

using DriftFn = std::function<double(double x, Regime i, double u)>;
using DiffusionFn = std::function<double(double x, Regime i, double u)>;
using RewardFn = std::function<double(double x, Regime i, double u)>;
using SwitchCostFn = std::function<double(double x, Regime from, Regime to)>;
using TerminalFn = std::function<double(double x, Regime i)>;

struct ModelCoefficients {
    DriftFn drift;
    DiffusionFn diffusion;
    RewardFn running_reward;
    SwitchCostFn switch_cost;
    TerminalFn terminal_reward;
};

/// Robust switching control model on a one-dimensional state space.
///
/// Holds the drift b, the diffusion sigma, the running reward f (minimised
/// over the adversarial control u), the switching cost c, the terminal reward
/// g, together with the declared dissipativity constant gamma and the
/// Lipschitz constant of f in x. Controls are a finite set of scalar points.
/// Objects are immutable once constructed.
class SwitchingModel {
public:
    SwitchingModel(std::string name, int regimes, std::vector<double> controls,
                   ModelCoefficients coefficients, double gamma, double lipschitz_f,
                   bool cost_constant_in_x, int dim = 1);

    const std::string& name() const noexcept { return name_; }
    int dim() const noexcept { return dim_; }
    int regimes() const noexcept { return regimes_; }
    const std::vector<double>& controls() const noexcept { return controls_; }
    int control_count() const noexcept { return static_cast<int>(controls_.size()); }
    double gamma() const noexcept { return gamma_; }
    double lipschitz_f() const noexcept { return lipschitz_f_; }
    bool cost_constant_in_x() const noexcept { return cost_constant_in_x_; }

    double drift(double x, Regime i, double u) const { return coeffs_.drift(x, i, u); }
    double diffusion(double x, Regime i, double u) const { return coeffs_.diffusion(x, i, u); }
    double running_reward(double x, Regime i, double u) const {
        return coeffs_.running_reward(x, i, u);
    }
    double switch_cost(double x, Regime from, Regime to) const {
        return coeffs_.switch_cost(x, from, to);
    }
    double terminal_reward(double x, Regime i) const { return coeffs_.terminal_reward(x, i); }

    /// Largest c(x,i,j) over regime pairs at x.
    double max_switch_cost(double x) const;

    const ModelCoefficients& coefficients() const noexcept { return coeffs_; }

private:
    std::string name_;
    int dim_;
    int regimes_;
    std::vector<double> controls_;
    ModelCoefficients coeffs_;
    double gamma_;
    double lipschitz_f_;
    bool cost_constant_in_x_;
};

/// Single-regime model obtained by freezing regime `i` (no switching).
SwitchingModel freeze_regime(const SwitchingModel& model, Regime i);

/// Names accepted by preset().
std::vector<std::string> preset_names();

/// Closed-form benchmark models: "ou_quadratic", "two_regime_flat", "robust_drift".
/// Throws InvalidArgument listing the available names for anything else.
SwitchingModel preset(std::string_view name);

}  // namespace ergoswitch
