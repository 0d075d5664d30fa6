#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ergoswitch/dual_game.hpp"
#include "ergoswitch/grid.hpp"
#include "ergoswitch/model.hpp"

namespace ergoswitch::cli {

/// Malformed or inconsistent config; the message names the offending line or field.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ModelSection {
    std::string preset;                      // either a preset name...
    std::filesystem::path table;             // ...or a tabulated coefficient file
    std::vector<std::vector<double>> switch_cost;  // m x m, tabulated models only
    double gamma = 1.0;
    double lipschitz_f = 0.0;
};

struct GridSection {
    double x_min = -5.0;
    double x_max = 5.0;
    int n_nodes = 201;
    BoundaryMode boundary = BoundaryMode::neumann_zero_slope;
};

struct ValidateSection {
    int samples = 1000;
    int cost_samples = 64;
    std::uint64_t seed = 0;
};

struct ParabolicSection {
    double t_max = 10.0;
    std::vector<double> snapshots;
    double probe_x = 0.0;
    Regime probe_regime = 0;
};

struct EllipticSection {
    std::vector<double> betas{0.1};
    std::vector<double> n_schedule;
    double tol = 5e-4;
};

struct ErgodicSection {
    std::vector<double> betas{0.5, 0.2, 0.1, 0.05};
    double ref_x = 0.0;
    Regime ref_regime = 0;
    std::vector<double> probe_x{-1.0, 0.0, 1.0};
};

struct McSection {
    McConfig config;
    double x = 0.0;
    Regime regime = 0;
    int control = -1;  // 0-based; -1 = middle control
    double beta = 1.0;
    std::vector<std::vector<double>> xi_family;
    std::vector<std::vector<double>> nu_family{{1.0}};
};

struct ExperimentConfig {
    std::filesystem::path source;
    ModelSection model;
    GridSection grid;
    ValidateSection validate;
    std::optional<ParabolicSection> parabolic;
    std::optional<EllipticSection> elliptic;
    std::optional<ErgodicSection> ergodic;
    std::optional<McSection> mc;
    std::filesystem::path output_dir = "ergoswitch_out";
};

/// Reads the INI-style experiment file. Relative paths resolve against the
/// file's directory. Throws ConfigError.
ExperimentConfig load_config(const std::filesystem::path& path);

SwitchingModel build_model(const ExperimentConfig& config);
Grid build_grid(const ExperimentConfig& config);

/// Model defined by per-node coefficient samples. Columns:
/// x,regime,control,drift,diffusion,running_reward,terminal_reward
/// (regime 1-based, control = control value). Coefficients are piecewise
/// linear in x and linearly extrapolated past the table.
SwitchingModel load_tabulated_model(const std::filesystem::path& table,
                                    std::vector<std::vector<double>> switch_cost, double gamma,
                                    double lipschitz_f);

}  // namespace ergoswitch::cli
