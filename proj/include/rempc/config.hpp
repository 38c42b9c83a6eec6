#pragma once

#include "rempc/diagnostics.hpp"
#include "rempc/presets.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace rempc {

/// Everything a CLI run depends on. Round-trips through JSON unchanged.
struct RunConfig {
  std::string model = "growth";
  /// Flat preset parameter overrides, e.g. {"productivity": 4.5}.
  nlohmann::json model_params = nlohmann::json::object();
  int horizon = 10;
  int steps = 2000;
  std::uint64_t seed = 1;
  /// Number of consecutive seeds (seed, seed + 1, ...) for batch commands.
  int seeds = 10;
  std::string cost = "max";
  std::string diss = "none";
  std::string init = "free";
  /// Initial state; defaults to the ROSS of the selected cost.
  std::optional<std::vector<double>> x0;
  /// Tube override [lo, hi] (scalar models).
  std::optional<std::vector<double>> omega;
  /// "iid", "constant" or "sequence".
  std::string disturbance = "iid";
  std::optional<std::vector<double>> disturbance_value;
  std::string disturbance_file;
  bool lyapunov = false;

  int ross_input_grid = 501;
  /// 0 selects the per-variant default.
  int omega_grid = 0;
  int dissipativity_grid = 101;
  double stationarity_tolerance = 1e-7;
  double feasibility_tolerance = 1e-8;

  std::vector<int> turnpike_horizons{5, 10, 20, 40};
  std::vector<double> epsilons{0.05};
  std::vector<double> turnpike_z0{1.0};

  std::string out = "rempc_out";

  /// Throws kConfig on invalid values.
  void validate() const;
};

nlohmann::json to_json(const RunConfig& config);
/// Unknown keys and wrongly typed values throw kConfig.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::string& path);

CostVariant config_cost(const RunConfig& config);
DissMode config_diss(const RunConfig& config);
InitMode config_init(const RunConfig& config);

/// Preset with model_params and the omega override applied.
Preset config_preset(const RunConfig& config);
/// Ready-to-solve problem for the configured variant and modes.
OcpProblem config_problem(const RunConfig& config, const Preset& preset);
DisturbanceSource config_disturbance(const RunConfig& config, const Preset& preset,
                                     std::uint64_t seed);

}  // namespace rempc
