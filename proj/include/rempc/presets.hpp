#pragma once

#include "rempc/costs.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace rempc {

/// Everything needed to pose a robust economic MPC experiment for one system.
struct Preset {
  SystemModel model;
  TubeSpec tube;
  StageCost cost;
  StorageFunction storage;
};

/// Scalar economic growth model x+ = u + w with L(x, u) = -ln(A x^alpha - u),
/// the logarithm relaxed below `log_knot`.
struct GrowthParams {
  double productivity = 5.0;
  double elasticity = 0.34;
  double disturbance_lower = -1.0;
  double disturbance_upper = 1.0;
  double state_lower = 0.0;
  double state_upper = 10.0;
  double input_lower = 0.1;
  double input_upper = 5.0;
  double log_knot = 1e-3;
  double storage_slope = 0.2306;
  /// Defaults to W (the growth system is static in the error).
  std::optional<std::pair<double, double>> omega;
};

Preset make_growth_preset(const GrowthParams& params = {});

/// Named registry lookup; `overrides` holds flat parameter overrides, e.g.
/// {"productivity": 4.0, "omega": [-0.5, 0.5]}.
Preset make_preset(const std::string& name, const nlohmann::json& overrides = nlohmann::json::object());
std::vector<std::string> preset_names();

}  // namespace rempc
