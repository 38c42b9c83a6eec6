#include "rempc/presets.hpp"

#include <cmath>

namespace rempc {

Preset make_growth_preset(const GrowthParams& p) {
  SystemModel model;
  model.name = "growth";
  model.state_dim = 1;
  model.input_dim = 1;
  model.disturbance_dim = 1;
  model.dynamics = [](const Vector&, const Vector& u, const Vector& w) -> Vector { return u + w; };
  model.dynamics_jacobian = [](const Vector&, const Vector&, const Vector&, Matrix& fx, Matrix& fu) {
    fx = Matrix::Zero(1, 1);
    fu = Matrix::Identity(1, 1);
  };
  model.feedback = [](const Vector&, const Vector& v) -> Vector { return v; };
  model.feedback_is_identity = true;
  model.error_dynamics = [](const Vector&, const Vector&, const Vector&, const Vector& w) { return w; };
  model.disturbance_set = BoxSet::interval(p.disturbance_lower, p.disturbance_upper);
  model.joint_constraints = BoxSet::product(BoxSet::interval(p.state_lower, p.state_upper),
                                            BoxSet::interval(p.input_lower, p.input_upper));
  model.validate();

  const double a = p.productivity;
  const double alpha = p.elasticity;
  const double knot = p.log_knot;
  // Negative capital only shows up at infeasible solver iterates; it is
  // treated as zero so that L stays total.
  StageCost cost([a, alpha, knot](const Vector& x, const Vector& u) {
    const double k = std::max(x[0], 0.0);
    return -relaxed_log(a * std::pow(k, alpha) - u[0], knot);
  });
  cost = cost.with_gradient([a, alpha, knot](const Vector& x, const Vector& u, Vector& gx, Vector& gu) {
    const double k = std::max(x[0], 0.0);
    const double kpow = std::pow(k, alpha);
    const double dlog = relaxed_log_derivative(a * kpow - u[0], knot);
    gx.resize(1);
    gu.resize(1);
    gx[0] = k > 0.0 ? -dlog * a * alpha * kpow / k : 0.0;
    gu[0] = dlog;
    return -relaxed_log(a * kpow - u[0], knot);
  });

  const auto omega = p.omega.value_or(std::make_pair(p.disturbance_lower, p.disturbance_upper));
  return Preset{model, TubeSpec{BoxSet::interval(omega.first, omega.second)}, cost,
                StorageFunction::linear(scalar_vector(p.storage_slope))};
}

namespace {

GrowthParams growth_params_from_json(const nlohmann::json& j) {
  GrowthParams p;
  auto read = [&j](const char* key, double& target) {
    if (j.contains(key)) target = j.at(key).get<double>();
  };
  read("productivity", p.productivity);
  read("elasticity", p.elasticity);
  read("disturbance_lower", p.disturbance_lower);
  read("disturbance_upper", p.disturbance_upper);
  read("state_lower", p.state_lower);
  read("state_upper", p.state_upper);
  read("input_lower", p.input_lower);
  read("input_upper", p.input_upper);
  read("log_knot", p.log_knot);
  read("storage_slope", p.storage_slope);
  if (j.contains("omega")) {
    const auto& o = j.at("omega");
    if (!o.is_array() || o.size() != 2) {
      throw Error(ErrorCode::kConfig, "omega override must be [lower, upper]");
    }
    p.omega = std::make_pair(o[0].get<double>(), o[1].get<double>());
  }
  for (const auto& item : j.items()) {
    static const char* known[] = {"productivity", "elasticity", "disturbance_lower",
                                  "disturbance_upper", "state_lower", "state_upper",
                                  "input_lower", "input_upper", "log_knot",
                                  "storage_slope", "omega"};
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw Error(ErrorCode::kConfig, "unknown growth parameter '" + item.key() + "'");
  }
  return p;
}

}  // namespace

Preset make_preset(const std::string& name, const nlohmann::json& overrides) {
  if (name == "growth") {
    try {
      return make_growth_preset(growth_params_from_json(overrides));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kConfig, e.what());
    }
  }
  throw Error(ErrorCode::kConfig, "unknown model preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"growth"}; }

}  // namespace rempc
