#include "rempc/config.hpp"

#include <fstream>
#include <set>

namespace rempc {

void RunConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kConfig, what); };
  if (horizon < 1) fail("horizon must be >= 1");
  if (steps < 0) fail("steps must be >= 0");
  if (seeds < 1) fail("seeds must be >= 1");
  if (ross_input_grid < 2) fail("ross_input_grid must be >= 2");
  if (omega_grid < 0 || omega_grid == 1) fail("omega_grid must be 0 or >= 2");
  if (dissipativity_grid < 2) fail("dissipativity_grid must be >= 2");
  if (!(stationarity_tolerance > 0.0) || !(feasibility_tolerance > 0.0)) fail("tolerances must be positive");
  if (omega && omega->size() != 2) fail("omega must be [lo, hi]");
  if (disturbance != "iid" && disturbance != "constant" && disturbance != "sequence") {
    fail("disturbance must be iid, constant or sequence");
  }
  if (disturbance == "constant" && !disturbance_value) fail("constant disturbance needs disturbance_value");
  if (disturbance == "sequence" && disturbance_file.empty()) fail("sequence disturbance needs disturbance_file");
  for (const int n : turnpike_horizons) {
    if (n < 1) fail("turnpike horizons must be >= 1");
  }
  for (const double e : epsilons) {
    if (e < 0.0) fail("epsilons must be >= 0");
  }
  if (out.empty()) fail("out must not be empty");
  config_cost(*this);
  config_diss(*this);
  config_init(*this);
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json j;
  j["model"] = c.model;
  j["model_params"] = c.model_params;
  j["horizon"] = c.horizon;
  j["steps"] = c.steps;
  j["seed"] = c.seed;
  j["seeds"] = c.seeds;
  j["cost"] = c.cost;
  j["diss"] = c.diss;
  j["init"] = c.init;
  j["x0"] = c.x0 ? nlohmann::json(*c.x0) : nlohmann::json();
  j["omega"] = c.omega ? nlohmann::json(*c.omega) : nlohmann::json();
  j["disturbance"] = c.disturbance;
  j["disturbance_value"] = c.disturbance_value ? nlohmann::json(*c.disturbance_value) : nlohmann::json();
  j["disturbance_file"] = c.disturbance_file;
  j["lyapunov"] = c.lyapunov;
  j["ross_input_grid"] = c.ross_input_grid;
  j["omega_grid"] = c.omega_grid;
  j["dissipativity_grid"] = c.dissipativity_grid;
  j["stationarity_tolerance"] = c.stationarity_tolerance;
  j["feasibility_tolerance"] = c.feasibility_tolerance;
  j["turnpike_horizons"] = c.turnpike_horizons;
  j["epsilons"] = c.epsilons;
  j["turnpike_z0"] = c.turnpike_z0;
  j["out"] = c.out;
  return j;
}

namespace {

template <typename T>
void read(const nlohmann::json& j, const char* key, T& target) {
  if (j.contains(key)) target = j.at(key).get<T>();
}

template <typename T>
void read_optional(const nlohmann::json& j, const char* key, std::optional<T>& target) {
  if (!j.contains(key)) return;
  if (j.at(key).is_null()) {
    target.reset();
  } else {
    target = j.at(key).get<T>();
  }
}

}  // namespace

RunConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  static const std::set<std::string> known{
      "model", "model_params", "horizon", "steps", "seed", "seeds", "cost", "diss", "init", "x0",
      "omega", "disturbance", "disturbance_value", "disturbance_file", "lyapunov",
      "ross_input_grid", "omega_grid", "dissipativity_grid", "stationarity_tolerance",
      "feasibility_tolerance", "turnpike_horizons", "epsilons", "turnpike_z0", "out", "version"};
  for (const auto& item : j.items()) {
    if (!known.count(item.key())) throw Error(ErrorCode::kConfig, "unknown config key '" + item.key() + "'");
  }
  RunConfig c;
  try {
    read(j, "model", c.model);
    if (j.contains("model_params")) {
      c.model_params = j.at("model_params");
      if (!c.model_params.is_object()) throw Error(ErrorCode::kConfig, "model_params must be an object");
    }
    read(j, "horizon", c.horizon);
    read(j, "steps", c.steps);
    read(j, "seed", c.seed);
    read(j, "seeds", c.seeds);
    read(j, "cost", c.cost);
    read(j, "diss", c.diss);
    read(j, "init", c.init);
    read_optional(j, "x0", c.x0);
    read_optional(j, "omega", c.omega);
    read(j, "disturbance", c.disturbance);
    read_optional(j, "disturbance_value", c.disturbance_value);
    read(j, "disturbance_file", c.disturbance_file);
    read(j, "lyapunov", c.lyapunov);
    read(j, "ross_input_grid", c.ross_input_grid);
    read(j, "omega_grid", c.omega_grid);
    read(j, "dissipativity_grid", c.dissipativity_grid);
    read(j, "stationarity_tolerance", c.stationarity_tolerance);
    read(j, "feasibility_tolerance", c.feasibility_tolerance);
    read(j, "turnpike_horizons", c.turnpike_horizons);
    read(j, "epsilons", c.epsilons);
    read(j, "turnpike_z0", c.turnpike_z0);
    read(j, "out", c.out);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kConfig, "cannot open config " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, path + ": " + e.what());
  }
  return config_from_json(j);
}

CostVariant config_cost(const RunConfig& config) {
  try {
    return parse_cost_variant(config.cost);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
}

DissMode config_diss(const RunConfig& config) { return parse_diss_mode(config.diss); }
InitMode config_init(const RunConfig& config) { return parse_init_mode(config.init); }

Preset config_preset(const RunConfig& config) {
  nlohmann::json params = config.model_params;
  if (config.omega) params["omega"] = *config.omega;
  return make_preset(config.model, params);
}

OcpProblem config_problem(const RunConfig& config, const Preset& preset) {
  RossOptions ross;
  ross.input_grid_points = config.ross_input_grid;
  const StageCost cost =
      preset.cost.with_variant(config_cost(config)).with_omega_grid_points(config.omega_grid);
  OcpProblem problem =
      make_problem(preset.model, cost, preset.tube, preset.storage, config.horizon, ross);
  problem.init_mode = config_init(config);
  problem.diss_mode = config_diss(config);
  problem.solver.stationarity_tolerance = config.stationarity_tolerance;
  problem.solver.feasibility_tolerance = config.feasibility_tolerance;
  return problem;
}

DisturbanceSource config_disturbance(const RunConfig& config, const Preset& preset,
                                     std::uint64_t seed) {
  const BoxSet& set = preset.model.disturbance_set;
  if (config.disturbance == "constant") {
    const std::vector<double>& w = *config.disturbance_value;
    if (static_cast<int>(w.size()) != set.dim()) {
      throw Error(ErrorCode::kConfig, "disturbance_value has the wrong dimension");
    }
    Vector value(set.dim());
    for (int i = 0; i < set.dim(); ++i) value[i] = w[i];
    return DisturbanceSource::constant(set, value);
  }
  if (config.disturbance == "sequence") return DisturbanceSource::from_file(set, config.disturbance_file);
  return DisturbanceSource::iid_uniform(set, seed);
}

}  // namespace rempc
