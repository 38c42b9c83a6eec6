#include "rempc/diagnostics.hpp"

#include "rempc/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

namespace rempc {

std::vector<OccupancyEntry> turnpike_occupancy(const OcpSolution& solution, const RossResult& ross,
                                               const std::vector<double>& epsilons) {
  const int horizon = static_cast<int>(solution.v_seq.size());
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "empty open-loop solution");
  std::vector<double> distances(horizon);
  for (int k = 0; k < horizon; ++k) {
    const double dz = (solution.z_seq[k] - ross.z_s).squaredNorm();
    const double dv = (solution.v_seq[k] - ross.v_s).squaredNorm();
    distances[k] = std::sqrt(dz + dv);
  }
  std::vector<OccupancyEntry> out;
  for (const double eps : epsilons) {
    if (eps < 0.0) throw Error(ErrorCode::kInvalidArgument, "negative epsilon");
    OccupancyEntry e;
    e.epsilon = eps;
    e.count = static_cast<int>(std::count_if(distances.begin(), distances.end(),
                                             [eps](double d) { return d <= eps; }));
    e.fraction = static_cast<double>(e.count) / horizon;
    out.push_back(e);
  }
  return out;
}

DissipativityCheck check_strict_dissipativity(const SystemModel& model, const TubeSpec& tube,
                                              const StageCost& cost, const StorageFunction& storage,
                                              const RossResult& ross, int grid_density) {
  if (grid_density < 2) throw Error(ErrorCode::kInvalidArgument, "grid density must be >= 2");
  const BoxSet tightened = tighten_constraints(model.joint_constraints, tube.omega);
  const StageCost referenced =
      cost.has_ross_reference() ? cost : cost.with_ross_reference(ross.cost, tube);
  const CostEvaluator ell(referenced, model, tube);
  const int n = model.state_dim;
  const int m = model.input_dim;

  DissipativityCheck check;
  check.min_margin = std::numeric_limits<double>::infinity();
  for (const Vector& p : tightened.grid(grid_density)) {
    const Vector z = p.head(n);
    const Vector v = p.tail(m);
    const double value = eval_rotated(ell, storage, z, v);
    ++check.points;
    if (value < check.min_margin) {
      check.min_margin = value;
      check.z_argmin = z;
      check.v_argmin = v;
    }
  }
  const double dz = (check.z_argmin - ross.z_s).squaredNorm();
  const double dv = (check.v_argmin - ross.v_s).squaredNorm();
  check.argmin_distance = std::sqrt(dz + dv);
  const Vector width = tightened.width();
  check.grid_spacing = width.maxCoeff() / (grid_density - 1);
  check.dissipative = check.min_margin >= -1e-8;
  return check;
}

std::vector<double> check_closed_loop_dissipation(const ClosedLoopTrace& trace,
                                                  const OcpProblem& problem,
                                                  const DissipationOptions& options) {
  if (!problem.storage || !problem.ross) {
    throw Error(ErrorCode::kInvalidArgument, "dissipation check needs storage and ROSS");
  }
  const StorageFunction& storage = *problem.storage;
  const RossResult& ross = *problem.ross;
  const CostEvaluator ell(problem.cost, problem.model, problem.tube);
  const double reference = problem.cost.ross_cost_reference(problem.tube);
  std::vector<double> margins;
  for (std::size_t t = 0; t + 1 < trace.steps.size(); ++t) {
    const StepRecord& now = trace.steps[t];
    const StepRecord& next = trace.steps[t + 1];
    const double supply = ell.ell(now.z0, now.v0) - reference;
    double margin = storage(now.z0) + supply - storage(next.z0);
    if (options.strict) {
      const double dz = (now.z0 - ross.z_s).squaredNorm();
      const double dv = (now.v0 - ross.v_s).squaredNorm();
      const double r = std::sqrt(dz + dv);
      margin -= options.alpha ? options.alpha(r) : options.alpha_coefficient * r * r;
    }
    margins.push_back(margin);
  }
  return margins;
}

LyapunovTrace lyapunov_trace(const ClosedLoopTrace& trace, const OcpProblem& problem) {
  LyapunovTrace out;
  const bool stored = !trace.steps.empty() &&
                      std::all_of(trace.steps.begin(), trace.steps.end(),
                                  [](const StepRecord& r) { return r.rotated_value.has_value(); });
  if (stored) {
    for (const StepRecord& r : trace.steps) out.values.push_back(*r.rotated_value);
  } else if (!trace.steps.empty()) {
    out.recomputed = true;
    std::optional<OcpSolution> warm;
    for (const StepRecord& r : trace.steps) {
      OcpSolution sol = solve_rotated(problem, r.z0, warm ? &*warm : nullptr);
      out.values.push_back(sol.value);
      warm = std::move(sol);
    }
  }
  for (std::size_t t = 0; t + 1 < out.values.size(); ++t) {
    out.decrease.push_back(out.values[t] - out.values[t + 1]);
  }
  return out;
}

StabilitySummary practical_stability_summary(const ClosedLoopTrace& trace, const RossResult& ross,
                                             const TubeSpec& tube) {
  StabilitySummary s;
  const auto distances = distance_to_ross(trace, ross, tube).real;
  if (distances.empty()) return s;
  s.transient_peak = *std::max_element(distances.begin(), distances.end());
  const std::size_t first = distances.size() - (distances.size() + 3) / 4;
  s.ultimate_bound_estimate = *std::max_element(distances.begin() + first, distances.end());
  return s;
}

StorageMaxCheck check_storage_max_at_ross(const StorageFunction& storage, const BoxSet& states,
                                          const RossResult& ross, int grid_points) {
  StorageMaxCheck check;
  check.max_value = -std::numeric_limits<double>::infinity();
  const auto candidates = storage.is_linear() ? states.vertices() : states.grid(grid_points);
  for (const Vector& z : candidates) {
    const double value = storage(z);
    if (value > check.max_value) {
      check.max_value = value;
      check.argmax = z;
    }
  }
  check.value_at_ross = storage(ross.z_s);
  check.maximal_at_ross =
      check.value_at_ross >= check.max_value - 1e-12 * std::max(1.0, std::abs(check.max_value));
  return check;
}

DiagnosticsReport build_report(const ClosedLoopTrace& trace, const OcpProblem& problem,
                               const DiagnosticsOptions& options) {
  if (!problem.storage || !problem.ross) {
    throw Error(ErrorCode::kInvalidArgument, "diagnostics need storage and ROSS");
  }
  DiagnosticsReport report;
  if (!trace.solutions.empty()) {
    report.turnpike_occupancy = turnpike_occupancy(trace.solutions.front(), *problem.ross, options.epsilons);
    if (options.occupancy_per_step) {
      for (const OcpSolution& sol : trace.solutions) {
        report.turnpike_occupancy_per_step.push_back(
            turnpike_occupancy(sol, *problem.ross, options.epsilons));
      }
    }
  }
  report.dissipativity =
      check_strict_dissipativity(problem.model, problem.tube, problem.cost, *problem.storage,
                                 *problem.ross, options.dissipativity_grid);
  report.closed_loop_dissipation_margins = check_closed_loop_dissipation(trace, problem, options.dissipation);
  if (trace.meta.lyapunov) {
    const LyapunovTrace lyap = lyapunov_trace(trace, problem);
    report.lyapunov_values = lyap.values;
    report.lyapunov_decrease_margins = lyap.decrease;
  }
  const StabilitySummary s = practical_stability_summary(trace, *problem.ross, problem.tube);
  report.transient_peak = s.transient_peak;
  report.ultimate_bound_estimate = s.ultimate_bound_estimate;
  report.storage_max = check_storage_max_at_ross(
      *problem.storage, problem.tightened.slice(0, problem.model.state_dim), *problem.ross);
  return report;
}

namespace {

nlohmann::json to_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

nlohmann::json to_json(const std::vector<OccupancyEntry>& entries) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : entries) {
    out.push_back({{"epsilon", e.epsilon}, {"count", e.count}, {"fraction", e.fraction}});
  }
  return out;
}

double min_or_nan(const std::vector<double>& values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  return *std::min_element(values.begin(), values.end());
}

}  // namespace

std::string report_jsonl(const DiagnosticsReport& report, const nlohmann::json& config) {
  std::vector<nlohmann::json> records;
  records.push_back({{"check", "header"}, {"version", version()}, {"config", config}});
  records.push_back({{"check", "turnpike_occupancy"}, {"scope", "t=0"},
                     {"entries", to_json(report.turnpike_occupancy)}});
  if (!report.turnpike_occupancy_per_step.empty()) {
    nlohmann::json per_step = nlohmann::json::array();
    for (const auto& entries : report.turnpike_occupancy_per_step) per_step.push_back(to_json(entries));
    records.push_back({{"check", "turnpike_occupancy"}, {"scope", "per-step (extension)"},
                       {"entries", per_step}});
  }
  const DissipativityCheck& d = report.dissipativity;
  records.push_back({{"check", "strict_dissipativity"},
                     {"min_margin", d.min_margin},
                     {"z_argmin", to_json(d.z_argmin)},
                     {"v_argmin", to_json(d.v_argmin)},
                     {"argmin_distance", d.argmin_distance},
                     {"grid_spacing", d.grid_spacing},
                     {"points", d.points},
                     {"dissipative", d.dissipative}});
  const auto& cl = report.closed_loop_dissipation_margins;
  records.push_back({{"check", "closed_loop_dissipation"},
                     {"steps", cl.size()},
                     {"min_margin", cl.empty() ? nlohmann::json() : nlohmann::json(min_or_nan(cl))},
                     {"negative_steps", std::count_if(cl.begin(), cl.end(), [](double m) { return m < -1e-8; })}});
  if (!report.lyapunov_values.empty()) {
    const auto& dec = report.lyapunov_decrease_margins;
    records.push_back({{"check", "lyapunov_decrease"},
                       {"steps", dec.size()},
                       {"min_margin", dec.empty() ? nlohmann::json() : nlohmann::json(min_or_nan(dec))},
                       {"min_value", min_or_nan(report.lyapunov_values)}});
  }
  records.push_back({{"check", "practical_stability"},
                     {"transient_peak", report.transient_peak},
                     {"ultimate_bound_estimate", report.ultimate_bound_estimate}});
  const StorageMaxCheck& s = report.storage_max;
  records.push_back({{"check", "storage_max_at_ross"},
                     {"argmax", to_json(s.argmax)},
                     {"max_value", s.max_value},
                     {"value_at_ross", s.value_at_ross},
                     {"maximal_at_ross", s.maximal_at_ross}});
  std::string out;
  for (const auto& r : records) out += r.dump() + '\n';
  return out;
}

void write_report_jsonl(const DiagnosticsReport& report, const std::string& path,
                        const nlohmann::json& config) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << report_jsonl(report, config);
}

void write_margins_csv(const DiagnosticsReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << "t,closed_loop_margin,lyapunov_value,lyapunov_margin\n";
  const std::size_t rows = std::max(report.closed_loop_dissipation_margins.size(),
                                    report.lyapunov_values.size());
  char buf[32];
  auto cell = [&buf](const std::vector<double>& values, std::size_t t) -> std::string {
    if (t >= values.size()) return "";
    std::snprintf(buf, sizeof buf, "%.17g", values[t]);
    return buf;
  };
  for (std::size_t t = 0; t < rows; ++t) {
    out << t << ',' << cell(report.closed_loop_dissipation_margins, t) << ','
        << cell(report.lyapunov_values, t) << ',' << cell(report.lyapunov_decrease_margins, t) << '\n';
  }
}

}  // namespace rempc
