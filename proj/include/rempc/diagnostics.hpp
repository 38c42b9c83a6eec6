#pragma once

#include "rempc/simulator.hpp"

#include <nlohmann/json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace rempc {

struct OccupancyEntry {
  double epsilon = 0.0;
  int count = 0;
  double fraction = 0.0;
};

/// #{k in [0, N-1] : |(z(k), v(k)) - (z_s, v_s)| <= eps} for each eps.
std::vector<OccupancyEntry> turnpike_occupancy(const OcpSolution& solution, const RossResult& ross,
                                               const std::vector<double>& epsilons);

struct DissipativityCheck {
  double min_margin = 0.0;
  Vector z_argmin;
  Vector v_argmin;
  /// Euclidean distance of the argmin to (z_s, v_s).
  double argmin_distance = 0.0;
  /// Largest grid spacing over all coordinates.
  double grid_spacing = 0.0;
  int points = 0;
  /// min_margin >= -1e-8.
  bool dissipative = false;
};

/// Minimum of the rotated cost over a tensor grid of the tightened set.
DissipativityCheck check_strict_dissipativity(const SystemModel& model, const TubeSpec& tube,
                                              const StageCost& cost, const StorageFunction& storage,
                                              const RossResult& ross, int grid_density);

struct DissipationOptions {
  bool strict = false;
  /// Coefficient of the default alpha(r) = c r^2.
  double alpha_coefficient = 0.01;
  /// Overrides the quadratic when set.
  std::function<double(double)> alpha;
};

/// margin(t) = lambda(z0(t)) + s(z0(t), v0(t)) - lambda(z0(t+1)) [- alpha(r)],
/// one entry per consecutive pair of recorded steps.
std::vector<double> check_closed_loop_dissipation(const ClosedLoopTrace& trace,
                                                  const OcpProblem& problem,
                                                  const DissipationOptions& options = {});

struct LyapunovTrace {
  std::vector<double> values;
  /// values[t] - values[t + 1].
  std::vector<double> decrease;
  /// True when the rotated values had to be solved here rather than read
  /// from the trace.
  bool recomputed = false;
};

LyapunovTrace lyapunov_trace(const ClosedLoopTrace& trace, const OcpProblem& problem);

struct StabilitySummary {
  double transient_peak = 0.0;
  double ultimate_bound_estimate = 0.0;
};

/// Peak and final-quarter maximum of dist(x(t), z_s + omega).
StabilitySummary practical_stability_summary(const ClosedLoopTrace& trace, const RossResult& ross,
                                             const TubeSpec& tube);

struct StorageMaxCheck {
  Vector argmax;
  double max_value = 0.0;
  double value_at_ross = 0.0;
  /// lambda(z_s) >= max over the state box (up to 1e-12).
  bool maximal_at_ross = false;
};

/// Is the storage function maximal at z_s over the tightened state box?
/// Linear storage is checked on the vertices, anything else on a grid.
StorageMaxCheck check_storage_max_at_ross(const StorageFunction& storage, const BoxSet& states,
                                          const RossResult& ross, int grid_points = 101);

struct DiagnosticsOptions {
  std::vector<double> epsilons{0.01, 0.05, 0.1, 0.5};
  /// Also evaluate occupancy on every step's solution, not only t = 0.
  bool occupancy_per_step = false;
  int dissipativity_grid = 101;
  DissipationOptions dissipation;
};

struct DiagnosticsReport {
  std::vector<OccupancyEntry> turnpike_occupancy;
  /// Per-step occupancy (extension; empty unless requested).
  std::vector<std::vector<OccupancyEntry>> turnpike_occupancy_per_step;
  DissipativityCheck dissipativity;
  std::vector<double> closed_loop_dissipation_margins;
  std::vector<double> lyapunov_decrease_margins;
  std::vector<double> lyapunov_values;
  double ultimate_bound_estimate = 0.0;
  double transient_peak = 0.0;
  StorageMaxCheck storage_max;
};

DiagnosticsReport build_report(const ClosedLoopTrace& trace, const OcpProblem& problem,
                               const DiagnosticsOptions& options = {});

/// One JSON record per check, one per line.
std::string report_jsonl(const DiagnosticsReport& report, const nlohmann::json& config = nlohmann::json());
void write_report_jsonl(const DiagnosticsReport& report, const std::string& path,
                        const nlohmann::json& config = nlohmann::json());
/// Columns t, closed_loop_margin, lyapunov_value, lyapunov_margin.
void write_margins_csv(const DiagnosticsReport& report, const std::string& path);

}  // namespace rempc
