#pragma once

#include "rempc/ocp.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace rempc {

enum class DisturbanceKind { kIidUniform, kSequence, kConstant };

/// Stream of disturbances inside a box W.
class DisturbanceSource {
 public:
  /// Independent uniform draws per component.
  static DisturbanceSource iid_uniform(BoxSet set, std::uint64_t seed);
  static DisturbanceSource sequence(BoxSet set, std::vector<Vector> values);
  /// Whitespace-separated numbers, one disturbance per line.
  static DisturbanceSource from_file(BoxSet set, const std::string& path);
  static DisturbanceSource constant(BoxSet set, Vector w);

  /// Throws kInvalidArgument when a sequence is exhausted.
  Vector next();

  DisturbanceKind kind() const { return kind_; }
  const BoxSet& set() const { return set_; }
  std::optional<std::uint64_t> seed() const;
  std::string describe() const;
  /// Name of the pseudo-random generator used for IID draws.
  static const char* generator_name();

 private:
  DisturbanceSource(DisturbanceKind kind, BoxSet set) : kind_(kind), set_(std::move(set)) {}

  DisturbanceKind kind_;
  BoxSet set_;
  std::uint64_t seed_ = 0;
  std::mt19937_64 engine_;
  std::vector<Vector> values_;
  std::size_t cursor_ = 0;
  std::string origin_;
};

struct StepRecord {
  int t = 0;
  Vector x;
  Vector z0;
  Vector z1;
  Vector v0;
  Vector u;
  Vector w;
  double cost_real = 0.0;
  double cost_nominal = 0.0;
  double value = 0.0;
  std::optional<double> rotated_value;
  std::optional<double> storage;
};

struct TraceMetadata {
  std::string model_name;
  int horizon = 0;
  int steps = 0;
  std::optional<std::uint64_t> seed;
  std::string disturbance;
  std::string generator;
  CostVariant variant = CostVariant::kNominal;
  DissMode diss_mode = DissMode::kNone;
  InitMode init_mode = InitMode::kFreeInTube;
  bool lyapunov = false;
};

struct ClosedLoopTrace {
  TraceMetadata meta;
  std::vector<StepRecord> steps;
  /// Robust OCP solution of every recorded step.
  std::vector<OcpSolution> solutions;
  /// Rotated solutions at z0*(t) when Lyapunov tracing is on.
  std::vector<OcpSolution> rotated_solutions;
  /// Set when a solve failed; steps holds everything before the failure.
  bool infeasible = false;
  int failed_step = -1;
  std::string failure;
};

struct ClosedLoopOptions {
  InitMode init_mode = InitMode::kFreeInTube;
  DissMode diss_mode = DissMode::kNone;
  bool lyapunov = false;
  OcpSolverOptions solver;
  RossOptions ross;
};

ClosedLoopTrace run_closed_loop(const OcpProblem& problem, int steps, const Vector& x0,
                                DisturbanceSource& disturbance, bool lyapunov = false);

/// Builds the problem (tightening + ROSS) and runs the loop.
ClosedLoopTrace run_closed_loop(const SystemModel& model, const TubeSpec& tube, const StageCost& cost,
                                const StorageFunction& storage, int horizon, int steps,
                                const Vector& x0, DisturbanceSource& disturbance,
                                const ClosedLoopOptions& options = {});

struct TraceInvariantReport {
  int tube_violations = 0;
  int constraint_violations = 0;
  double worst_tube_excess = 0.0;
  double worst_constraint_excess = 0.0;
};

/// Re-checks x - z0 in omega and (x, u) in Z on every recorded step.
TraceInvariantReport check_trace_invariants(const ClosedLoopTrace& trace, const SystemModel& model,
                                            const TubeSpec& tube, double tolerance = 1e-8);

struct Performance {
  double real = 0.0;
  double nominal = 0.0;
};

/// Averages of the real and nominal stage costs over the first `horizon` steps.
Performance perf_transient(const ClosedLoopTrace& trace, int horizon);
Performance perf_transient(const ClosedLoopTrace& trace);
/// Finite-run surrogate for the limsup: the largest running average over
/// T' in [T/2, T].
double perf_asymptotic(const ClosedLoopTrace& trace, bool nominal = false);

struct RossDistances {
  std::vector<double> nominal;  // |z0*(t) - z_s|
  std::vector<double> real;     // dist(x(t), z_s + omega)
};

RossDistances distance_to_ross(const ClosedLoopTrace& trace, const RossResult& ross,
                               const TubeSpec& tube);

void write_trace_csv(const ClosedLoopTrace& trace, const std::string& path);
std::string trace_csv(const ClosedLoopTrace& trace);
nlohmann::json trace_metadata(const ClosedLoopTrace& trace,
                              const nlohmann::json& config = nlohmann::json());
/// Writes `<path>.meta.json` next to a trace file.
void write_trace_metadata(const ClosedLoopTrace& trace, const std::string& path,
                          const nlohmann::json& config = nlohmann::json());

}  // namespace rempc
