#pragma once

#include "rempc/costs.hpp"
#include "rempc/steady_state.hpp"

#include <optional>
#include <vector>

namespace rempc {

enum class ObjectiveMode { kOriginal, kRotated };
/// How the nominal initial state is chosen at t = 0.
enum class InitMode { kFreeInTube, kFixed, kNearestToRoss };
/// Dissipativity-inducing modification of the robust OCP for t >= 1.
enum class DissMode { kNone, kLambdaInit, kFixInit };

const char* to_string(ObjectiveMode mode);
const char* to_string(InitMode mode);
const char* to_string(DissMode mode);
InitMode parse_init_mode(const std::string& name);
DissMode parse_diss_mode(const std::string& name);

struct OcpSolverOptions {
  double stationarity_tolerance = 1e-7;
  double feasibility_tolerance = 1e-8;
  int max_inner_iterations = 400;
  int max_outer_iterations = 40;
  double initial_penalty = 10.0;
};

/// Terminal-condition-free OCP over the horizon N with stage cost l.
struct OcpProblem {
  int horizon = 1;
  SystemModel model;
  BoxSet tightened;
  /// Variant-dispatching stage cost; must carry the ROSS reference for the
  /// rotated objective.
  StageCost cost;
  TubeSpec tube;
  std::optional<StorageFunction> storage;
  std::optional<RossResult> ross;
  ObjectiveMode objective_mode = ObjectiveMode::kOriginal;
  InitMode init_mode = InitMode::kFreeInTube;
  DissMode diss_mode = DissMode::kNone;
  OcpSolverOptions solver;

  /// Throws kInvalidArgument when the fields are inconsistent.
  void validate() const;
};

struct OcpSolution {
  Vector z0;
  std::vector<Vector> v_seq;
  /// Single-shooting rollout of (z0, v_seq); length N + 1.
  std::vector<Vector> z_seq;
  /// Sum of the stage costs (l or the rotated cost) along the trajectory.
  double value = 0.0;
  /// Projected-gradient norm of the smoothed problem, divided by the largest
  /// per-stage gradient term (at least 1).
  double stationarity_residual = 0.0;
  double feasibility_violation = 0.0;
  int starts_tried = 0;
  bool converged = false;
};

/// Given stage cost, tube and model: tightens the constraints, computes the
/// ROSS for `cost`'s variant and returns a ready-to-solve problem.
OcpProblem make_problem(const SystemModel& model, const StageCost& cost, const TubeSpec& tube,
                        const StorageFunction& storage, int horizon,
                        const RossOptions& ross_options = {});

/// V_N(z0): minimizes over v_seq with z0 fixed.
OcpSolution solve_nominal(const OcpProblem& problem, const Vector& z0,
                          const OcpSolution* warm = nullptr);

/// Robust OCP at the measured state x. `step` is the MPC time index; the
/// dissipativity modes read `prev` (the solution at step - 1) for step >= 1.
OcpSolution solve_robust(const OcpProblem& problem, const Vector& x, int step = 0,
                         const OcpSolution* warm = nullptr, const OcpSolution* prev = nullptr);

/// Rotated value function: as solve_nominal with the rotated stage cost.
OcpSolution solve_rotated(const OcpProblem& problem, const Vector& z0,
                          const OcpSolution* warm = nullptr);

/// Objective of (z0, v_seq) under the given mode, recomputed from scratch.
double trajectory_objective(const OcpProblem& problem, ObjectiveMode mode, const Vector& z0,
                            const std::vector<Vector>& v_seq);
std::vector<Vector> rollout(const SystemModel& model, const Vector& z0,
                            const std::vector<Vector>& v_seq);

/// Box {z : x - z in omega} intersected with the tightened state box.
BoxSet initial_state_box(const OcpProblem& problem, const Vector& x);

/// Backward value iteration on uniform grids for scalar-state problems.
class DpValueTable {
 public:
  DpValueTable(const OcpProblem& problem, int horizon, int state_grid_points,
               int input_grid_points, ObjectiveMode mode = ObjectiveMode::kOriginal);

  /// V_k(z) by linear interpolation; +inf outside the state box or where no
  /// admissible input exists. V_0 = 0.
  double value(int stages, double z) const;
  int horizon() const { return horizon_; }
  /// Greedy rollout of the tabulated policy from z0 over `stages` steps.
  OcpSolution policy_rollout(int stages, double z0) const;

 private:
  double stage_cost(double z, double v) const;
  double best_input(int stages, double z, double* cost) const;

  OcpProblem problem_;
  ObjectiveMode mode_;
  int horizon_;
  std::vector<double> states_;
  std::vector<double> inputs_;
  std::vector<std::vector<double>> values_;
};

double value_dp_oracle(const OcpProblem& problem, const Vector& z0, int state_grid_points,
                       int input_grid_points);

}  // namespace rempc
