#include "rempc/ocp.hpp"

#include "rempc/box_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace rempc {

const char* to_string(ObjectiveMode mode) {
  return mode == ObjectiveMode::kOriginal ? "original" : "rotated";
}

const char* to_string(InitMode mode) {
  switch (mode) {
    case InitMode::kFreeInTube: return "free";
    case InitMode::kFixed: return "fixed";
    case InitMode::kNearestToRoss: return "nearest";
  }
  return "unknown";
}

const char* to_string(DissMode mode) {
  switch (mode) {
    case DissMode::kNone: return "none";
    case DissMode::kLambdaInit: return "lambda";
    case DissMode::kFixInit: return "fix";
  }
  return "unknown";
}

InitMode parse_init_mode(const std::string& name) {
  if (name == "free") return InitMode::kFreeInTube;
  if (name == "fixed") return InitMode::kFixed;
  if (name == "nearest") return InitMode::kNearestToRoss;
  throw Error(ErrorCode::kConfig, "unknown init mode '" + name + "'");
}

DissMode parse_diss_mode(const std::string& name) {
  if (name == "none") return DissMode::kNone;
  if (name == "lambda") return DissMode::kLambdaInit;
  if (name == "fix") return DissMode::kFixInit;
  throw Error(ErrorCode::kConfig, "unknown dissipativity mode '" + name + "'");
}

void OcpProblem::validate() const {
  if (horizon < 1) throw Error(ErrorCode::kInvalidArgument, "horizon must be >= 1");
  model.validate();
  if (tightened.dim() != model.state_dim + model.input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "tightened set dimension");
  }
  if (tube.omega.dim() != model.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "omega dimension");
  }
  const bool needs_storage =
      objective_mode == ObjectiveMode::kRotated || diss_mode == DissMode::kLambdaInit;
  if (needs_storage && !storage) {
    throw Error(ErrorCode::kInvalidArgument, "rotated objective and LAMBDA_INIT need a storage function");
  }
  if (objective_mode == ObjectiveMode::kRotated && !ross) {
    throw Error(ErrorCode::kInvalidArgument, "rotated objective needs a computed ROSS");
  }
  if (init_mode == InitMode::kNearestToRoss && !ross) {
    throw Error(ErrorCode::kInvalidArgument, "NEAREST_TO_ROSS needs a computed ROSS");
  }
}

OcpProblem make_problem(const SystemModel& model, const StageCost& cost, const TubeSpec& tube,
                        const StorageFunction& storage, int horizon,
                        const RossOptions& ross_options) {
  OcpProblem problem;
  problem.horizon = horizon;
  problem.model = model;
  problem.tube = tube;
  problem.tightened = tighten_constraints(model.joint_constraints, tube.omega);
  problem.storage = storage;
  problem.ross = compute_ross(model, problem.tightened, cost, tube, ross_options);
  problem.cost = cost.with_ross_reference(problem.ross->cost, tube);
  problem.validate();
  return problem;
}

std::vector<Vector> rollout(const SystemModel& model, const Vector& z0,
                            const std::vector<Vector>& v_seq) {
  std::vector<Vector> z(v_seq.size() + 1);
  z[0] = z0;
  for (std::size_t k = 0; k < v_seq.size(); ++k) z[k + 1] = step_nominal(model, z[k], v_seq[k]);
  return z;
}

double trajectory_objective(const OcpProblem& problem, ObjectiveMode mode, const Vector& z0,
                            const std::vector<Vector>& v_seq) {
  const CostEvaluator ell(problem.cost, problem.model, problem.tube);
  const auto z = rollout(problem.model, z0, v_seq);
  double sum = 0.0;
  for (std::size_t k = 0; k < v_seq.size(); ++k) {
    sum += mode == ObjectiveMode::kOriginal ? ell.ell(z[k], v_seq[k])
                                            : eval_rotated(ell, *problem.storage, z[k], v_seq[k]);
  }
  return sum;
}

BoxSet initial_state_box(const OcpProblem& problem, const Vector& x) {
  if (x.size() != problem.model.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "measured state dimension");
  }
  const BoxSet tube_box = problem.tube.omega.negated().translated(x);
  return tube_box.intersect(problem.tightened.slice(0, problem.model.state_dim));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// How z0 enters the decision problem.
struct InitialState {
  bool free = false;
  Vector fixed;
  BoxSet box;  // used when free
  /// lambda(z0) <= bound handled by the augmented Lagrangian.
  std::optional<double> storage_bound;
  /// Start value for z0 when free and no warm start is available.
  Vector hint;
};

/// Single-shooting transcription: y = [z0 (when free), v_0, ..., v_{N-1}].
/// State bounds on z(1..N-1) and the optional storage constraint on z0 are
/// inequality constraints c(y) <= 0 handled by the augmented Lagrangian.
class Transcription {
 public:
  Transcription(const OcpProblem& problem, ObjectiveMode mode, InitialState init)
      : problem_(problem),
        mode_(mode),
        init_(std::move(init)),
        ell_(problem.cost, problem.model, problem.tube),
        n_(problem.model.state_dim),
        m_(problem.model.input_dim),
        horizon_(problem.horizon),
        offset_(init_.free ? n_ : 0),
        states_(problem.tightened.slice(0, n_)),
        inputs_(problem.tightened.slice(n_, m_)),
        z_(horizon_ + 1) {
    if (mode_ == ObjectiveMode::kRotated) {
      reference_ = problem.cost.ross_cost_reference(problem.tube);
    }
  }

  int size() const { return offset_ + horizon_ * m_; }
  int constraint_count() const {
    return 2 * n_ * std::max(horizon_ - 1, 0) + (init_.storage_bound ? 1 : 0);
  }

  Eigen::VectorXd lower() const { return bounds(true); }
  Eigen::VectorXd upper() const { return bounds(false); }

  Vector z0(const Eigen::VectorXd& y) const {
    if (!init_.free) return init_.fixed;
    Vector z(n_);
    for (int i = 0; i < n_; ++i) z[i] = y[i];
    return z;
  }

  std::vector<Vector> inputs(const Eigen::VectorXd& y) const {
    std::vector<Vector> v(horizon_, Vector(m_));
    for (int k = 0; k < horizon_; ++k) {
      for (int i = 0; i < m_; ++i) v[k][i] = y[offset_ + k * m_ + i];
    }
    return v;
  }

  Eigen::VectorXd pack(const Vector& z0, const std::vector<Vector>& v) const {
    Eigen::VectorXd y(size());
    for (int i = 0; i < offset_; ++i) y[i] = z0[i];
    for (int k = 0; k < horizon_; ++k) {
      for (int i = 0; i < m_; ++i) y[offset_ + k * m_ + i] = v[k][i];
    }
    return y;
  }

  /// Constraint values c(y) (<= 0 when satisfied), in a fixed order.
  Eigen::VectorXd constraints(const Eigen::VectorXd& y) const {
    rollout_into(y);
    Eigen::VectorXd c(constraint_count());
    int j = 0;
    for (int k = 1; k < horizon_; ++k) {
      for (int i = 0; i < n_; ++i) {
        c[j++] = states_.lower()[i] - z_[k][i];
        c[j++] = z_[k][i] - states_.upper()[i];
      }
    }
    if (init_.storage_bound) c[j++] = (*problem_.storage)(z_[0]) - *init_.storage_bound;
    return c;
  }

  /// Violation of every constraint including a fixed z0 outside the state box.
  double violation(const Eigen::VectorXd& y) const {
    double worst = 0.0;
    const Eigen::VectorXd c = constraints(y);
    if (c.size() > 0) worst = std::max(worst, c.maxCoeff());
    if (!init_.free) {
      for (int i = 0; i < n_; ++i) {
        worst = std::max({worst, states_.lower()[i] - init_.fixed[i],
                          init_.fixed[i] - states_.upper()[i]});
      }
    }
    return worst;
  }

  /// Augmented Lagrangian value and gradient (adjoint recursion).
  double evaluate(const Eigen::VectorXd& y, Eigen::VectorXd& grad, const Eigen::VectorXd& mu,
                  double rho) const {
    rollout_into(y);
    grad.resize(size());
    double value = 0.0;
    Vector p = Vector::Zero(n_);
    if (mode_ == ObjectiveMode::kRotated) {
      value -= (*problem_.storage)(z_[horizon_]);
      p = -problem_.storage->gradient(z_[horizon_]);
    }
    Vector gz(n_), gv(m_);
    Matrix a(n_, n_), b(n_, m_);
    gradient_scale_ = 1.0;
    for (int k = horizon_ - 1; k >= 0; --k) {
      value += ell_.ell_with_gradient(z_[k], v_[k], gz, gv);
      if (k >= 1) {
        // Constraints of stage k occupy [2 n (k - 1), 2 n k).
        int j = 2 * n_ * (k - 1);
        for (int i = 0; i < n_; ++i) {
          const double c_lo = states_.lower()[i] - z_[k][i];
          const double c_hi = z_[k][i] - states_.upper()[i];
          value += penalty(c_lo, mu[j], rho);
          gz[i] -= penalty_slope(c_lo, mu[j], rho);
          ++j;
          value += penalty(c_hi, mu[j], rho);
          gz[i] += penalty_slope(c_hi, mu[j], rho);
          ++j;
        }
      }
      nominal_jacobian(problem_.model, z_[k], v_[k], a, b);
      const Vector carried = b.transpose() * p;
      const Vector gv_total = gv + carried;
      gradient_scale_ = std::max({gradient_scale_, gv.lpNorm<Eigen::Infinity>(),
                                  carried.lpNorm<Eigen::Infinity>()});
      for (int i = 0; i < m_; ++i) grad[offset_ + k * m_ + i] = gv_total[i];
      p = gz + a.transpose() * p;
    }
    if (mode_ == ObjectiveMode::kRotated) {
      value += (*problem_.storage)(z_[0]) - horizon_ * reference_;
      p += problem_.storage->gradient(z_[0]);
    }
    if (init_.storage_bound) {
      const int last = constraint_count() - 1;
      const double c = (*problem_.storage)(z_[0]) - *init_.storage_bound;
      value += penalty(c, mu[last], rho);
      p += penalty_slope(c, mu[last], rho) * problem_.storage->gradient(z_[0]);
    }
    for (int i = 0; i < offset_; ++i) grad[i] = p[i];
    return value;
  }

  /// Largest magnitude among the per-stage terms summed into the input
  /// gradient at the last evaluate() call (at least 1). Stationarity is
  /// measured relative to it, since cancellation of large terms limits the
  /// attainable absolute accuracy.
  double gradient_scale() const { return gradient_scale_; }

 private:
  static double penalty(double c, double mu, double rho) {
    const double shifted = std::max(0.0, mu + rho * c);
    return (shifted * shifted - mu * mu) / (2.0 * rho);
  }
  static double penalty_slope(double c, double mu, double rho) {
    return std::max(0.0, mu + rho * c);
  }

  Eigen::VectorXd bounds(bool lower) const {
    Eigen::VectorXd out(size());
    for (int i = 0; i < offset_; ++i) {
      out[i] = lower ? init_.box.lower()[i] : init_.box.upper()[i];
    }
    for (int k = 0; k < horizon_; ++k) {
      for (int i = 0; i < m_; ++i) {
        out[offset_ + k * m_ + i] = lower ? inputs_.lower()[i] : inputs_.upper()[i];
      }
    }
    return out;
  }

  void rollout_into(const Eigen::VectorXd& y) const {
    v_ = inputs(y);
    z_[0] = z0(y);
    for (int k = 0; k < horizon_; ++k) z_[k + 1] = step_nominal(problem_.model, z_[k], v_[k]);
  }

  const OcpProblem& problem_;
  ObjectiveMode mode_;
  InitialState init_;
  CostEvaluator ell_;
  int n_, m_, horizon_, offset_;
  BoxSet states_, inputs_;
  double reference_ = 0.0;
  mutable std::vector<Vector> z_;
  mutable std::vector<Vector> v_;
  mutable double gradient_scale_ = 1.0;
};

struct StartResult {
  Eigen::VectorXd y;
  double objective = kInf;
  double stationarity = kInf;
  double violation = kInf;
  bool converged = false;
};

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

StartResult run_augmented_lagrangian(const Transcription& tr, const Eigen::VectorXd& start,
                                     const OcpSolverOptions& options) {
  const Eigen::VectorXd lower = tr.lower();
  const Eigen::VectorXd upper = tr.upper();
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(tr.constraint_count());
  double rho = options.initial_penalty;
  double previous_violation = kInf;

  BoxSolverOptions inner;
  inner.max_iterations = options.max_inner_iterations;
  inner.tolerance = 0.1 * options.stationarity_tolerance;

  StartResult out;
  out.y = start.cwiseMax(lower).cwiseMin(upper);
  for (int outer = 0; outer < options.max_outer_iterations; ++outer) {
    const auto objective = [&](const Eigen::VectorXd& y, Eigen::VectorXd& g) {
      return tr.evaluate(y, g, mu, rho);
    };
    const BoxSolverResult res = minimize_in_box(objective, lower, upper, out.y, inner);
    out.y = res.y;
    Eigen::VectorXd g;
    tr.evaluate(out.y, g, mu, rho);
    out.stationarity = res.projected_gradient / tr.gradient_scale();
    const Eigen::VectorXd c = tr.constraints(out.y);
    out.violation = tr.violation(out.y);
    // The inner solver aims 10x below the target; reaching the target itself
    // is what counts.
    out.converged = out.stationarity <= options.stationarity_tolerance;
    if (out.violation <= options.feasibility_tolerance) {
      if (out.converged || c.size() == 0) break;
    }
    if (c.size() == 0) break;
    for (Eigen::Index j = 0; j < c.size(); ++j) mu[j] = std::max(0.0, mu[j] + rho * c[j]);
    if (out.violation > 0.25 * previous_violation) rho = std::min(rho * 10.0, 1e12);
    previous_violation = out.violation;
  }
  return out;
}

Eigen::VectorXd constant_inputs(const Transcription& tr, const Vector& z0, const Vector& v,
                                int horizon) {
  return tr.pack(z0, std::vector<Vector>(horizon, v));
}

OcpSolution solve_with(const OcpProblem& problem, ObjectiveMode mode, InitialState init,
                       const OcpSolution* warm) {
  problem.validate();
  const int n = problem.model.state_dim;
  const int m = problem.model.input_dim;
  const int horizon = problem.horizon;
  if (init.free) {
    bool degenerate = true;
    for (int i = 0; i < n; ++i) degenerate = degenerate && init.box.lower()[i] == init.box.upper()[i];
    if (degenerate && !init.storage_bound) {
      init.free = false;
      init.fixed = init.box.lower();
    }
  }
  const Transcription tr(problem, mode, init);
  const BoxSet inputs = problem.tightened.slice(n, m);
  const Vector z0_start = init.free ? init.box.project(init.hint) : init.fixed;

  std::vector<Eigen::VectorXd> starts;
  if (warm && static_cast<int>(warm->v_seq.size()) == horizon) {
    std::vector<Vector> shifted(warm->v_seq.begin() + 1, warm->v_seq.end());
    shifted.push_back(problem.ross ? problem.ross->v_s : warm->v_seq.back());
    const Vector z0_warm = init.free ? init.box.project(warm->z_seq[1]) : init.fixed;
    starts.push_back(tr.pack(z0_warm, shifted));
  }
  if (problem.ross) starts.push_back(constant_inputs(tr, z0_start, inputs.project(problem.ross->v_s), horizon));
  starts.push_back(constant_inputs(tr, z0_start, inputs.center(), horizon));
  starts.push_back(constant_inputs(tr, z0_start, inputs.lower(), horizon));
  starts.push_back(constant_inputs(tr, z0_start, inputs.upper(), horizon));

  std::vector<Eigen::VectorXd> distinct;
  for (const auto& s : starts) {
    const bool seen = std::any_of(distinct.begin(), distinct.end(),
                                  [&s](const Eigen::VectorXd& d) { return d == s; });
    if (!seen) distinct.push_back(s);
  }

  // Starts run in the order above. Once kConsensus converged starts agree on
  // the best objective the remaining ones (the box vertices, which are slow
  // from deep inside the relaxed-log region) are skipped.
  constexpr int kConsensus = 3;
  std::optional<StartResult> best;
  std::vector<double> converged_objectives;
  int tried = 0;
  for (const auto& start : distinct) {
    ++tried;
    StartResult r = run_augmented_lagrangian(tr, start, problem.solver);
    if (r.violation > problem.solver.feasibility_tolerance) continue;
    r.objective = trajectory_objective(problem, mode, tr.z0(r.y), tr.inputs(r.y));
    if (!std::isfinite(r.objective)) continue;
    if (r.converged) converged_objectives.push_back(r.objective);
    if (!best || r.objective < best->objective) best = std::move(r);
    if (best->converged) {
      const double tol = 1e-9 * std::max(1.0, std::abs(best->objective));
      const auto agree = std::count_if(converged_objectives.begin(), converged_objectives.end(),
                                       [&](double v) { return std::abs(v - best->objective) <= tol; });
      if (agree >= kConsensus) break;
    }
  }
  const bool any_converged = !converged_objectives.empty();
  if (!best) {
    throw Error(ErrorCode::kInfeasible, "no start reached feasibility " +
                                            std::to_string(problem.solver.feasibility_tolerance));
  }
  if (!any_converged) {
    throw Error(ErrorCode::kMaxIterations,
                "no feasible start met the stationarity tolerance (best residual " +
                    format_double(best->stationarity) + ")");
  }

  OcpSolution sol;
  sol.z0 = tr.z0(best->y);
  sol.v_seq = tr.inputs(best->y);
  sol.z_seq = rollout(problem.model, sol.z0, sol.v_seq);
  sol.value = best->objective;
  sol.stationarity_residual = best->stationarity;
  sol.feasibility_violation = best->violation;
  sol.starts_tried = tried;
  sol.converged = best->converged;
  return sol;
}

InitialState fixed_initial_state(const Vector& z0) {
  InitialState init;
  init.free = false;
  init.fixed = z0;
  return init;
}

}  // namespace

OcpSolution solve_nominal(const OcpProblem& problem, const Vector& z0, const OcpSolution* warm) {
  if (z0.size() != problem.model.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state dimension");
  }
  return solve_with(problem, problem.objective_mode, fixed_initial_state(z0), warm);
}

OcpSolution solve_rotated(const OcpProblem& problem, const Vector& z0, const OcpSolution* warm) {
  if (z0.size() != problem.model.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "initial state dimension");
  }
  if (!problem.storage || !problem.ross) {
    throw Error(ErrorCode::kInvalidArgument, "rotated OCP needs storage and ROSS");
  }
  return solve_with(problem, ObjectiveMode::kRotated, fixed_initial_state(z0), warm);
}

OcpSolution solve_robust(const OcpProblem& problem, const Vector& x, int step,
                         const OcpSolution* warm, const OcpSolution* prev) {
  problem.validate();
  const int n = problem.model.state_dim;
  const BoxSet box = initial_state_box(problem, x);

  InitialState init;
  init.free = true;
  init.box = box;
  init.hint = x - problem.tube.omega.center();

  if (step == 0) {
    switch (problem.init_mode) {
      case InitMode::kFreeInTube:
        break;
      case InitMode::kFixed:
        if (!box.contains(x, 1e-12)) throw Error(ErrorCode::kInfeasible, "x is not an admissible z0");
        init = fixed_initial_state(x);
        break;
      case InitMode::kNearestToRoss:
        init = fixed_initial_state(box.project(problem.ross->z_s));
        break;
    }
  } else if (problem.diss_mode != DissMode::kNone) {
    if (!prev || prev->z_seq.size() < 2) {
      throw Error(ErrorCode::kMissingPrev, "dissipativity mode needs the previous solution");
    }
    const Vector& z1 = prev->z_seq[1];
    if (problem.diss_mode == DissMode::kFixInit) {
      if (!box.contains(z1, 1e-9)) {
        throw Error(ErrorCode::kInfeasible, "previous z(1) is not an admissible z0");
      }
      init = fixed_initial_state(z1);
    } else {
      const StorageFunction& storage = *problem.storage;
      const double bound = storage(z1);
      if (storage.is_linear() && n == 1) {
        // Half-space c z0 + d <= bound, intersected with the tube box exactly.
        const double c = storage.slope()[0];
        Vector lo = box.lower();
        Vector hi = box.upper();
        if (c > 0.0) hi[0] = std::min(hi[0], (bound - storage.offset()) / c);
        if (c < 0.0) lo[0] = std::max(lo[0], (bound - storage.offset()) / c);
        if (lo[0] > hi[0]) {
          throw Error(ErrorCode::kInfeasible, "storage constraint empties the tube box");
        }
        init.box = BoxSet(lo, hi);
      } else {
        init.storage_bound = bound;
      }
    }
  }
  return solve_with(problem, problem.objective_mode, init, warm);
}

// ---------------------------------------------------------------------------
// Dynamic-programming oracle

DpValueTable::DpValueTable(const OcpProblem& problem, int horizon, int state_grid_points,
                           int input_grid_points, ObjectiveMode mode)
    : problem_(problem), mode_(mode), horizon_(horizon) {
  if (problem.model.state_dim != 1) {
    throw Error(ErrorCode::kInvalidArgument, "DP oracle supports scalar states only");
  }
  if (horizon < 0 || state_grid_points < 2 || input_grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "DP oracle grid/horizon");
  }
  if (mode == ObjectiveMode::kRotated && (!problem.storage || !problem.ross)) {
    throw Error(ErrorCode::kInvalidArgument, "rotated DP needs storage and ROSS");
  }
  const int m = problem.model.input_dim;
  const BoxSet states = problem.tightened.slice(0, 1);
  const BoxSet inputs = problem.tightened.slice(1, m);
  states_ = linspace(states.lower()[0], states.upper()[0], state_grid_points);
  for (const Vector& v : inputs.grid(input_grid_points)) inputs_.push_back(v.size() == 1 ? v[0] : 0.0);
  if (m != 1) throw Error(ErrorCode::kInvalidArgument, "DP oracle supports scalar inputs only");

  const std::size_t ns = states_.size();
  const std::size_t ni = inputs_.size();
  values_.assign(horizon + 1, std::vector<double>(ns, 0.0));
  if (horizon == 0) return;

  std::vector<double> cost(ns * ni);
  std::vector<double> next(ns * ni);
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < ni; ++j) {
      const double c = stage_cost(states_[i], inputs_[j]);
      cost[i * ni + j] = std::isfinite(c) ? c : kInf;
      next[i * ni + j] =
          step_nominal(problem_.model, scalar_vector(states_[i]), scalar_vector(inputs_[j]))[0];
    }
  }
  for (int k = 1; k <= horizon; ++k) {
    for (std::size_t i = 0; i < ns; ++i) {
      double best = kInf;
      for (std::size_t j = 0; j < ni; ++j) {
        double candidate = cost[i * ni + j];
        if (k > 1) candidate += value(k - 1, next[i * ni + j]);
        best = std::min(best, candidate);
      }
      values_[k][i] = best;
    }
  }
}

double DpValueTable::stage_cost(double z, double v) const {
  const CostEvaluator ell(problem_.cost, problem_.model, problem_.tube);
  if (mode_ == ObjectiveMode::kOriginal) return ell.ell(scalar_vector(z), scalar_vector(v));
  return eval_rotated(ell, *problem_.storage, scalar_vector(z), scalar_vector(v));
}

double DpValueTable::value(int stages, double z) const {
  if (stages < 0 || stages > horizon_) throw Error(ErrorCode::kInvalidArgument, "DP stage index");
  const double lo = states_.front();
  const double hi = states_.back();
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (z < lo - slack || z > hi + slack) return kInf;
  if (stages == 0) return 0.0;
  const std::vector<double>& table = values_[stages];
  const double h = (hi - lo) / static_cast<double>(states_.size() - 1);
  double t = (std::clamp(z, lo, hi) - lo) / h;
  const auto last = static_cast<double>(states_.size() - 1);
  t = std::clamp(t, 0.0, last);
  auto i0 = static_cast<std::size_t>(std::floor(t));
  if (i0 >= states_.size() - 1) return table.back();
  const double w = t - static_cast<double>(i0);
  if (w == 0.0) return table[i0];
  const double a = table[i0];
  const double b = table[i0 + 1];
  if (!std::isfinite(a) || !std::isfinite(b)) return kInf;
  return (1.0 - w) * a + w * b;
}

double DpValueTable::best_input(int stages, double z, double* cost) const {
  double best = kInf;
  double best_v = inputs_.front();
  for (const double v : inputs_) {
    double candidate = stage_cost(z, v);
    if (stages > 1) {
      candidate += value(stages - 1, step_nominal(problem_.model, scalar_vector(z), scalar_vector(v))[0]);
    }
    if (candidate < best) {
      best = candidate;
      best_v = v;
    }
  }
  if (cost) *cost = best;
  return best_v;
}

OcpSolution DpValueTable::policy_rollout(int stages, double z0) const {
  if (stages < 1 || stages > horizon_) throw Error(ErrorCode::kInvalidArgument, "DP rollout length");
  OcpSolution sol;
  sol.z0 = scalar_vector(z0);
  double z = z0;
  for (int k = stages; k >= 1; --k) {
    const double v = best_input(k, z, nullptr);
    sol.v_seq.push_back(scalar_vector(v));
    z = step_nominal(problem_.model, scalar_vector(z), scalar_vector(v))[0];
  }
  sol.z_seq = rollout(problem_.model, sol.z0, sol.v_seq);
  OcpProblem p = problem_;
  p.horizon = stages;
  sol.value = trajectory_objective(p, mode_, sol.z0, sol.v_seq);
  sol.converged = true;
  return sol;
}

double value_dp_oracle(const OcpProblem& problem, const Vector& z0, int state_grid_points,
                       int input_grid_points) {
  if (problem.model.state_dim != 1 || z0.size() != 1) {
    throw Error(ErrorCode::kInvalidArgument, "DP oracle supports scalar states only");
  }
  const DpValueTable table(problem, problem.horizon, state_grid_points, input_grid_points,
                           problem.objective_mode);
  return table.value(problem.horizon, z0[0]);
}

}  // namespace rempc
