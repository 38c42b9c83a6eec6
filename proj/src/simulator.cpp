#include "rempc/simulator.hpp"

#include "rempc/version.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace rempc {

DisturbanceSource DisturbanceSource::iid_uniform(BoxSet set, std::uint64_t seed) {
  DisturbanceSource src(DisturbanceKind::kIidUniform, std::move(set));
  src.seed_ = seed;
  src.engine_.seed(seed);
  return src;
}

DisturbanceSource DisturbanceSource::sequence(BoxSet set, std::vector<Vector> values) {
  for (const Vector& w : values) {
    if (w.size() != set.dim()) throw Error(ErrorCode::kDimensionMismatch, "disturbance sequence entry");
    if (!set.contains(w)) throw Error(ErrorCode::kInvalidDisturbance, "sequence entry outside W");
  }
  DisturbanceSource src(DisturbanceKind::kSequence, std::move(set));
  src.values_ = std::move(values);
  src.origin_ = "inline";
  return src;
}

DisturbanceSource DisturbanceSource::from_file(BoxSet set, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open disturbance file " + path);
  std::vector<Vector> values;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::vector<double> row;
    double value = 0.0;
    while (fields >> value) row.push_back(value);
    if (row.empty()) continue;
    if (static_cast<int>(row.size()) != set.dim()) {
      throw Error(ErrorCode::kDimensionMismatch, "disturbance file row has " +
                                                     std::to_string(row.size()) + " entries");
    }
    Vector w(set.dim());
    for (int i = 0; i < set.dim(); ++i) w[i] = row[i];
    values.push_back(w);
  }
  DisturbanceSource src = sequence(std::move(set), std::move(values));
  src.origin_ = path;
  return src;
}

DisturbanceSource DisturbanceSource::constant(BoxSet set, Vector w) {
  if (w.size() != set.dim()) throw Error(ErrorCode::kDimensionMismatch, "constant disturbance");
  if (!set.contains(w)) throw Error(ErrorCode::kInvalidDisturbance, "constant disturbance outside W");
  DisturbanceSource src(DisturbanceKind::kConstant, std::move(set));
  src.values_.push_back(std::move(w));
  return src;
}

Vector DisturbanceSource::next() {
  switch (kind_) {
    case DisturbanceKind::kIidUniform: {
      Vector w(set_.dim());
      for (int i = 0; i < set_.dim(); ++i) {
        const double lo = set_.lower()[i];
        const double hi = set_.upper()[i];
        if (lo == hi) {
          w[i] = lo;
          continue;
        }
        std::uniform_real_distribution<double> dist(lo, hi);
        w[i] = std::clamp(dist(engine_), lo, hi);
      }
      return w;
    }
    case DisturbanceKind::kSequence:
      if (cursor_ >= values_.size()) {
        throw Error(ErrorCode::kInvalidArgument, "disturbance sequence exhausted after " +
                                                     std::to_string(values_.size()) + " values");
      }
      return values_[cursor_++];
    case DisturbanceKind::kConstant:
      return values_.front();
  }
  return Vector();
}

std::optional<std::uint64_t> DisturbanceSource::seed() const {
  if (kind_ == DisturbanceKind::kIidUniform) return seed_;
  return std::nullopt;
}

std::string DisturbanceSource::describe() const {
  std::ostringstream out;
  switch (kind_) {
    case DisturbanceKind::kIidUniform:
      out << "iid_uniform(seed=" << seed_ << ")";
      break;
    case DisturbanceKind::kSequence:
      out << "sequence(" << origin_ << ", " << values_.size() << " values)";
      break;
    case DisturbanceKind::kConstant: {
      out << "constant(";
      for (int i = 0; i < values_.front().size(); ++i) out << (i ? " " : "") << values_.front()[i];
      out << ")";
      break;
    }
  }
  return out.str();
}

const char* DisturbanceSource::generator_name() {
  return "std::mt19937_64 with std::uniform_real_distribution<double>";
}

ClosedLoopTrace run_closed_loop(const OcpProblem& problem, int steps, const Vector& x0,
                                DisturbanceSource& disturbance, bool lyapunov) {
  problem.validate();
  if (steps < 0) throw Error(ErrorCode::kInvalidArgument, "steps must be >= 0");
  if (x0.size() != problem.model.state_dim) throw Error(ErrorCode::kDimensionMismatch, "x0");
  if (lyapunov && (!problem.storage || !problem.ross)) {
    throw Error(ErrorCode::kInvalidArgument, "Lyapunov tracing needs storage and ROSS");
  }

  ClosedLoopTrace trace;
  trace.meta.model_name = problem.model.name;
  trace.meta.horizon = problem.horizon;
  trace.meta.steps = steps;
  trace.meta.seed = disturbance.seed();
  trace.meta.disturbance = disturbance.describe();
  trace.meta.generator = DisturbanceSource::generator_name();
  trace.meta.variant = problem.cost.variant();
  trace.meta.diss_mode = problem.diss_mode;
  trace.meta.init_mode = problem.init_mode;
  trace.meta.lyapunov = lyapunov;
  trace.steps.reserve(steps);
  trace.solutions.reserve(steps);

  const CostEvaluator ell(problem.cost, problem.model, problem.tube);
  Vector x = x0;
  for (int t = 0; t < steps; ++t) {
    const OcpSolution* prev = trace.solutions.empty() ? nullptr : &trace.solutions.back();
    OcpSolution sol;
    std::optional<OcpSolution> rotated;
    try {
      sol = solve_robust(problem, x, t, prev, prev);
      if (lyapunov) {
        const OcpSolution* warm =
            trace.rotated_solutions.empty() ? nullptr : &trace.rotated_solutions.back();
        rotated = solve_rotated(problem, sol.z0, warm);
      }
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kInfeasible && e.code() != ErrorCode::kMaxIterations) throw;
      trace.infeasible = true;
      trace.failed_step = t;
      trace.failure = e.what();
      break;
    }

    StepRecord rec;
    rec.t = t;
    rec.x = x;
    rec.z0 = sol.z0;
    rec.z1 = sol.z_seq[1];
    rec.v0 = sol.v_seq[0];
    rec.u = apply_feedback(problem.model, x, rec.v0);
    rec.w = disturbance.next();
    rec.cost_real = ell.l_pi(x, rec.v0);
    rec.cost_nominal = ell.ell(sol.z0, rec.v0);
    rec.value = sol.value;
    if (rotated) rec.rotated_value = rotated->value;
    if (problem.storage) rec.storage = (*problem.storage)(sol.z0);

    x = step_real(problem.model, x, rec.v0, rec.w);
    trace.steps.push_back(std::move(rec));
    trace.solutions.push_back(std::move(sol));
    if (rotated) trace.rotated_solutions.push_back(std::move(*rotated));
  }
  return trace;
}

ClosedLoopTrace run_closed_loop(const SystemModel& model, const TubeSpec& tube, const StageCost& cost,
                                const StorageFunction& storage, int horizon, int steps,
                                const Vector& x0, DisturbanceSource& disturbance,
                                const ClosedLoopOptions& options) {
  OcpProblem problem = make_problem(model, cost, tube, storage, horizon, options.ross);
  problem.init_mode = options.init_mode;
  problem.diss_mode = options.diss_mode;
  problem.solver = options.solver;
  return run_closed_loop(problem, steps, x0, disturbance, options.lyapunov);
}

TraceInvariantReport check_trace_invariants(const ClosedLoopTrace& trace, const SystemModel& model,
                                            const TubeSpec& tube, double tolerance) {
  TraceInvariantReport report;
  const BoxSet& z = model.joint_constraints;
  for (const StepRecord& rec : trace.steps) {
    const Vector error = rec.x - rec.z0;
    double tube_excess = 0.0;
    for (int i = 0; i < error.size(); ++i) {
      tube_excess = std::max({tube_excess, tube.omega.lower()[i] - error[i],
                              error[i] - tube.omega.upper()[i]});
    }
    Vector xu(rec.x.size() + rec.u.size());
    xu << rec.x, rec.u;
    double box_excess = 0.0;
    for (int i = 0; i < xu.size(); ++i) {
      box_excess = std::max({box_excess, z.lower()[i] - xu[i], xu[i] - z.upper()[i]});
    }
    if (tube_excess > tolerance) ++report.tube_violations;
    if (box_excess > tolerance) ++report.constraint_violations;
    report.worst_tube_excess = std::max(report.worst_tube_excess, tube_excess);
    report.worst_constraint_excess = std::max(report.worst_constraint_excess, box_excess);
  }
  return report;
}

Performance perf_transient(const ClosedLoopTrace& trace, int horizon) {
  if (horizon < 1 || horizon > static_cast<int>(trace.steps.size())) {
    throw Error(ErrorCode::kInvalidArgument, "averaging window outside the trace");
  }
  Performance p;
  for (int t = 0; t < horizon; ++t) {
    p.real += trace.steps[t].cost_real;
    p.nominal += trace.steps[t].cost_nominal;
  }
  p.real /= horizon;
  p.nominal /= horizon;
  return p;
}

Performance perf_transient(const ClosedLoopTrace& trace) {
  return perf_transient(trace, static_cast<int>(trace.steps.size()));
}

double perf_asymptotic(const ClosedLoopTrace& trace, bool nominal) {
  const int total = static_cast<int>(trace.steps.size());
  if (total < 1) throw Error(ErrorCode::kInvalidArgument, "empty trace");
  double sum = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  const int first = std::max(1, total / 2);
  for (int t = 0; t < total; ++t) {
    sum += nominal ? trace.steps[t].cost_nominal : trace.steps[t].cost_real;
    if (t + 1 >= first) best = std::max(best, sum / (t + 1));
  }
  return best;
}

RossDistances distance_to_ross(const ClosedLoopTrace& trace, const RossResult& ross,
                               const TubeSpec& tube) {
  RossDistances out;
  const BoxSet around = tube.omega.translated(ross.z_s);
  for (const StepRecord& rec : trace.steps) {
    out.nominal.push_back((rec.z0 - ross.z_s).norm());
    out.real.push_back(around.distance(rec.x));
  }
  return out;
}

namespace {

std::string number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string joined(const Vector& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += number(v[i]);
  }
  return out;
}

}  // namespace

std::string trace_csv(const ClosedLoopTrace& trace) {
  std::string out = "t,x,z0,z1,v0,u,w,cost_real,cost_nom,V_N,Vrot_N,lambda\n";
  for (const StepRecord& r : trace.steps) {
    out += std::to_string(r.t) + ',' + joined(r.x) + ',' + joined(r.z0) + ',' + joined(r.z1) + ',' +
           joined(r.v0) + ',' + joined(r.u) + ',' + joined(r.w) + ',' + number(r.cost_real) + ',' +
           number(r.cost_nominal) + ',' + number(r.value) + ',' +
           (r.rotated_value ? number(*r.rotated_value) : "") + ',' +
           (r.storage ? number(*r.storage) : "") + '\n';
  }
  return out;
}

void write_trace_csv(const ClosedLoopTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << trace_csv(trace);
  if (!out) throw Error(ErrorCode::kIo, "write failed for " + path);
}

nlohmann::json trace_metadata(const ClosedLoopTrace& trace, const nlohmann::json& config) {
  const TraceMetadata& m = trace.meta;
  nlohmann::json j;
  j["version"] = version();
  j["model"] = m.model_name;
  j["horizon"] = m.horizon;
  j["steps"] = m.steps;
  j["recorded_steps"] = trace.steps.size();
  j["seed"] = m.seed ? nlohmann::json(*m.seed) : nlohmann::json();
  j["disturbance"] = m.disturbance;
  j["generator"] = m.generator;
  j["cost_variant"] = to_string(m.variant);
  j["diss_mode"] = to_string(m.diss_mode);
  j["init_mode"] = to_string(m.init_mode);
  j["lyapunov"] = m.lyapunov;
  j["infeasible"] = trace.infeasible;
  if (trace.infeasible) {
    j["failed_step"] = trace.failed_step;
    j["failure"] = trace.failure;
  }
  j["asymptotic_estimate"] =
      "limsup approximated by the largest running average over T' in [T/2, T]";
  if (!config.is_null()) j["config"] = config;
  return j;
}

void write_trace_metadata(const ClosedLoopTrace& trace, const std::string& path,
                          const nlohmann::json& config) {
  const std::string meta_path = path + ".meta.json";
  std::ofstream out(meta_path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + meta_path);
  out << trace_metadata(trace, config).dump(2) << '\n';
}

}  // namespace rempc
