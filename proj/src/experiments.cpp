#include "rempc/experiments.hpp"

#include "rempc/version.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <future>

namespace rempc {

namespace {

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

Vector to_vector(const std::vector<double>& values) {
  Vector v(static_cast<int>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<int>(i)] = values[i];
  return v;
}

std::string vec_string(const Vector& v) {
  std::string out;
  for (int i = 0; i < v.size(); ++i) out += (i ? " " : "") + printf_string("%.10g", v[i]);
  return out;
}

nlohmann::json vec_json(const Vector& v) {
  nlohmann::json out = nlohmann::json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path);
  out << text;
}

nlohmann::json output_header(const RunConfig& config, const char* command) {
  return {{"version", version()}, {"command", command}, {"config", to_json(config)}};
}

Vector initial_state(const RunConfig& config, const OcpProblem& problem) {
  if (!config.x0) return problem.ross->z_s;
  if (static_cast<int>(config.x0->size()) != problem.model.state_dim) {
    throw Error(ErrorCode::kConfig, "x0 has the wrong dimension");
  }
  return to_vector(*config.x0);
}

void mean_and_sd(const std::vector<double>& values, double& mean, double& sd) {
  mean = 0.0;
  for (const double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double sq = 0.0;
  for (const double v : values) sq += (v - mean) * (v - mean);
  sd = values.size() > 1 ? std::sqrt(sq / static_cast<double>(values.size() - 1)) : 0.0;
}

double thread_cpu_seconds() {
  timespec ts{};
  clock_gettime(CLOCK_THREAD_CPUTIME_ID, &ts);
  return static_cast<double>(ts.tv_sec) + 1e-9 * static_cast<double>(ts.tv_nsec);
}

Table1Row run_row(const RunConfig& config, const Preset& preset, const Table1Spec& spec,
                  const Vector& x0, bool keep_traces) {
  const auto start = std::chrono::steady_clock::now();
  const double cpu_start = thread_cpu_seconds();
  RunConfig row_config = config;
  row_config.cost = to_string(spec.variant);
  row_config.diss = to_string(spec.diss);
  const OcpProblem problem = config_problem(row_config, preset);

  Table1Row row;
  row.label = std::string(to_string(spec.variant)) + "/" + to_string(spec.diss);
  row.variant = spec.variant;
  row.diss = spec.diss;
  row.ross = *problem.ross;
  std::vector<double> worsts, means;
  for (const std::uint64_t seed : config_seeds(config)) {
    DisturbanceSource dist = config_disturbance(row_config, preset, seed);
    ClosedLoopTrace trace = run_closed_loop(problem, config.steps, x0, dist, config.lyapunov);
    SeedOutcome outcome;
    outcome.seed = seed;
    outcome.infeasible = trace.infeasible;
    if (!trace.steps.empty()) {
      outcome.worst = trace.steps.front().cost_real;
      for (const StepRecord& r : trace.steps) outcome.worst = std::max(outcome.worst, r.cost_real);
      outcome.mean = perf_transient(trace).real;
      outcome.asymptotic = perf_asymptotic(trace);
      worsts.push_back(outcome.worst);
      means.push_back(outcome.mean);
    }
    if (keep_traces) outcome.trace = std::move(trace);
    row.runs.push_back(std::move(outcome));
  }
  if (!worsts.empty()) {
    mean_and_sd(worsts, row.worst_mean, row.worst_sd);
    mean_and_sd(means, row.mean_mean, row.mean_sd);
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  row.cpu_seconds = thread_cpu_seconds() - cpu_start;
  return row;
}

}  // namespace

std::vector<Table1Spec> table1_configurations() {
  return {{CostVariant::kMax, DissMode::kNone},
          {CostVariant::kMax, DissMode::kLambdaInit},
          {CostVariant::kInt, DissMode::kLambdaInit},
          {CostVariant::kNominal, DissMode::kLambdaInit}};
}

std::vector<std::uint64_t> config_seeds(const RunConfig& config) {
  std::vector<std::uint64_t> seeds;
  for (int i = 0; i < config.seeds; ++i) seeds.push_back(config.seed + static_cast<std::uint64_t>(i));
  return seeds;
}

Table1Result run_table1(const RunConfig& config, bool keep_traces) {
  config.validate();
  const Preset preset = config_preset(config);
  Table1Result result;
  {
    RunConfig max_config = config;
    max_config.cost = "max";
    const OcpProblem reference = config_problem(max_config, preset);
    result.x0 = initial_state(config, reference);
  }
  std::vector<std::future<Table1Row>> jobs;
  for (const Table1Spec& spec : table1_configurations()) {
    jobs.push_back(std::async(std::launch::async, run_row, std::cref(config), std::cref(preset), spec,
                              std::cref(result.x0), keep_traces));
  }
  for (auto& job : jobs) result.rows.push_back(job.get());
  return result;
}

int cmd_ross(const RunConfig& config, std::ostream& out) {
  config.validate();
  const Preset preset = config_preset(config);
  const OcpProblem problem = config_problem(config, preset);
  const RossResult& r = *problem.ross;
  out << "variant          " << config.cost << '\n'
      << "z_s              " << vec_string(r.z_s) << '\n'
      << "v_s              " << vec_string(r.v_s) << '\n'
      << "cost             " << printf_string("%.10g", r.cost) << '\n'
      << "residual         " << printf_string("%.3g", r.residual) << '\n'
      << "interior_margin  " << printf_string("%.6g", r.interior_margin) << '\n';
  if (r.boundary_warning) out << "warning: ROSS lies on (or within 1e-6 of) the tightened boundary\n";
  if (r.tied_minimizers > 1) {
    out << "note: " << r.tied_minimizers << " grid minimizers tie; lexicographically smallest kept\n";
  }
  nlohmann::json j = output_header(config, "ross");
  j["ross"] = {{"variant", config.cost},       {"z_s", vec_json(r.z_s)},
               {"v_s", vec_json(r.v_s)},       {"cost", r.cost},
               {"residual", r.residual},       {"interior_margin", r.interior_margin},
               {"boundary_warning", r.boundary_warning}, {"tied_minimizers", r.tied_minimizers}};
  write_text(config.out + ".ross.json", j.dump(2) + "\n");
  return 0;
}

int cmd_simulate(const RunConfig& config, std::ostream& out) {
  config.validate();
  const Preset preset = config_preset(config);
  const OcpProblem problem = config_problem(config, preset);
  const Vector x0 = initial_state(config, problem);
  DisturbanceSource dist = config_disturbance(config, preset, config.seed);
  const ClosedLoopTrace trace = run_closed_loop(problem, config.steps, x0, dist, config.lyapunov);

  const nlohmann::json cfg = to_json(config);
  write_trace_csv(trace, config.out + ".csv");
  write_trace_metadata(trace, config.out + ".csv", cfg);
  DiagnosticsOptions options;
  options.epsilons = config.epsilons;
  options.dissipativity_grid = config.dissipativity_grid;
  const DiagnosticsReport report = build_report(trace, problem, options);
  write_report_jsonl(report, config.out + ".report.jsonl", cfg);
  write_margins_csv(report, config.out + ".margins.csv");

  const TraceInvariantReport inv = check_trace_invariants(trace, problem.model, problem.tube);
  out << "steps recorded   " << trace.steps.size() << " / " << config.steps << '\n';
  if (!trace.steps.empty()) {
    const Performance p = perf_transient(trace);
    out << "mean real cost   " << printf_string("%.6f", p.real) << '\n'
        << "mean nominal     " << printf_string("%.6f", p.nominal) << '\n'
        << "asymptotic est.  " << printf_string("%.6f", perf_asymptotic(trace)) << '\n'
        << "ultimate bound   " << printf_string("%.6f", report.ultimate_bound_estimate) << '\n';
  }
  out << "tube violations  " << inv.tube_violations << '\n'
      << "box violations   " << inv.constraint_violations << '\n'
      << "trace            " << config.out << ".csv\n";
  if (trace.infeasible) {
    out << "stopped at step " << trace.failed_step << ": " << trace.failure << '\n';
    return 2;
  }
  return 0;
}

int cmd_table1(const RunConfig& config, std::ostream& out) {
  const Table1Result result = run_table1(config, false);
  out << "x0 = " << vec_string(result.x0) << ", N = " << config.horizon << ", T = " << config.steps
      << ", seeds " << config.seed << ".." << config.seed + config.seeds - 1 << '\n';
  out << printf_string("%-16s %10s %9s %10s %9s %8s %8s\n", "row", "worst", "sd", "mean", "sd", "wall_s", "cpu_s");
  std::string csv = "row,seed,worst,mean,asymptotic,infeasible\n";
  bool any_infeasible = false;
  for (const Table1Row& row : result.rows) {
    out << printf_string("%-16s %10.4f %9.4f %10.4f %9.4f %8.1f %8.1f\n", row.label.c_str(), row.worst_mean,
                         row.worst_sd, row.mean_mean, row.mean_sd, row.seconds, row.cpu_seconds);
    for (const SeedOutcome& s : row.runs) {
      csv += row.label + ',' + std::to_string(s.seed) + ',' + printf_string("%.17g", s.worst) + ',' +
             printf_string("%.17g", s.mean) + ',' + printf_string("%.17g", s.asymptotic) + ',' +
             (s.infeasible ? "1" : "0") + '\n';
      any_infeasible = any_infeasible || s.infeasible;
    }
  }
  write_text(config.out + ".table1.csv", csv);
  write_text(config.out + ".table1.csv.meta.json", output_header(config, "table1").dump(2) + "\n");
  if (any_infeasible) {
    out << "some runs stopped on an infeasible OCP\n";
    return 2;
  }
  return 0;
}

int cmd_turnpike(const RunConfig& config, std::ostream& out) {
  config.validate();
  const Preset preset = config_preset(config);
  std::string csv = "z0,N,epsilon,count,fraction\n";
  out << printf_string("%10s %5s %9s %6s %9s\n", "z0", "N", "epsilon", "count", "fraction");
  for (const double z0 : config.turnpike_z0) {
    for (const int n : config.turnpike_horizons) {
      RunConfig c = config;
      c.horizon = n;
      const OcpProblem problem = config_problem(c, preset);
      const OcpSolution sol = solve_nominal(problem, scalar_vector(z0));
      for (const OccupancyEntry& e : turnpike_occupancy(sol, *problem.ross, config.epsilons)) {
        out << printf_string("%10.4f %5d %9.4g %6d %9.4f\n", z0, n, e.epsilon, e.count, e.fraction);
        csv += printf_string("%.17g,%d,%.17g,%d,%.17g\n", z0, n, e.epsilon, e.count, e.fraction);
      }
    }
  }
  write_text(config.out + ".turnpike.csv", csv);
  write_text(config.out + ".turnpike.csv.meta.json", output_header(config, "turnpike").dump(2) + "\n");
  return 0;
}

}  // namespace rempc
