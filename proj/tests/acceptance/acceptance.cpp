// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "rempc/diagnostics.hpp"
#include "rempc/experiments.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace rempc;

namespace {

struct Verdict {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<Verdict> verdicts;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  verdicts.push_back({id, name, pass, detail});
  std::printf("%s criterion %2d %-28s %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void note(const std::string& line) {
  std::printf("     %s\n", line.c_str());
  std::fflush(stdout);
}

// Accumulates criterion 7 over every trace produced here.
struct InvariantTally {
  int traces = 0;
  int steps = 0;
  int tube = 0;
  int constraint = 0;
  double worst = 0.0;
  void add(const ClosedLoopTrace& trace, const OcpProblem& problem) {
    const TraceInvariantReport r = check_trace_invariants(trace, problem.model, problem.tube, 1e-8);
    ++traces;
    steps += static_cast<int>(trace.steps.size());
    tube += r.tube_violations;
    constraint += r.constraint_violations;
    worst = std::max({worst, r.worst_tube_excess, r.worst_constraint_excess});
  }
};

RunConfig base_config() {
  RunConfig c;
  c.horizon = 10;
  c.steps = 2000;
  c.seed = 1;
  c.seeds = 10;
  return c;
}

struct PaperRow {
  const char* label;
  double worst;
  double mean;
};

}  // namespace

int main() {
  const auto wall = std::chrono::steady_clock::now();
  InvariantTally tally;
  const RunConfig config = base_config();
  const Preset preset = config_preset(config);

  // 3. steady states
  {
    RunConfig c = config;
    c.cost = "nominal";
    const RossResult nominal = *config_problem(c, preset).ross;
    c.cost = "max";
    const RossResult worst = *config_problem(c, preset).ross;
    const bool ok = std::abs(nominal.z_s[0] - 2.2344) <= 1e-3 && std::abs(worst.z_s[0] - 3.2344) <= 1e-3 &&
                    std::abs(worst.cost + 1.2049) <= 1e-3;
    report(3, "steady-state values", ok,
           "z_s^L=" + fmt("%.5f", nominal.z_s[0]) + " z_s^max=" + fmt("%.5f", worst.z_s[0]) +
               " cost^max=" + fmt("%.5f", worst.cost));
  }

  // 8. dissipativity on a 401x401 grid
  {
    RunConfig c = config;
    c.cost = "nominal";
    const OcpProblem problem = config_problem(c, preset);
    const DissipativityCheck d =
        check_strict_dissipativity(problem.model, problem.tube, problem.cost, *problem.storage, *problem.ross, 401);
    const double dz = std::abs(d.z_argmin[0] - 2.2344);
    const double dv = std::abs(d.v_argmin[0] - 2.2344);
    const bool ok = d.min_margin >= -1e-8 && std::hypot(dz, dv) <= 0.02;
    report(8, "strict dissipativity grid", ok,
           "min=" + fmt("%.3e", d.min_margin) + " at (" + fmt("%.4f", d.z_argmin[0]) + ", " +
               fmt("%.4f", d.v_argmin[0]) + ")");
  }

  // 9. turnpike trend
  {
    RunConfig c = config;
    c.cost = "nominal";
    std::string detail;
    bool ok = true;
    double previous = -1.0;
    for (const int n : {5, 10, 20, 40}) {
      c.horizon = n;
      const OcpProblem problem = config_problem(c, preset);
      const OcpSolution sol = solve_nominal(problem, scalar_vector(1.0));
      const double f = turnpike_occupancy(sol, *problem.ross, {0.05}).front().fraction;
      ok = ok && f >= previous;
      previous = f;
      detail += "N=" + std::to_string(n) + ":" + fmt("%.3f", f) + " ";
    }
    ok = ok && previous >= 0.8;
    report(9, "turnpike occupancy trend", ok, detail);
  }

  // 6. solver against dynamic programming
  {
    RunConfig c = config;
    c.cost = "nominal";
    const auto start = std::chrono::steady_clock::now();
    const OcpProblem dp_problem = config_problem(c, preset);
    const DpValueTable table(dp_problem, 10, 4001, 4001);
    double worst = 0.0;
    int compared = 0;
    for (const int n : {3, 5, 10}) {
      c.horizon = n;
      const OcpProblem problem = config_problem(c, preset);
      for (int i = 0; i < 20; ++i) {
        const double z0 = 1.0 + 8.0 * i / 19.0;
        const double solver = solve_nominal(problem, scalar_vector(z0)).value;
        const double dp = table.value(n, z0);
        worst = std::max(worst, std::abs(solver - dp));
        ++compared;
      }
    }
    const double secs = seconds_since(start);
    report(6, "solver vs DP oracle", worst <= 5e-3 && compared == 60 && secs <= 120.0,
           "max |V-V_dp|=" + fmt("%.2e", worst) + " over 60 cases, " + fmt("%.1f", secs) + " s");
  }

  // 11. determinism
  {
    RunConfig c = config;
    c.cost = "max";
    c.diss = "lambda";
    c.steps = 200;
    c.seed = 5;
    const OcpProblem problem = config_problem(c, preset);
    std::string csv[2];
    for (std::string& out : csv) {
      DisturbanceSource dist = config_disturbance(c, preset, c.seed);
      const ClosedLoopTrace trace = run_closed_loop(problem, c.steps, problem.ross->z_s, dist);
      tally.add(trace, problem);
      out = trace_csv(trace);
    }
    report(11, "determinism", csv[0] == csv[1] && !csv[0].empty(),
           std::to_string(csv[0].size()) + " bytes, identical=" + (csv[0] == csv[1] ? "yes" : "no"));
  }

  // 10. Lyapunov decrease
  {
    RunConfig c = config;
    c.cost = "max";
    c.diss = "fix";
    const OcpProblem problem = config_problem(c, preset);
    double worst = std::numeric_limits<double>::infinity();
    int checked = 0;
    bool ok = true;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      DisturbanceSource dist = config_disturbance(c, preset, seed);
      const ClosedLoopTrace trace = run_closed_loop(problem, 201, scalar_vector(8.0), dist, true);
      tally.add(trace, problem);
      ok = ok && !trace.infeasible;
      const LyapunovTrace lt = lyapunov_trace(trace, problem);
      for (std::size_t t = 0; t < lt.decrease.size() && t < 200; ++t) {
        if ((trace.steps[t].z0 - problem.ross->z_s).norm() < 0.1) continue;
        worst = std::min(worst, lt.decrease[t]);
        ++checked;
      }
    }
    ok = ok && checked > 0 && worst >= -0.02;
    report(10, "Lyapunov decrease", ok,
           "min decrease=" + fmt("%.3e", worst) + " over " + std::to_string(checked) + " steps (10 seeds, x0=8)");
  }

  // 1, 2, 4, 5 share the closed-loop runs of the four table rows.
  note("running the four table rows (10 seeds x 2000 steps each)...");
  const Table1Result table = run_table1(config, true);
  {
    const PaperRow paper[] = {{"max/none", -1.209, -1.403},
                              {"max/lambda", -1.205, -1.427},
                              {"int/lambda", -1.168, -1.447},
                              {"nominal/lambda", -1.143, -1.445}};
    bool ok = table.rows.size() == 4;
    for (std::size_t i = 0; i < table.rows.size() && i < 4; ++i) {
      const Table1Row& row = table.rows[i];
      bool feasible = true;
      for (const SeedOutcome& s : row.runs) feasible = feasible && !s.infeasible;
      const bool row_ok = row.label == paper[i].label && feasible &&
                          std::abs(row.worst_mean - paper[i].worst) <= 0.02 &&
                          std::abs(row.mean_mean - paper[i].mean) <= 0.05 && row.cpu_seconds <= 300.0;
      ok = ok && row_ok;
      note(row.label + ": worst " + fmt("%.4f", row.worst_mean) + " (target " + fmt("%.3f", paper[i].worst) +
           "), mean " + fmt("%.4f", row.mean_mean) + " (target " + fmt("%.3f", paper[i].mean) + "), cpu " +
           fmt("%.1f", row.cpu_seconds) + " s, wall " + fmt("%.1f", row.seconds) + " s" +
           (row_ok ? "" : "  <-- out of tolerance"));
    }
    report(1, "real-cost table", ok, "4 rows x 10 seeds, worst +-0.02, mean +-0.05, <= 300 s cpu per row");
  }

  std::vector<OcpProblem> row_problems;
  for (const Table1Row& row : table.rows) {
    RunConfig c = config;
    c.cost = to_string(row.variant);
    c.diss = to_string(row.diss);
    row_problems.push_back(config_problem(c, preset));
  }
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    for (const SeedOutcome& s : table.rows[i].runs) tally.add(*s.trace, row_problems[i]);
  }

  // 2. averaged performance of the L^max loops
  {
    bool ok = true;
    double worst_nominal = -std::numeric_limits<double>::infinity();
    double worst_real = worst_nominal;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i].variant != CostVariant::kMax) continue;
      for (const SeedOutcome& s : table.rows[i].runs) {
        const Performance p = perf_transient(*s.trace);
        worst_nominal = std::max(worst_nominal, p.nominal);
        worst_real = std::max(worst_real, p.real);
        ok = ok && s.trace->steps.size() == 2000 && p.nominal <= -1.15 && p.real <= -1.15;
      }
    }
    report(2, "averaged performance bound", ok,
           "largest T=2000 average: l(z0,v0) " + fmt("%.4f", worst_nominal) + ", L_pi(x,u) " +
               fmt("%.4f", worst_real) + " (bound -1.15, 20 runs)");
  }

  // 4. practical convergence with the dissipativity-inducing modes
  {
    bool ok = true;
    double worst_nominal = 0.0;
    double worst_real = 0.0;
    int runs = 0;
    auto check = [&](const ClosedLoopTrace& trace, const OcpProblem& problem) {
      ++runs;
      ok = ok && !trace.infeasible && trace.steps.size() > 50;
      const RossDistances d = distance_to_ross(trace, *problem.ross, problem.tube);
      for (std::size_t t = 50; t < d.nominal.size(); ++t) {
        worst_nominal = std::max(worst_nominal, d.nominal[t]);
        worst_real = std::max(worst_real, d.real[t]);
      }
    };
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      if (table.rows[i].diss == DissMode::kNone) continue;
      for (const SeedOutcome& s : table.rows[i].runs) check(*s.trace, row_problems[i]);
    }
    note("running FIX_INIT with L^max (10 seeds x 2000 steps)...");
    RunConfig c = config;
    c.cost = "max";
    c.diss = "fix";
    const OcpProblem problem = config_problem(c, preset);
    for (const std::uint64_t seed : config_seeds(c)) {
      DisturbanceSource dist = config_disturbance(c, preset, seed);
      const ClosedLoopTrace trace = run_closed_loop(problem, c.steps, table.x0, dist);
      tally.add(trace, problem);
      check(trace, problem);
    }
    ok = ok && worst_nominal <= 0.05 && worst_real <= 0.05;
    report(4, "practical convergence", ok,
           "t>=50: max |z0-z_s|=" + fmt("%.2e", worst_nominal) + ", max dist(x, z_s+Omega)=" +
               fmt("%.2e", worst_real) + " over " + std::to_string(runs) + " runs");
  }

  // 5. the unconstrained L^max loop keeps wandering
  {
    bool ok = false;
    int seeds_wandering = 0;
    double largest = 0.0;
    for (const Table1Row& row : table.rows) {
      if (row.variant != CostVariant::kMax || row.diss != DissMode::kNone) continue;
      ok = true;
      for (const SeedOutcome& s : row.runs) {
        bool wandered = false;
        for (std::size_t t = 50; t < s.trace->steps.size(); ++t) {
          const double d = (s.trace->steps[t].z0 - row.ross.z_s).norm();
          largest = std::max(largest, d);
          wandered = wandered || d > 0.2;
        }
        seeds_wandering += wandered ? 1 : 0;
        ok = ok && wandered;
      }
    }
    report(5, "non-convergence without constraint", ok,
           std::to_string(seeds_wandering) + "/10 seeds leave the 0.2-ball after t=50 (largest " +
               fmt("%.3f", largest) + ")");
  }

  // 7. hard invariants over every run above
  report(7, "tube and constraint invariants", tally.tube == 0 && tally.constraint == 0,
         std::to_string(tally.traces) + " traces, " + std::to_string(tally.steps) + " steps, " +
             std::to_string(tally.tube) + " tube / " + std::to_string(tally.constraint) +
             " constraint violations, worst excess " + fmt("%.1e", tally.worst));

  int failed = 0;
  for (const Verdict& v : verdicts) failed += v.pass ? 0 : 1;
  std::printf("%d/%zu criteria passed in %.0f s\n", static_cast<int>(verdicts.size()) - failed, verdicts.size(),
              seconds_since(wall));
  return failed == 0 ? 0 : 1;
}
