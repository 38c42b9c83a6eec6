#pragma once

#include "rempc/config.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace rempc {

/// One closed-loop run of a table configuration.
struct SeedOutcome {
  std::uint64_t seed = 0;
  /// Largest real stage cost over the run.
  double worst = 0.0;
  double mean = 0.0;
  double asymptotic = 0.0;
  bool infeasible = false;
  std::optional<ClosedLoopTrace> trace;
};

struct Table1Row {
  std::string label;
  CostVariant variant = CostVariant::kMax;
  DissMode diss = DissMode::kNone;
  RossResult ross;
  std::vector<SeedOutcome> runs;
  double worst_mean = 0.0;
  double worst_sd = 0.0;
  double mean_mean = 0.0;
  double mean_sd = 0.0;
  double seconds = 0.0;
  /// CPU time of the row's own thread; rows share cores when run concurrently.
  double cpu_seconds = 0.0;
};

struct Table1Result {
  Vector x0;
  std::vector<Table1Row> rows;
};

struct Table1Spec {
  CostVariant variant;
  DissMode diss;
};

/// L^max unconstrained, then L^max, L^int and L_pi with the storage
/// constraint on z0.
std::vector<Table1Spec> table1_configurations();

/// Runs every configuration over config.seeds seeds starting at config.seed;
/// rows run concurrently. x0 defaults to the ROSS of the MAX variant.
Table1Result run_table1(const RunConfig& config, bool keep_traces = false);

/// Seeds used by batch commands.
std::vector<std::uint64_t> config_seeds(const RunConfig& config);

int cmd_ross(const RunConfig& config, std::ostream& out);
/// Returns 2 when the run stopped on an infeasible OCP.
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_table1(const RunConfig& config, std::ostream& out);
int cmd_turnpike(const RunConfig& config, std::ostream& out);

}  // namespace rempc
