// rempc: robust economic MPC experiments from the command line.
//
//   rempc ross --model growth --cost max
//   rempc simulate --config run.json --seed 3 --out runs/a
//   rempc table1 --seeds 10
//   rempc turnpike --cost nominal

#include "rempc/experiments.hpp"
#include "rempc/version.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::string> model;
  std::optional<int> horizon;
  std::optional<int> steps;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::optional<std::string> cost;
  std::optional<std::string> diss;
  std::optional<std::string> init;
  std::vector<double> x0;
  std::vector<double> omega;
  std::optional<std::string> out;
  bool lyapunov = false;
};

void add_flags(CLI::App& cmd, Flags& f) {
  cmd.add_option("--config", f.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  cmd.add_option("--model", f.model, "model preset");
  cmd.add_option("--horizon,-N", f.horizon, "prediction horizon");
  cmd.add_option("--steps,-T", f.steps, "closed-loop steps");
  cmd.add_option("--seed", f.seed, "disturbance seed (first seed for batches)");
  cmd.add_option("--seeds", f.seeds, "number of seeds for table1");
  cmd.add_option("--cost", f.cost, "stage cost variant")->check(CLI::IsMember({"nominal", "max", "int"}));
  cmd.add_option("--diss", f.diss, "dissipativity mode")->check(CLI::IsMember({"none", "lambda", "fix"}));
  cmd.add_option("--init", f.init, "initial nominal state")->check(CLI::IsMember({"free", "nearest", "fixed"}));
  cmd.add_option("--x0", f.x0, "initial state");
  cmd.add_option("--omega", f.omega, "tube [lo hi]")->expected(2);
  cmd.add_option("--out", f.out, "output path prefix");
  cmd.add_flag("--lyapunov", f.lyapunov, "trace the rotated value function");
}

rempc::RunConfig resolve(const Flags& f) {
  rempc::RunConfig c = f.config_path.empty() ? rempc::RunConfig{} : rempc::load_config(f.config_path);
  if (f.model) c.model = *f.model;
  if (f.horizon) c.horizon = *f.horizon;
  if (f.steps) c.steps = *f.steps;
  if (f.seed) c.seed = *f.seed;
  if (f.seeds) c.seeds = *f.seeds;
  if (f.cost) c.cost = *f.cost;
  if (f.diss) c.diss = *f.diss;
  if (f.init) c.init = *f.init;
  if (!f.x0.empty()) c.x0 = f.x0;
  if (!f.omega.empty()) c.omega = f.omega;
  if (f.out) c.out = *f.out;
  if (f.lyapunov) c.lyapunov = true;
  c.validate();
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust economic MPC without terminal conditions"};
  app.set_version_flag("--version", std::string(rempc::version()));
  app.require_subcommand(1);

  Flags flags;
  CLI::App* ross = app.add_subcommand("ross", "compute the robust optimal steady state");
  CLI::App* simulate = app.add_subcommand("simulate", "closed-loop run with trace and diagnostics");
  CLI::App* table1 = app.add_subcommand("table1", "worst and mean real stage cost for the four table rows");
  CLI::App* turnpike = app.add_subcommand("turnpike", "turnpike occupancy over a horizon sweep");
  for (CLI::App* cmd : {ross, simulate, table1, turnpike}) add_flags(*cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const rempc::RunConfig config = resolve(flags);
    if (ross->parsed()) return rempc::cmd_ross(config, std::cout);
    if (simulate->parsed()) return rempc::cmd_simulate(config, std::cout);
    if (table1->parsed()) return rempc::cmd_table1(config, std::cout);
    if (turnpike->parsed()) return rempc::cmd_turnpike(config, std::cout);
  } catch (const rempc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.code() == rempc::ErrorCode::kInfeasible ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
