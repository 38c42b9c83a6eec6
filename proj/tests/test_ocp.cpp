#include "rempc/ocp.hpp"
#include "rempc/presets.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <iostream>

using namespace rempc;

namespace {

Vector s(double x) { return scalar_vector(x); }

OcpProblem growth_problem(CostVariant variant, int horizon, std::optional<BoxSet> omega = {}) {
  const Preset p = make_growth_preset();
  TubeSpec tube = p.tube;
  if (omega) tube.omega = *omega;
  return make_problem(p.model, p.cost.with_variant(variant), tube, p.storage, horizon);
}

double value_at(const OcpProblem& problem, double z0) { return solve_nominal(problem, s(z0)).value; }

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::kIo;
}

}  // namespace

TEST(Nominal, OneStepFromTheLowerBound) {
  const OcpProblem problem = growth_problem(CostVariant::kNominal, 1);
  const OcpSolution sol = solve_nominal(problem, s(1.0));
  EXPECT_NEAR(sol.v_seq[0][0], 0.1, 1e-9);
  EXPECT_NEAR(sol.value, -std::log(4.9), 1e-9);
  EXPECT_LE(sol.feasibility_violation, 1e-8);
  EXPECT_EQ(sol.z_seq.size(), 2u);
}

TEST(Nominal, StayingAtTheSteadyStateBoundsTheValue) {
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax}) {
    for (int n = 1; n <= 15; ++n) {
      const OcpProblem problem = growth_problem(variant, n);
      const OcpSolution sol = solve_nominal(problem, problem.ross->z_s);
      EXPECT_LE(sol.value, n * problem.ross->cost + 1e-8) << to_string(variant) << " N=" << n;
    }
  }
}

TEST(Nominal, MatchesDynamicProgrammingOracle) {
  const OcpProblem problem = growth_problem(CostVariant::kNominal, 10);
  const DpValueTable table(problem, 10, 1201, 1201);
  for (double z0 : {1.0, 2.2344, 5.0, 9.0}) {
    const double solver = value_at(problem, z0);
    const double dp = table.value(10, z0);
    EXPECT_NEAR(solver, dp, 5e-3) << z0;
    // The DP value is the value of a feasible policy up to interpolation error.
    EXPECT_LE(solver, dp + 5e-3);
  }
}

TEST(Nominal, RolloutAndObjectiveConsistency) {
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax, CostVariant::kInt}) {
    const OcpProblem problem = growth_problem(variant, 10);
    for (double z0 : {1.0, 4.0, 8.5}) {
      const OcpSolution sol = solve_nominal(problem, s(z0));
      const auto z = rollout(problem.model, sol.z0, sol.v_seq);
      ASSERT_EQ(z.size(), sol.z_seq.size());
      for (std::size_t k = 0; k < z.size(); ++k) EXPECT_EQ(z[k], sol.z_seq[k]);
      EXPECT_NEAR(trajectory_objective(problem, ObjectiveMode::kOriginal, sol.z0, sol.v_seq), sol.value,
                  1e-10);
      EXPECT_LE(sol.feasibility_violation, 1e-8);
      for (int k = 0; k < problem.horizon; ++k) {
        Vector zv(2);
        zv << sol.z_seq[k][0], sol.v_seq[k][0];
        EXPECT_TRUE(problem.tightened.contains(zv, 1e-8));
      }
    }
  }
}

TEST(Nominal, SinglePerturbationsDoNotImprove) {
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax, CostVariant::kInt}) {
    const OcpProblem problem = growth_problem(variant, 10);
    const BoxSet inputs = problem.tightened.slice(1, 1);
    const BoxSet states = problem.tightened.slice(0, 1);
    for (double z0 : {1.0, 3.0, 7.0}) {
      const OcpSolution sol = solve_nominal(problem, s(z0));
      int checked = 0;
      for (int k = 0; k < problem.horizon; ++k) {
        for (double delta : {-1e-4, 1e-4}) {
          std::vector<Vector> v = sol.v_seq;
          v[k] = inputs.project(v[k] + s(delta));
          const auto z = rollout(problem.model, sol.z0, v);
          bool feasible = true;
          for (int j = 0; j < problem.horizon; ++j) feasible = feasible && states.contains(z[j], 1e-8);
          if (!feasible) continue;
          ++checked;
          EXPECT_GE(trajectory_objective(problem, ObjectiveMode::kOriginal, sol.z0, v), sol.value - 1e-6)
              << to_string(variant) << " z0=" << z0 << " k=" << k << " delta=" << delta;
        }
      }
      EXPECT_GT(checked, problem.horizon);
    }
  }
}

TEST(Nominal, Deterministic) {
  const OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  const OcpSolution warm = solve_nominal(problem, s(2.0));
  const OcpSolution a = solve_nominal(problem, s(6.0), &warm);
  const OcpSolution b = solve_nominal(problem, s(6.0), &warm);
  EXPECT_EQ(a.value, b.value);
  for (int k = 0; k < problem.horizon; ++k) EXPECT_EQ(a.v_seq[k], b.v_seq[k]);
  EXPECT_EQ(a.starts_tried, b.starts_tried);
}

TEST(Nominal, ZeroHorizonIsRejected) {
  OcpProblem problem = growth_problem(CostVariant::kNominal, 1);
  problem.horizon = 0;
  EXPECT_EQ(code_of([&] { solve_nominal(problem, s(2.0)); }), ErrorCode::kInvalidArgument);
}

TEST(Robust, TubeOptimalInitialState) {
  const OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  const double x = 3.2344;
  const OcpSolution sol = solve_robust(problem, s(x));
  EXPECT_GE(sol.z0[0], x - 1.0 - 1e-12);
  EXPECT_LE(sol.z0[0], x + 1.0 + 1e-12);
  EXPECT_NEAR(sol.value, value_at(problem, sol.z0[0]), 1e-6);
  for (double z : linspace(x - 1.0, x + 1.0, 50)) {
    EXPECT_LE(sol.value, value_at(problem, z) + 1e-6) << z;
  }
}

TEST(Robust, TubeOptimalityAwayFromTheSteadyState) {
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kInt}) {
    const OcpProblem problem = growth_problem(variant, 10);
    for (double x : {1.5, 6.0, 9.5}) {
      const OcpSolution sol = solve_robust(problem, s(x));
      const BoxSet box = initial_state_box(problem, s(x));
      for (double z : linspace(box.lower()[0], box.upper()[0], 50)) {
        EXPECT_LE(sol.value, value_at(problem, z) + 1e-6) << to_string(variant) << " x=" << x << " z=" << z;
      }
    }
  }
}

TEST(Robust, ZeroTubeEqualsNominal) {
  const OcpProblem problem = growth_problem(CostVariant::kNominal, 10, BoxSet::interval(0, 0));
  for (double x : {1.0, 2.5, 7.0}) {
    const OcpSolution robust = solve_robust(problem, s(x));
    const OcpSolution nominal = solve_nominal(problem, s(x));
    EXPECT_EQ(robust.z0[0], x);
    EXPECT_NEAR(robust.value, nominal.value, 1e-10);
  }
}

TEST(Robust, NearestInitialisationIsExactAtTheSteadyState) {
  OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  problem.init_mode = InitMode::kNearestToRoss;
  const OcpSolution sol = solve_robust(problem, problem.ross->z_s);
  EXPECT_EQ(sol.z0, problem.ross->z_s);
  const OcpSolution far = solve_robust(problem, s(8.0));
  EXPECT_EQ(far.z0[0], 7.0);
}

TEST(Robust, FixedInitialisationUsesTheMeasurement) {
  OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  problem.init_mode = InitMode::kFixed;
  EXPECT_EQ(solve_robust(problem, s(6.5)).z0[0], 6.5);
}

TEST(Robust, DissipativityModes) {
  OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  const OcpSolution first = solve_robust(problem, s(3.0));

  problem.diss_mode = DissMode::kFixInit;
  EXPECT_EQ(code_of([&] { solve_robust(problem, s(3.0), 1); }), ErrorCode::kMissingPrev);
  const double x1 = first.z_seq[1][0] + 0.7;
  const OcpSolution fixed = solve_robust(problem, s(x1), 1, &first, &first);
  EXPECT_EQ(fixed.z0, first.z_seq[1]);

  problem.diss_mode = DissMode::kLambdaInit;
  EXPECT_EQ(code_of([&] { solve_robust(problem, s(3.0), 1); }), ErrorCode::kMissingPrev);
  const OcpSolution lam = solve_robust(problem, s(x1), 1, &first, &first);
  EXPECT_LE((*problem.storage)(lam.z0), (*problem.storage)(first.z_seq[1]) + 1e-8);
  EXPECT_LE(std::abs(x1 - lam.z0[0]), 1.0 + 1e-12);
  // Step 0 ignores the mode.
  EXPECT_NO_THROW(solve_robust(problem, s(3.0), 0));
}

TEST(Robust, InfeasibleMeasurement) {
  const OcpProblem problem = growth_problem(CostVariant::kMax, 10);
  EXPECT_EQ(code_of([&] { solve_robust(problem, s(12.5)); }), ErrorCode::kInfeasible);
}

TEST(Rotated, ValueAndConsistency) {
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax}) {
    const OcpProblem problem = growth_problem(variant, 10);
    const OcpSolution at_ross = solve_rotated(problem, problem.ross->z_s);
    EXPECT_LE(at_ross.value, 1e-6);
    const OcpSolution from_one = solve_rotated(problem, s(1.0));
    if (variant == CostVariant::kNominal) EXPECT_GE(from_one.value, -1e-8);
    EXPECT_NEAR(trajectory_objective(problem, ObjectiveMode::kRotated, from_one.z0, from_one.v_seq),
                from_one.value, 1e-10);
  }
}

TEST(Rotated, TelescopesAgainstTheOriginalValue) {
  // Sum of rotated costs = J_N - N l_s + lambda(z0) - lambda(z_N).
  const OcpProblem problem = growth_problem(CostVariant::kNominal, 8);
  const OcpSolution sol = solve_nominal(problem, s(4.0));
  const double rotated = trajectory_objective(problem, ObjectiveMode::kRotated, sol.z0, sol.v_seq);
  const StorageFunction& lambda = *problem.storage;
  EXPECT_NEAR(rotated,
              sol.value - 8 * problem.ross->cost + lambda(sol.z_seq.front()) - lambda(sol.z_seq.back()),
              1e-10);
}

TEST(Dp, BaseCases) {
  const OcpProblem problem = growth_problem(CostVariant::kNominal, 1);
  const DpValueTable table(problem, 1, 801, 4901);
  EXPECT_EQ(table.value(0, 3.0), 0.0);
  for (double z0 : {1.0, 2.0, 5.0, 9.0}) {
    EXPECT_NEAR(table.value(1, z0), -std::log(5.0 * std::pow(z0, 0.34) - 0.1), 1e-4) << z0;
  }
  EXPECT_TRUE(std::isinf(table.value(1, 0.5)));
  EXPECT_NEAR(value_dp_oracle(problem, s(1.0), 401, 491), -std::log(4.9), 1e-12);
}

TEST(Dp, PolicyRolloutIsFeasible) {
  const OcpProblem problem = growth_problem(CostVariant::kMax, 6);
  const DpValueTable table(problem, 6, 401, 401);
  const OcpSolution sol = table.policy_rollout(6, 5.0);
  ASSERT_EQ(sol.v_seq.size(), 6u);
  for (int k = 0; k < 6; ++k) {
    Vector zv(2);
    zv << sol.z_seq[k][0], sol.v_seq[k][0];
    EXPECT_TRUE(problem.tightened.contains(zv, 1e-9));
  }
  EXPECT_GE(sol.value, value_at(problem, 5.0) - 1e-6);
}
