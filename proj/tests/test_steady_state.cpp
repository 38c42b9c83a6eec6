#include "rempc/presets.hpp"
#include "rempc/steady_state.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rempc;

namespace {

Vector s(double x) { return scalar_vector(x); }

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

struct Growth {
  Preset p = make_growth_preset();
  BoxSet zbar = tighten_constraints(p.model.joint_constraints, p.tube.omega);
  RossResult ross(CostVariant variant, const RossOptions& options = {}) const {
    return compute_ross(p.model, zbar, p.cost.with_variant(variant), p.tube, options);
  }
};

const Growth& growth() {
  static const Growth g;
  return g;
}

// Minimizes f over [lo, hi] by a dense scan followed by golden-section search.
double brute_force_min(const std::function<double(double)>& f, double lo, double hi, double* arg) {
  const int n = 200001;
  double best = f(lo), at = lo;
  for (int i = 1; i < n; ++i) {
    const double z = lo + (hi - lo) * i / (n - 1);
    const double v = f(z);
    if (v < best) {
      best = v;
      at = z;
    }
  }
  const double step = (hi - lo) / (n - 1);
  double a = std::max(lo, at - step), b = std::min(hi, at + step);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (f(c) < f(d)) {
      b = d;
    } else {
      a = c;
    }
  }
  *arg = 0.5 * (a + b);
  return std::min(best, f(*arg));
}

double growth_cost(double x, double u) { return -std::log(5.0 * std::pow(x, 0.34) - u); }

}  // namespace

TEST(Ross, NominalCostMatchesStationarityRoot) {
  const RossResult r = growth().ross(CostVariant::kNominal);
  const double root = std::pow(1.7, 1.0 / 0.66);
  EXPECT_NEAR(root, 2.2344, 1e-4);
  EXPECT_NEAR(r.z_s[0], root, 1e-3);
  EXPECT_NEAR(r.v_s[0], root, 1e-3);
  EXPECT_NEAR(r.cost, -1.4673, 1e-3);
  EXPECT_LE(r.residual, 1e-8);
  EXPECT_TRUE(growth().zbar.contains(vec2(r.z_s[0], r.v_s[0])));
}

TEST(Ross, MaxCostMatchesShiftedRoot) {
  const RossResult r = growth().ross(CostVariant::kMax);
  const double root = 1.0 + std::pow(1.7, 1.0 / 0.66);
  EXPECT_NEAR(r.z_s[0], root, 1e-3);
  EXPECT_NEAR(r.v_s[0], root, 1e-3);
  EXPECT_NEAR(r.cost, -1.2049, 1e-3);
  EXPECT_LE(r.residual, 1e-8);
}

TEST(Ross, AgreesWithOneDimensionalBruteForce) {
  const Growth& g = growth();
  double arg = 0.0;
  const double nominal = brute_force_min([](double z) { return growth_cost(z, z); }, 1.0, 5.0, &arg);
  EXPECT_NEAR(g.ross(CostVariant::kNominal).cost, nominal, 1e-6);
  EXPECT_NEAR(arg, std::pow(1.7, 1.0 / 0.66), 1e-6);
  const double worst = brute_force_min([](double z) { return growth_cost(z - 1.0, z); }, 1.5, 5.0, &arg);
  EXPECT_NEAR(g.ross(CostVariant::kMax).cost, worst, 1e-6);
}

TEST(Ross, CostIsTheStageCostAtTheSteadyState) {
  const Growth& g = growth();
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax, CostVariant::kInt}) {
    const RossResult r = g.ross(variant);
    EXPECT_EQ(r.cost, eval_ell(g.p.cost.with_variant(variant), g.p.model, g.p.tube, r.z_s, r.v_s));
  }
}

TEST(Ross, InteriorMarginOfNominalSteadyState) {
  const RossResult r = growth().ross(CostVariant::kNominal);
  EXPECT_NEAR(r.interior_margin, 1.2344, 1e-3);
  EXPECT_NEAR(interior_margin(r, growth().zbar), r.z_s[0] - 1.0, 1e-15);
  EXPECT_FALSE(r.boundary_warning);
}

TEST(Ross, InteriorMarginExamples) {
  RossResult r;
  r.z_s = s(0.5);
  r.v_s = s(0.5);
  const BoxSet unit(vec2(0, 0), vec2(1, 1));
  EXPECT_DOUBLE_EQ(interior_margin(r, unit), 0.5);
  r.z_s = s(1.0);
  EXPECT_EQ(interior_margin(r, unit), 0.0);
}

TEST(Ross, GridDoublingStable) {
  RossOptions fine;
  fine.input_grid_points = 1001;
  fine.state_scan_points = 401;
  for (CostVariant variant : {CostVariant::kNominal, CostVariant::kMax, CostVariant::kInt}) {
    const RossResult a = growth().ross(variant);
    const RossResult b = growth().ross(variant, fine);
    EXPECT_LE(std::abs(a.z_s[0] - b.z_s[0]), 1e-4);
    EXPECT_LE(std::abs(a.v_s[0] - b.v_s[0]), 1e-4);
  }
}

TEST(Ross, SingletonTightenedSet) {
  const Growth& g = growth();
  const BoxSet point = BoxSet::singleton(vec2(3.0, 3.0));
  const RossResult r = compute_ross(g.p.model, point, g.p.cost, g.p.tube);
  EXPECT_EQ(r.z_s[0], 3.0);
  EXPECT_EQ(r.v_s[0], 3.0);
  EXPECT_NEAR(r.cost, growth_cost(3.0, 3.0), 1e-14);
  EXPECT_EQ(r.interior_margin, 0.0);
  EXPECT_TRUE(r.boundary_warning);
}

TEST(Ross, EmptyManifoldIsAnError) {
  const Growth& g = growth();
  const BoxSet disjoint(vec2(1.0, 3.0), vec2(2.0, 4.0));
  try {
    compute_ross(g.p.model, disjoint, g.p.cost, g.p.tube);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoSteadyState);
  }
}

TEST(Ross, IntegralVariant) {
  const RossResult r = growth().ross(CostVariant::kInt);
  EXPECT_NEAR(r.z_s[0], r.v_s[0], 1e-8);
  EXPECT_GT(r.z_s[0], 2.2344);
  EXPECT_LT(r.z_s[0], 3.2344);
}
