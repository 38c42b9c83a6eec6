#include "rempc/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <tuple>

namespace rempc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Fixed points of z -> f_pi(z, v, 0) inside `states`.
class FixedPointSolver {
 public:
  FixedPointSolver(const SystemModel& model, BoxSet states, int scan_points)
      : model_(model), states_(std::move(states)), scan_points_(scan_points) {}

  /// All brackets found by scanning (scalar states) or the damped-iteration
  /// limit from `hint` (vector states).
  std::vector<Vector> solve(const Vector& v, const Vector& hint) const {
    if (model_.state_dim == 1) return scalar_roots(v);
    std::vector<Vector> out;
    if (auto z = damped(v, hint)) out.push_back(*z);
    else if (auto z2 = damped(v, states_.center())) out.push_back(*z2);
    return out;
  }

  std::optional<Vector> nearest(const Vector& v, const Vector& hint) const {
    const auto roots = solve(v, hint);
    std::optional<Vector> best;
    double best_dist = kInf;
    for (const Vector& z : roots) {
      const double d = (z - hint).norm();
      if (d < best_dist) {
        best_dist = d;
        best = z;
      }
    }
    return best;
  }

 private:
  double gap(double z, const Vector& v) const {
    return step_nominal(model_, scalar_vector(z), v)[0] - z;
  }

  std::vector<Vector> scalar_roots(const Vector& v) const {
    std::vector<Vector> roots;
    const double lo = states_.lower()[0];
    const double hi = states_.upper()[0];
    if (lo == hi) {
      if (std::abs(gap(lo, v)) <= 1e-12) roots.push_back(scalar_vector(lo));
      return roots;
    }
    const auto grid = linspace(lo, hi, scan_points_);
    double prev_z = grid[0];
    double prev_g = gap(prev_z, v);
    if (prev_g == 0.0) roots.push_back(scalar_vector(prev_z));
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double z = grid[i];
      const double g = gap(z, v);
      if (g == 0.0) {
        roots.push_back(scalar_vector(z));
      } else if (prev_g != 0.0 && (prev_g < 0.0) != (g < 0.0)) {
        roots.push_back(scalar_vector(bisect(prev_z, z, prev_g, v)));
      }
      prev_z = z;
      prev_g = g;
    }
    return roots;
  }

  double bisect(double a, double b, double ga, const Vector& v) const {
    for (int it = 0; it < 200 && b - a > 0.0; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      const double gm = gap(mid, v);
      if (gm == 0.0) return mid;
      if ((gm < 0.0) == (ga < 0.0)) {
        a = mid;
        ga = gm;
      } else {
        b = mid;
      }
    }
    // Pick the endpoint with the smaller residual.
    return std::abs(gap(a, v)) <= std::abs(gap(b, v)) ? a : b;
  }

  std::optional<Vector> damped(const Vector& v, const Vector& start) const {
    Vector z = states_.project(start);
    for (int it = 0; it < 5000; ++it) {
      const Vector next = step_nominal(model_, z, v);
      if ((next - z).norm() <= 1e-13) {
        if (states_.contains(next, 1e-12)) return states_.project(next);
        return std::nullopt;
      }
      z = 0.5 * z + 0.5 * next;
      if (!z.allFinite()) return std::nullopt;
    }
    return std::nullopt;
  }

  const SystemModel& model_;
  BoxSet states_;
  int scan_points_;
};

struct Candidate {
  double cost;
  Vector z;
  Vector v;
};

bool lexicographic_less(const Candidate& a, const Candidate& b) {
  if (a.cost != b.cost) return a.cost < b.cost;
  for (int i = 0; i < a.z.size(); ++i) {
    if (a.z[i] != b.z[i]) return a.z[i] < b.z[i];
  }
  for (int i = 0; i < a.v.size(); ++i) {
    if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
  }
  return false;
}

}  // namespace

RossResult compute_ross(const SystemModel& model, const BoxSet& tightened, const StageCost& cost,
                        const TubeSpec& tube, const RossOptions& options) {
  model.validate();
  const int n = model.state_dim;
  const int m = model.input_dim;
  if (tightened.dim() != n + m) throw Error(ErrorCode::kDimensionMismatch, "tightened set");
  if (options.input_grid_points < 2) {
    throw Error(ErrorCode::kInvalidArgument, "ROSS input grid needs at least 2 points");
  }
  const BoxSet states = tightened.slice(0, n);
  const BoxSet inputs = tightened.slice(n, m);
  const CostEvaluator ell(cost, model, tube);
  const FixedPointSolver fixed_points(model, states, options.state_scan_points);

  // Grid stage: all steady states with v on the input grid. The reduction is
  // a lexicographic min on (cost, z, v), so evaluation order does not matter.
  std::optional<Candidate> best;
  std::vector<Candidate> grid_candidates;
  for (const Vector& v : inputs.grid(options.input_grid_points)) {
    for (const Vector& z : fixed_points.solve(v, states.center())) {
      if (!states.contains(z, 1e-12)) continue;
      Candidate c{ell.ell(z, v), z, v};
      if (!std::isfinite(c.cost)) continue;
      grid_candidates.push_back(c);
      if (!best || lexicographic_less(c, *best)) best = c;
    }
  }
  if (!best) throw Error(ErrorCode::kNoSteadyState, "no steady state inside the tightened set");

  int ties = 0;
  for (const Candidate& c : grid_candidates) {
    if (std::abs(c.cost - best->cost) <= 1e-12 * std::max(1.0, std::abs(best->cost))) ++ties;
  }

  // Local refinement: compass search on v, z tracked as the nearest fixed point.
  auto evaluate = [&](const Vector& v, const Vector& hint) -> std::optional<Candidate> {
    if (!inputs.contains(v)) return std::nullopt;
    auto z = fixed_points.nearest(v, hint);
    if (!z || !states.contains(*z, 1e-12)) return std::nullopt;
    const double c = ell.ell(*z, v);
    if (!std::isfinite(c)) return std::nullopt;
    return Candidate{c, *z, v};
  };

  Candidate current = *best;
  Vector step(m);
  for (int i = 0; i < m; ++i) {
    const double width = inputs.upper()[i] - inputs.lower()[i];
    step[i] = width / (options.input_grid_points - 1);
  }
  while (step.maxCoeff() >= options.step_tolerance) {
    bool moved = false;
    for (int i = 0; i < m && !moved; ++i) {
      if (step[i] < options.step_tolerance) continue;
      for (const double dir : {-1.0, 1.0}) {
        Vector v = current.v;
        v[i] += dir * step[i];
        v = inputs.project(v);
        auto trial = evaluate(v, current.z);
        if (trial && trial->cost < current.cost) {
          current = *trial;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }

  RossResult result;
  result.z_s = current.z;
  result.v_s = current.v;
  result.cost = ell.ell(current.z, current.v);
  result.residual = (current.z - step_nominal(model, current.z, current.v)).norm();
  result.tied_minimizers = std::max(ties, 1);
  if (result.residual > options.residual_tolerance) {
    throw Error(ErrorCode::kResidualUnreachable,
                "steady-state residual " + std::to_string(result.residual));
  }
  result.interior_margin = interior_margin(result, tightened);
  result.boundary_warning = result.interior_margin <= 1e-6;
  return result;
}

double interior_margin(const RossResult& ross, const BoxSet& tightened) {
  Vector p(ross.z_s.size() + ross.v_s.size());
  p << ross.z_s, ross.v_s;
  return tightened.interior_margin(p);
}

}  // namespace rempc
