#include "rempc/costs.hpp"

#include "rempc/numdiff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rempc {

const char* to_string(CostVariant variant) {
  switch (variant) {
    case CostVariant::kNominal: return "nominal";
    case CostVariant::kMax: return "max";
    case CostVariant::kInt: return "int";
  }
  return "unknown";
}

CostVariant parse_cost_variant(const std::string& name) {
  if (name == "nominal" || name == "pi" || name == "L") return CostVariant::kNominal;
  if (name == "max") return CostVariant::kMax;
  if (name == "int") return CostVariant::kInt;
  throw Error(ErrorCode::kConfig, "unknown cost variant '" + name + "'");
}

double relaxed_log(double xi, double knot) {
  if (xi >= knot) return std::log(xi);
  const double d = xi - knot;
  return std::log(knot) + d / knot - d * d / (2.0 * knot * knot);
}

double relaxed_log_derivative(double xi, double knot) {
  if (xi >= knot) return 1.0 / xi;
  return 1.0 / knot - (xi - knot) / (knot * knot);
}

// ---------------------------------------------------------------------------
// StageCost

StageCost::StageCost(BaseCostFn base, CostVariant variant)
    : base_(std::move(base)), variant_(variant) {
  if (!base_) throw Error(ErrorCode::kInvalidArgument, "stage cost needs a base function");
}

StageCost StageCost::with_variant(CostVariant variant) const {
  StageCost out = *this;
  out.variant_ = variant;
  return out;
}

StageCost StageCost::with_gradient(BaseCostGradientFn gradient) const {
  StageCost out = *this;
  out.base_gradient_ = std::move(gradient);
  return out;
}

StageCost StageCost::with_omega_grid_points(int points) const {
  if (points < 0 || points == 1) {
    throw Error(ErrorCode::kInvalidArgument, "omega grid needs 0 (default) or >= 2 points");
  }
  StageCost out = *this;
  out.grid_points_ = points;
  return out;
}

StageCost StageCost::with_normalized_int(bool normalize) const {
  StageCost out = *this;
  out.normalize_int_ = normalize;
  return out;
}

int StageCost::omega_grid_points() const {
  if (grid_points_ > 0) return grid_points_;
  return variant_ == CostVariant::kInt ? kDefaultIntGridPoints : kDefaultMaxGridPoints;
}

StageCost StageCost::with_ross_reference(double value, const TubeSpec& tube) const {
  StageCost out = *this;
  out.reference_ = Reference{value, variant_, omega_grid_points(), normalize_int_, tube.omega};
  return out;
}

double StageCost::ross_cost_reference(const TubeSpec& tube) const {
  if (!reference_) throw Error(ErrorCode::kStaleReference, "ROSS cost reference not set");
  const Reference& r = *reference_;
  const bool same_tube = r.omega.dim() == tube.omega.dim() &&
                         r.omega.lower() == tube.omega.lower() &&
                         r.omega.upper() == tube.omega.upper();
  if (r.variant != variant_ || r.grid_points != omega_grid_points() ||
      r.normalize != normalize_int_ || !same_tube) {
    throw Error(ErrorCode::kStaleReference,
                "ROSS cost reference was computed for a different variant or tube");
  }
  return r.value;
}

// ---------------------------------------------------------------------------
// StorageFunction

StorageFunction::StorageFunction(Fn fn, GradientFn gradient)
    : fn_(std::move(fn)), gradient_(std::move(gradient)) {
  if (!fn_) throw Error(ErrorCode::kInvalidArgument, "storage function is empty");
}

StorageFunction StorageFunction::linear(Vector slope, double offset) {
  StorageFunction out(
      [slope, offset](const Vector& z) { return slope.dot(z) + offset; },
      [slope](const Vector&) { return slope; });
  out.slope_ = slope;
  out.offset_ = offset;
  return out;
}

StorageFunction StorageFunction::zero(int state_dim) {
  return linear(Vector::Zero(state_dim), 0.0);
}

Vector StorageFunction::gradient(const Vector& z) const {
  if (gradient_) return gradient_(z);
  Vector g(z.size());
  for (int i = 0; i < z.size(); ++i) {
    const double h = fd_step(z[i]);
    Vector zp = z, zm = z;
    zp[i] += h;
    zm[i] -= h;
    g[i] = (fn_(zp) - fn_(zm)) / (2.0 * h);
  }
  return g;
}

const Vector& StorageFunction::slope() const {
  if (!slope_) throw Error(ErrorCode::kInvalidArgument, "storage function is not linear");
  return *slope_;
}

StorageFunction StorageFunction::shifted(double constant) const {
  if (slope_) return linear(*slope_, offset_ + constant);
  Fn fn = fn_;
  return StorageFunction([fn, constant](const Vector& z) { return fn(z) + constant; }, gradient_);
}

double StorageFunction::declared_bound(const BoxSet& box, int grid_points) const {
  const auto points = slope_ ? box.vertices() : box.grid(grid_points);
  double bound = 0.0;
  for (const Vector& z : points) bound = std::max(bound, std::abs(fn_(z)));
  return bound;
}

// ---------------------------------------------------------------------------
// CostEvaluator

std::vector<double> simpson_weights(int points, double width) {
  if (points < 2) throw Error(ErrorCode::kInvalidArgument, "quadrature needs >= 2 points");
  std::vector<double> w(static_cast<std::size_t>(points), 0.0);
  const int intervals = points - 1;
  const double h = width / intervals;
  if (intervals == 1) {
    w[0] = w[1] = h / 2.0;
    return w;
  }
  const int simpson = intervals % 2 == 0 ? intervals : intervals - 3;
  for (int i = 0; i < simpson; i += 2) {
    w[i] += h / 3.0;
    w[i + 1] += 4.0 * h / 3.0;
    w[i + 2] += h / 3.0;
  }
  if (simpson < intervals) {
    const double c[4] = {1.0, 3.0, 3.0, 1.0};
    for (int j = 0; j < 4; ++j) w[simpson + j] += 3.0 * h / 8.0 * c[j];
  }
  return w;
}

CostEvaluator::CostEvaluator(StageCost cost, SystemModel model, TubeSpec tube)
    : cost_(std::move(cost)), model_(std::move(model)), tube_(std::move(tube)) {
  if (tube_.omega.dim() != model_.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "omega dimension differs from state dimension");
  }
  analytic_ = static_cast<bool>(cost_.base_gradient()) &&
              (model_.feedback_is_identity || static_cast<bool>(model_.feedback_jacobian));

  const int points = cost_.omega_grid_points();
  max_offsets_ = tube_.omega.grid(points);

  // Composite Simpson weights on the same vertex-including grid per
  // non-degenerate dimension (3/8 rule on the last three intervals when the
  // interval count is odd).
  const int n = tube_.omega.dim();
  std::vector<std::vector<double>> nodes(n), weights(n);
  double volume = 1.0;
  bool degenerate = false;
  for (int i = 0; i < n; ++i) {
    const double lo = tube_.omega.lower()[i];
    const double width = tube_.omega.upper()[i] - lo;
    if (width == 0.0) {
      nodes[i] = {lo};
      weights[i] = {1.0};
      degenerate = true;
      continue;
    }
    nodes[i] = linspace(lo, tube_.omega.upper()[i], points);
    weights[i] = simpson_weights(points, width);
    volume *= width;
  }
  const bool normalize = cost_.normalized_int();
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Vector e(n);
    double weight = 1.0;
    for (int i = 0; i < n; ++i) {
      e[i] = nodes[i][idx[i]];
      weight *= weights[i][idx[i]];
    }
    int_offsets_.push_back(e);
    int_weights_.push_back(weight);
    int d = 0;
    while (d < n && ++idx[d] == nodes[d].size()) idx[d++] = 0;
    if (d == n) break;
  }
  // Normalized: mean over the non-degenerate directions. Unnormalized: a
  // zero-volume tube integrates to 0.
  if (normalize) {
    for (double& w : int_weights_) w /= volume;
  }
  int_zero_ = !normalize && degenerate;
}

double CostEvaluator::l_pi(const Vector& z, const Vector& v) const {
  if (model_.feedback_is_identity) return cost_.base()(z, v);
  return cost_.base()(z, model_.feedback(z, v));
}

double CostEvaluator::l_max(const Vector& z, const Vector& v) const {
  double best = -std::numeric_limits<double>::infinity();
  Vector x(z.size());
  for (const Vector& e : max_offsets_) {
    x = z + e;
    best = std::max(best, l_pi(x, v));
  }
  return best;
}

double CostEvaluator::l_int(const Vector& z, const Vector& v) const {
  if (int_zero_) return 0.0;
  double sum = 0.0;
  Vector x(z.size());
  for (std::size_t k = 0; k < int_offsets_.size(); ++k) {
    x = z + int_offsets_[k];
    sum += int_weights_[k] * l_pi(x, v);
  }
  return sum;
}

double CostEvaluator::ell(const Vector& z, const Vector& v) const {
  switch (cost_.variant()) {
    case CostVariant::kNominal: return l_pi(z, v);
    case CostVariant::kMax: return l_max(z, v);
    case CostVariant::kInt: return l_int(z, v);
  }
  return l_pi(z, v);
}

double CostEvaluator::l_pi_with_gradient(const Vector& z, const Vector& v, Vector& gz,
                                         Vector& gv) const {
  if (model_.feedback_is_identity) return cost_.base_gradient()(z, v, gz, gv);
  const int n = model_.state_dim;
  const int m = model_.input_dim;
  Vector gx(n), gu(m);
  const Vector u = model_.feedback(z, v);
  const double value = cost_.base_gradient()(z, u, gx, gu);
  Matrix pix(m, n), piv(m, m);
  model_.feedback_jacobian(z, v, pix, piv);
  gz = gx + pix.transpose() * gu;
  gv = piv.transpose() * gu;
  return value;
}

double CostEvaluator::ell_with_gradient(const Vector& z, const Vector& v, Vector& grad_z,
                                        Vector& grad_v) const {
  const int n = static_cast<int>(z.size());
  const int m = static_cast<int>(v.size());
  if (!analytic_) {
    grad_z.resize(n);
    grad_v.resize(m);
    for (int i = 0; i < n; ++i) {
      const double h = fd_step(z[i]);
      Vector zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      grad_z[i] = (ell(zp, v) - ell(zm, v)) / (2.0 * h);
    }
    for (int i = 0; i < m; ++i) {
      const double h = fd_step(v[i]);
      Vector vp = v, vm = v;
      vp[i] += h;
      vm[i] -= h;
      grad_v[i] = (ell(z, vp) - ell(z, vm)) / (2.0 * h);
    }
    return ell(z, v);
  }

  Vector x(n), gz(n), gv(m);
  switch (cost_.variant()) {
    case CostVariant::kNominal:
      return l_pi_with_gradient(z, v, grad_z, grad_v);
    case CostVariant::kMax: {
      // Gradient of the active grid point (first one on ties).
      double best = -std::numeric_limits<double>::infinity();
      const Vector* arg = &max_offsets_.front();
      for (const Vector& e : max_offsets_) {
        x = z + e;
        const double value = l_pi(x, v);
        if (value > best) {
          best = value;
          arg = &e;
        }
      }
      x = z + *arg;
      return l_pi_with_gradient(x, v, grad_z, grad_v);
    }
    case CostVariant::kInt: {
      grad_z = Vector::Zero(n);
      grad_v = Vector::Zero(m);
      if (int_zero_) return 0.0;
      double sum = 0.0;
      for (std::size_t k = 0; k < int_offsets_.size(); ++k) {
        x = z + int_offsets_[k];
        const double w = int_weights_[k];
        sum += w * l_pi_with_gradient(x, v, gz, gv);
        grad_z += w * gz;
        grad_v += w * gv;
      }
      return sum;
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Free-function entry points

double eval_L_pi(const StageCost& cost, const SystemModel& model, const Vector& z, const Vector& v) {
  if (z.size() != model.state_dim || v.size() != model.input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "eval_L_pi");
  }
  return cost.base()(z, apply_feedback(model, z, v));
}

double eval_L_max(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                  const Vector& z, const Vector& v) {
  return CostEvaluator(cost, model, tube).l_max(z, v);
}

double eval_L_int(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                  const Vector& z, const Vector& v) {
  return CostEvaluator(cost, model, tube).l_int(z, v);
}

double eval_ell(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                const Vector& z, const Vector& v) {
  return CostEvaluator(cost, model, tube).ell(z, v);
}

double supply_rate(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                   const Vector& z, const Vector& v) {
  const double reference = cost.ross_cost_reference(tube);
  return eval_ell(cost, model, tube, z, v) - reference;
}

double eval_rotated(const CostEvaluator& ell, const StorageFunction& storage, const Vector& z,
                    const Vector& v) {
  const double reference = ell.cost().ross_cost_reference(ell.tube());
  const Vector next = step_nominal(ell.model(), z, v);
  return ell.ell(z, v) - reference + storage(z) - storage(next);
}

double eval_rotated(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                    const StorageFunction& storage, const Vector& z, const Vector& v) {
  return eval_rotated(CostEvaluator(cost, model, tube), storage, z, v);
}

double estimate_lipschitz(const CostEvaluator& ell, const BoxSet& region, int points) {
  const int n = ell.model().state_dim;
  if (region.dim() != n + ell.model().input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "lipschitz region must be a box over (z, v)");
  }
  double slope = 0.0;
  const Vector step = region.width() / std::max(points - 1, 1);
  for (const Vector& p : region.grid(points)) {
    const double base = ell.ell(p.head(n), p.tail(p.size() - n));
    for (int i = 0; i < p.size(); ++i) {
      if (step[i] == 0.0) continue;
      Vector q = p;
      q[i] += step[i];
      if (q[i] > region.upper()[i] + 1e-12) continue;
      const double next = ell.ell(q.head(n), q.tail(q.size() - n));
      slope = std::max(slope, std::abs(next - base) / step[i]);
    }
  }
  return slope;
}

}  // namespace rempc
