#pragma once

#include "rempc/model.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace rempc {

/// Which tube modification of L_pi serves as the stage cost l.
enum class CostVariant { kNominal, kMax, kInt };

const char* to_string(CostVariant variant);
CostVariant parse_cost_variant(const std::string& name);

using BaseCostFn = std::function<double(const Vector& x, const Vector& u)>;
/// Writes the gradient of L at (x, u) and returns L(x, u).
using BaseCostGradientFn =
    std::function<double(const Vector& x, const Vector& u, Vector& grad_x, Vector& grad_u)>;

inline constexpr int kDefaultMaxGridPoints = 41;
inline constexpr int kDefaultIntGridPoints = 81;

/// ln(xi) for xi >= knot, continued below the knot by its second-order Taylor
/// polynomial, so the result is C^2 and finite on the whole real line.
double relaxed_log(double xi, double knot = 1e-3);
/// d/dxi relaxed_log.
double relaxed_log_derivative(double xi, double knot = 1e-3);

/// Economic stage cost L(x, u) together with the tube variant that turns it
/// into l(z, v). Value type; "with_*" members return modified copies.
class StageCost {
 public:
  /// Empty cost; only useful as a placeholder before assignment.
  StageCost() = default;
  explicit StageCost(BaseCostFn base, CostVariant variant = CostVariant::kNominal);

  StageCost with_variant(CostVariant variant) const;
  StageCost with_gradient(BaseCostGradientFn gradient) const;
  /// 0 restores the per-variant default (41 for MAX, 81 for INT).
  StageCost with_omega_grid_points(int points) const;
  StageCost with_normalized_int(bool normalize) const;
  /// Caches l(z_s, v_s) for the given tube; invalidated by any change of
  /// variant, grid, normalization or tube.
  StageCost with_ross_reference(double value, const TubeSpec& tube) const;

  CostVariant variant() const { return variant_; }
  int omega_grid_points() const;
  bool normalized_int() const { return normalize_int_; }
  const BaseCostFn& base() const { return base_; }
  const BaseCostGradientFn& base_gradient() const { return base_gradient_; }

  bool has_ross_reference() const { return reference_.has_value(); }
  /// Throws kStaleReference when missing or computed for another setup.
  double ross_cost_reference(const TubeSpec& tube) const;

 private:
  struct Reference {
    double value;
    CostVariant variant;
    int grid_points;
    bool normalize;
    BoxSet omega;
  };

  BaseCostFn base_;
  BaseCostGradientFn base_gradient_;
  CostVariant variant_ = CostVariant::kNominal;
  int grid_points_ = 0;
  bool normalize_int_ = false;
  std::optional<Reference> reference_;
};

/// Storage function lambda(z) of the dissipativity inequality.
class StorageFunction {
 public:
  using Fn = std::function<double(const Vector&)>;
  using GradientFn = std::function<Vector(const Vector&)>;

  StorageFunction(Fn fn, GradientFn gradient = {});
  static StorageFunction linear(Vector slope, double offset = 0.0);
  static StorageFunction zero(int state_dim);

  double operator()(const Vector& z) const { return fn_(z); }
  Vector gradient(const Vector& z) const;

  bool is_linear() const { return slope_.has_value(); }
  /// Slope c of lambda(z) = c'z + d (linear storage only).
  const Vector& slope() const;
  double offset() const { return offset_; }

  StorageFunction shifted(double constant) const;

  /// sup |lambda| over `box`: exact from the vertices for linear storage,
  /// grid estimate otherwise.
  double declared_bound(const BoxSet& box, int grid_points = 41) const;

 private:
  Fn fn_;
  GradientFn gradient_;
  std::optional<Vector> slope_;
  double offset_ = 0.0;
};

/// Composite Simpson weights for `points` equispaced nodes spanning `width`
/// (trapezoid for two nodes, 3/8 rule closing an odd interval count).
std::vector<double> simpson_weights(int points, double width);

/// A stage cost bound to a model and tube with the omega sampling grid
/// precomputed. All OCP machinery evaluates l through this type.
class CostEvaluator {
 public:
  CostEvaluator(StageCost cost, SystemModel model, TubeSpec tube);

  double l_pi(const Vector& z, const Vector& v) const;
  double l_max(const Vector& z, const Vector& v) const;
  double l_int(const Vector& z, const Vector& v) const;
  /// Dispatches on the variant.
  double ell(const Vector& z, const Vector& v) const;
  /// l and its gradient; analytic when the base cost and feedback provide
  /// derivatives, central finite differences otherwise.
  double ell_with_gradient(const Vector& z, const Vector& v, Vector& grad_z, Vector& grad_v) const;

  const StageCost& cost() const { return cost_; }
  const SystemModel& model() const { return model_; }
  const TubeSpec& tube() const { return tube_; }
  const std::vector<Vector>& max_offsets() const { return max_offsets_; }
  const std::vector<Vector>& int_offsets() const { return int_offsets_; }
  const std::vector<double>& int_weights() const { return int_weights_; }

 private:
  double l_pi_with_gradient(const Vector& z, const Vector& v, Vector& gz, Vector& gv) const;
  bool analytic_ = false;

  StageCost cost_;
  SystemModel model_;
  TubeSpec tube_;
  std::vector<Vector> max_offsets_;
  std::vector<Vector> int_offsets_;
  std::vector<double> int_weights_;
  bool int_zero_ = false;
};

double eval_L_pi(const StageCost& cost, const SystemModel& model, const Vector& z, const Vector& v);
double eval_L_max(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                  const Vector& z, const Vector& v);
double eval_L_int(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                  const Vector& z, const Vector& v);
double eval_ell(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                const Vector& z, const Vector& v);
/// l(z, v) - l(z_s, v_s).
double supply_rate(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                   const Vector& z, const Vector& v);
/// l(z, v) - l(z_s, v_s) + lambda(z) - lambda(f_pi(z, v, 0)).
double eval_rotated(const StageCost& cost, const SystemModel& model, const TubeSpec& tube,
                    const StorageFunction& storage, const Vector& z, const Vector& v);
double eval_rotated(const CostEvaluator& ell, const StorageFunction& storage, const Vector& z,
                    const Vector& v);

/// Largest finite-difference slope of l between neighbouring points of a
/// `points`-per-dimension grid over `region` (a box over (z, v)).
double estimate_lipschitz(const CostEvaluator& ell, const BoxSet& region, int points);

}  // namespace rempc
