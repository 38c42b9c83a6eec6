#pragma once

#include "rempc/box_set.hpp"

#include <functional>
#include <optional>
#include <string>

namespace rempc {

using ErrorFn =
    std::function<Vector(const Vector& x, const Vector& z, const Vector& v, const Vector& w)>;
using DynamicsFn = std::function<Vector(const Vector& x, const Vector& u, const Vector& w)>;
using FeedbackFn = std::function<Vector(const Vector& x, const Vector& v)>;
/// Writes df/dx (n x n) and df/du (n x m) at (x, u, w).
using DynamicsJacobianFn =
    std::function<void(const Vector& x, const Vector& u, const Vector& w, Matrix& fx, Matrix& fu)>;
/// Writes dpi/dx (m x n) and dpi/dv (m x m) at (x, v).
using FeedbackJacobianFn =
    std::function<void(const Vector& x, const Vector& v, Matrix& pix, Matrix& piv)>;

/// x+ = f(x, u, w) with tube feedback u = pi(x, v).
///
/// `dynamics` and `feedback` must be total on the constraint boxes. The
/// Jacobian slots are optional; when empty, derivatives fall back to central
/// finite differences.
struct SystemModel {
  std::string name;
  int state_dim = 0;
  int input_dim = 0;
  int disturbance_dim = 0;
  DynamicsFn dynamics;
  FeedbackFn feedback;
  BoxSet disturbance_set;
  /// Box over the stacked vector (x, u).
  BoxSet joint_constraints;
  DynamicsJacobianFn dynamics_jacobian;
  FeedbackJacobianFn feedback_jacobian;
  /// Optional closed form of (x, z, v, w) -> f_pi(x, v, w) - f_pi(z, v, 0),
  /// avoiding cancellation when the error system is known analytically.
  ErrorFn error_dynamics;
  bool feedback_is_identity = false;

  BoxSet state_box() const { return joint_constraints.slice(0, state_dim); }
  BoxSet input_box() const { return joint_constraints.slice(state_dim, input_dim); }
  Vector zero_disturbance() const { return Vector::Zero(disturbance_dim); }

  /// Throws kInvalidArgument / kDimensionMismatch on an inconsistent model.
  void validate() const;
};

/// The robust control invariant set of the error system.
struct TubeSpec {
  BoxSet omega;
};

Vector apply_feedback(const SystemModel& model, const Vector& x, const Vector& v);
/// f(x, pi(x, v), w); throws kInvalidDisturbance when w lies outside W.
Vector step_real(const SystemModel& model, const Vector& x, const Vector& v, const Vector& w);
/// f_pi(z, v, 0).
Vector step_nominal(const SystemModel& model, const Vector& z, const Vector& v);
/// f_pi(x, v, w) - f_pi(z, v, 0).
Vector error_step(const SystemModel& model, const Vector& x, const Vector& z, const Vector& v,
                  const Vector& w);

/// Jacobians of z -> f_pi(z, v, 0): a = d/dz (n x n), b = d/dv (n x m).
void nominal_jacobian(const SystemModel& model, const Vector& z, const Vector& v, Matrix& a,
                      Matrix& b);

/// Erodes the state part of `joint_constraints` by `omega`; input bounds are
/// left unchanged, which is exact for the identity feedback.
BoxSet tighten_constraints(const BoxSet& joint_constraints, const BoxSet& omega);

struct RciSample {
  Vector x, z, v, w, e_next;
};

struct RciReport {
  /// Smallest signed distance of e+ to the faces of omega (negative = outside).
  double worst_margin = 0.0;
  /// max(0, -worst_margin).
  double max_violation = 0.0;
  std::optional<RciSample> violating_sample;
  long samples_checked = 0;
};

/// Sampling refutation test of robust control invariance. Grids over omega,
/// the feasible (x, v) set and W always include the vertices.
RciReport check_rci(const SystemModel& model, const TubeSpec& tube, int sample_density = 21);

/// pi(x, v) = v + K (x - v); requires state_dim == input_dim.
SystemModel with_affine_feedback(SystemModel model, Matrix gain);

}  // namespace rempc
