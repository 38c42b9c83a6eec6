#include "rempc/model.hpp"

#include "rempc/numdiff.hpp"

#include <algorithm>
#include <limits>

namespace rempc {

namespace {

void require_dim(const Vector& v, int expected, const char* what) {
  if (v.size() != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + " has dimension " + std::to_string(v.size()) + ", expected " +
                    std::to_string(expected));
  }
}

}  // namespace

void SystemModel::validate() const {
  if (state_dim <= 0 || input_dim <= 0 || disturbance_dim <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "model dimensions must be positive");
  }
  if (state_dim > kMaxDim || input_dim > kMaxDim || disturbance_dim > kMaxDim ||
      state_dim + input_dim > kMaxDim) {
    throw Error(ErrorCode::kInvalidArgument, "model dimensions exceed kMaxDim");
  }
  if (!dynamics || !feedback) throw Error(ErrorCode::kInvalidArgument, "model is missing f or pi");
  if (disturbance_set.dim() != disturbance_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "disturbance set dimension");
  }
  if (joint_constraints.dim() != state_dim + input_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "joint constraint dimension");
  }
}

Vector apply_feedback(const SystemModel& model, const Vector& x, const Vector& v) {
  require_dim(x, model.state_dim, "state");
  require_dim(v, model.input_dim, "nominal input");
  if (model.feedback_is_identity) return v;
  return model.feedback(x, v);
}

Vector step_real(const SystemModel& model, const Vector& x, const Vector& v, const Vector& w) {
  require_dim(w, model.disturbance_dim, "disturbance");
  if (!model.disturbance_set.contains(w, 1e-12)) {
    throw Error(ErrorCode::kInvalidDisturbance, "disturbance sample outside W");
  }
  return model.dynamics(x, apply_feedback(model, x, v), w);
}

Vector step_nominal(const SystemModel& model, const Vector& z, const Vector& v) {
  return model.dynamics(z, apply_feedback(model, z, v), model.zero_disturbance());
}

Vector error_step(const SystemModel& model, const Vector& x, const Vector& z, const Vector& v,
                  const Vector& w) {
  if (model.error_dynamics) {
    require_dim(w, model.disturbance_dim, "disturbance");
    if (!model.disturbance_set.contains(w, 1e-12)) {
      throw Error(ErrorCode::kInvalidDisturbance, "disturbance sample outside W");
    }
    return model.error_dynamics(x, z, v, w);
  }
  return step_real(model, x, v, w) - step_nominal(model, z, v);
}

void nominal_jacobian(const SystemModel& model, const Vector& z, const Vector& v, Matrix& a,
                      Matrix& b) {
  const int n = model.state_dim;
  const int m = model.input_dim;
  const Vector w0 = model.zero_disturbance();
  if (model.dynamics_jacobian && (model.feedback_is_identity || model.feedback_jacobian)) {
    const Vector u = apply_feedback(model, z, v);
    Matrix fx(n, n), fu(n, m);
    model.dynamics_jacobian(z, u, w0, fx, fu);
    if (model.feedback_is_identity) {
      a = fx;
      b = fu;
    } else {
      Matrix pix(m, n), piv(m, m);
      model.feedback_jacobian(z, v, pix, piv);
      a = fx + fu * pix;
      b = fu * piv;
    }
    return;
  }
  a.resize(n, n);
  b.resize(n, m);
  for (int j = 0; j < n; ++j) {
    const double h = fd_step(z[j]);
    Vector zp = z, zm = z;
    zp[j] += h;
    zm[j] -= h;
    a.col(j) = (step_nominal(model, zp, v) - step_nominal(model, zm, v)) / (2.0 * h);
  }
  for (int j = 0; j < m; ++j) {
    const double h = fd_step(v[j]);
    Vector vp = v, vm = v;
    vp[j] += h;
    vm[j] -= h;
    b.col(j) = (step_nominal(model, z, vp) - step_nominal(model, z, vm)) / (2.0 * h);
  }
}

BoxSet tighten_constraints(const BoxSet& joint_constraints, const BoxSet& omega) {
  const int n = omega.dim();
  const int m = joint_constraints.dim() - n;
  if (m < 0) throw Error(ErrorCode::kDimensionMismatch, "omega larger than the joint box");
  const BoxSet state = joint_constraints.slice(0, n).erode(omega);
  if (m == 0) return state;
  return BoxSet::product(state, joint_constraints.slice(n, m));
}

RciReport check_rci(const SystemModel& model, const TubeSpec& tube, int sample_density) {
  if (sample_density < 2) throw Error(ErrorCode::kInvalidArgument, "sample_density must be >= 2");
  model.validate();
  const int n = model.state_dim;
  const int m = model.input_dim;
  if (tube.omega.dim() != n) throw Error(ErrorCode::kDimensionMismatch, "omega dimension");

  const auto errors = tube.omega.grid(sample_density);
  const auto disturbances = model.disturbance_set.grid(sample_density);
  // (x, v) samples: grid over the (x, u) box, kept when (x, pi(x, v)) is in Z.
  const auto joint = model.joint_constraints.grid(sample_density);

  RciReport report;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (const Vector& xv : joint) {
    const Vector x = xv.head(n);
    const Vector v = xv.segment(n, m);
    Vector xu(n + m);
    xu << x, apply_feedback(model, x, v);
    if (!model.joint_constraints.contains(xu, 1e-12)) continue;
    for (const Vector& e : errors) {
      const Vector z = x - e;
      for (const Vector& w : disturbances) {
        const Vector e_next = error_step(model, x, z, v, w);
        const double margin = tube.omega.interior_margin(e_next);
        ++report.samples_checked;
        if (margin < report.worst_margin) {
          report.worst_margin = margin;
          if (margin < 0.0) report.violating_sample = RciSample{x, z, v, w, e_next};
        }
      }
    }
  }
  if (report.samples_checked == 0) report.worst_margin = 0.0;
  report.max_violation = std::max(0.0, -report.worst_margin);
  if (report.max_violation == 0.0) report.violating_sample.reset();
  return report;
}

SystemModel with_affine_feedback(SystemModel model, Matrix gain) {
  if (model.state_dim != model.input_dim || gain.rows() != model.input_dim ||
      gain.cols() != model.state_dim) {
    throw Error(ErrorCode::kDimensionMismatch, "affine feedback gain shape");
  }
  model.feedback_is_identity = false;
  model.feedback = [gain](const Vector& x, const Vector& v) -> Vector {
    return v + gain * (x - v);
  };
  model.feedback_jacobian = [gain](const Vector&, const Vector&, Matrix& pix, Matrix& piv) {
    pix = gain;
    piv = Matrix::Identity(gain.rows(), gain.rows()) - gain;
  };
  return model;
}

}  // namespace rempc
