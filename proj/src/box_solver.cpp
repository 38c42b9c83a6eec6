#include "rempc/box_solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

namespace rempc {

namespace {

Eigen::VectorXd clamp(const Eigen::VectorXd& y, const Eigen::VectorXd& lo,
                      const Eigen::VectorXd& hi) {
  return y.cwiseMax(lo).cwiseMin(hi);
}

}  // namespace

double projected_gradient_norm(const Eigen::VectorXd& y, const Eigen::VectorXd& grad,
                               const Eigen::VectorXd& lower, const Eigen::VectorXd& upper) {
  if (y.size() == 0) return 0.0;
  return (clamp(y - grad, lower, upper) - y).lpNorm<Eigen::Infinity>();
}

BoxSolverResult minimize_in_box(const SmoothObjective& objective, const Eigen::VectorXd& lower,
                                const Eigen::VectorXd& upper, const Eigen::VectorXd& start,
                                const BoxSolverOptions& options) {
  const Eigen::Index dim = start.size();
  BoxSolverResult result;
  result.y = clamp(start, lower, upper);
  result.gradient.resize(dim);
  result.value = objective(result.y, result.gradient);
  if (dim == 0) {
    result.converged = true;
    return result;
  }

  // Limited-memory pairs; old curvature is forgotten so the scaling follows
  // the local conditioning.
  std::deque<Eigen::VectorXd> s_hist, y_hist;
  Eigen::VectorXd grad_new(dim);
  Eigen::VectorXd mask(dim);
  std::vector<double> alphas;

  for (int it = 0; it < options.max_iterations; ++it) {
    Eigen::VectorXd& y = result.y;
    Eigen::VectorXd& g = result.gradient;
    result.iterations = it;
    result.projected_gradient = projected_gradient_norm(y, g, lower, upper);
    if (!std::isfinite(result.value)) break;
    if (result.projected_gradient <= options.tolerance) {
      result.converged = true;
      return result;
    }

    for (Eigen::Index i = 0; i < dim; ++i) {
      const double slack = 1e-12 * std::max(1.0, std::abs(y[i]));
      const bool at_lower = y[i] <= lower[i] + slack && g[i] > 0.0;
      const bool at_upper = y[i] >= upper[i] - slack && g[i] < 0.0;
      mask[i] = (at_lower || at_upper || lower[i] == upper[i]) ? 0.0 : 1.0;
    }

    bool accepted = false;
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      const bool fresh = s_hist.empty();
      Eigen::VectorXd dir = -g.cwiseProduct(mask);
      if (!fresh) {
        // Two-loop recursion on the free subspace.
        alphas.assign(s_hist.size(), 0.0);
        for (int j = static_cast<int>(s_hist.size()) - 1; j >= 0; --j) {
          const Eigen::VectorXd sj = s_hist[j].cwiseProduct(mask);
          const Eigen::VectorXd yj = y_hist[j].cwiseProduct(mask);
          const double sy = sj.dot(yj);
          if (sy <= 0.0) continue;
          alphas[j] = sj.dot(dir) / sy;
          dir -= alphas[j] * yj;
        }
        const Eigen::VectorXd s_last = s_hist.back().cwiseProduct(mask);
        const Eigen::VectorXd y_last = y_hist.back().cwiseProduct(mask);
        const double yy = y_last.squaredNorm();
        if (yy > 0.0 && s_last.dot(y_last) > 0.0) dir *= s_last.dot(y_last) / yy;
        for (std::size_t j = 0; j < s_hist.size(); ++j) {
          const Eigen::VectorXd sj = s_hist[j].cwiseProduct(mask);
          const Eigen::VectorXd yj = y_hist[j].cwiseProduct(mask);
          const double sy = sj.dot(yj);
          if (sy <= 0.0) continue;
          const double beta = yj.dot(dir) / sy;
          dir += (alphas[j] - beta) * sj;
        }
        dir = dir.cwiseProduct(mask);
        if (!(g.dot(dir) < 0.0)) {
          s_hist.clear();
          y_hist.clear();
          dir = -g.cwiseProduct(mask);
        }
      }
      if (dir.lpNorm<Eigen::Infinity>() == 0.0) {
        // Everything pinned but the projected gradient is not small: take a
        // projected steepest-descent step instead.
        dir = -g;
      }

      double alpha = 1.0;
      if (s_hist.empty()) alpha = std::min(1.0, 1.0 / std::max(dir.lpNorm<Eigen::Infinity>(), 1e-300));
      for (int ls = 0; ls < 60; ++ls) {
        const Eigen::VectorXd trial = clamp(y + alpha * dir, lower, upper);
        const Eigen::VectorXd step = trial - y;
        if (step.lpNorm<Eigen::Infinity>() == 0.0) break;
        const double value = objective(trial, grad_new);
        const double decrease = g.dot(step);
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(result.value);
        if (std::isfinite(value) && value <= result.value + options.armijo * decrease + slack &&
            decrease < 0.0) {
          const Eigen::VectorXd diff = grad_new - g;
          const double curvature = step.dot(diff);
          if (curvature > 1e-12 * step.norm() * diff.norm()) {
            s_hist.push_back(step);
            y_hist.push_back(diff);
            if (static_cast<int>(s_hist.size()) > options.memory) {
              s_hist.pop_front();
              y_hist.pop_front();
            }
          }
          y = trial;
          g = grad_new;
          result.value = value;
          accepted = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!accepted) {
        if (fresh) break;
        s_hist.clear();
        y_hist.clear();
      }
    }
    if (!accepted) break;
  }
  result.projected_gradient = projected_gradient_norm(result.y, result.gradient, lower, upper);
  result.converged = result.projected_gradient <= options.tolerance;
  return result;
}

}  // namespace rempc
