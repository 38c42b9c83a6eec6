#pragma once

#include "rempc/costs.hpp"

namespace rempc {

/// Robust optimal steady state: the cheapest (z, v) in the tightened set with
/// z = f_pi(z, v, 0).
struct RossResult {
  Vector z_s;
  Vector v_s;
  double cost = 0.0;
  /// ||z_s - f_pi(z_s, v_s, 0)||.
  double residual = 0.0;
  /// Distance of (z_s, v_s) to the faces of the tightened set.
  double interior_margin = 0.0;
  /// True when the margin is at or below 1e-6 (ROSS on the boundary).
  bool boundary_warning = false;
  /// Number of grid minimizers tied with the returned one before refinement.
  int tied_minimizers = 1;
};

struct RossOptions {
  int input_grid_points = 501;
  /// Sub-grid per state dimension scanned for fixed-point brackets (scalar states).
  int state_scan_points = 201;
  double step_tolerance = 1e-10;
  double residual_tolerance = 1e-8;
};

RossResult compute_ross(const SystemModel& model, const BoxSet& tightened, const StageCost& cost,
                        const TubeSpec& tube, const RossOptions& options = {});

double interior_margin(const RossResult& ross, const BoxSet& tightened);

}  // namespace rempc
