#pragma once

#include "rempc/types.hpp"

#include <vector>

namespace rempc {

/// Axis-aligned box {x : lower <= x <= upper}. Membership is inclusive.
class BoxSet {
 public:
  BoxSet() = default;
  BoxSet(Vector lower, Vector upper);

  /// Box of dimension one.
  static BoxSet interval(double lower, double upper);
  /// Degenerate box {point}.
  static BoxSet singleton(const Vector& point);
  /// Cartesian product a x b.
  static BoxSet product(const BoxSet& a, const BoxSet& b);

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

  bool has_nonempty_interior() const;
  bool contains(const Vector& point, double tol = 0.0) const;

  /// Euclidean projection, exact for boxes.
  Vector project(const Vector& point) const;
  /// Euclidean point-to-set distance.
  double distance(const Vector& point) const;
  /// Smallest distance to a face; negative when the point lies outside.
  double interior_margin(const Vector& point) const;

  Vector center() const { return 0.5 * (lower_ + upper_); }
  Vector width() const { return upper_ - lower_; }

  /// Sub-box of the coordinates [first, first + count).
  BoxSet slice(int first, int count) const;
  BoxSet translated(const Vector& offset) const;
  BoxSet minkowski_sum(const BoxSet& other) const;
  /// {x : x + e in *this for all e in other}. Throws kEmptyErosion when empty.
  BoxSet erode(const BoxSet& other) const;
  /// Intersection; throws kInfeasible when empty.
  BoxSet intersect(const BoxSet& other) const;
  /// -B.
  BoxSet negated() const;

  /// All 2^dim vertices (degenerate dimensions are not duplicated).
  std::vector<Vector> vertices() const;
  /// Tensor grid with `points` per dimension; endpoints (hence all vertices)
  /// are always included. Degenerate dimensions contribute a single value.
  std::vector<Vector> grid(int points) const;

 private:
  Vector lower_;
  Vector upper_;
};

/// `points` evenly spaced values in [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, int points);

}  // namespace rempc
