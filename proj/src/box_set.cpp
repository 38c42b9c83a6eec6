#include "rempc/box_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rempc {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDimensionMismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kInvalidDisturbance: return "INVALID_DISTURBANCE";
    case ErrorCode::kEmptyErosion: return "EMPTY_EROSION";
    case ErrorCode::kNoSteadyState: return "NO_STEADY_STATE";
    case ErrorCode::kResidualUnreachable: return "RESIDUAL_UNREACHABLE";
    case ErrorCode::kInfeasible: return "INFEASIBLE";
    case ErrorCode::kMaxIterations: return "MAX_ITERATIONS";
    case ErrorCode::kMissingPrev: return "MISSING_PREV";
    case ErrorCode::kStaleReference: return "STALE_REFERENCE";
    case ErrorCode::kConfig: return "CONFIG";
    case ErrorCode::kIo: return "IO";
  }
  return "UNKNOWN";
}

BoxSet::BoxSet(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() != upper_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "box bounds differ in length");
  }
  for (int i = 0; i < dim(); ++i) {
    if (!(lower_[i] <= upper_[i])) {
      throw Error(ErrorCode::kInvalidArgument, "box lower bound exceeds upper bound");
    }
  }
}

BoxSet BoxSet::interval(double lower, double upper) {
  return BoxSet(scalar_vector(lower), scalar_vector(upper));
}

BoxSet BoxSet::singleton(const Vector& point) { return BoxSet(point, point); }

BoxSet BoxSet::product(const BoxSet& a, const BoxSet& b) {
  Vector lo(a.dim() + b.dim());
  Vector hi(a.dim() + b.dim());
  lo << a.lower_, b.lower_;
  hi << a.upper_, b.upper_;
  return BoxSet(lo, hi);
}

bool BoxSet::has_nonempty_interior() const {
  for (int i = 0; i < dim(); ++i) {
    if (!(lower_[i] < upper_[i])) return false;
  }
  return true;
}

bool BoxSet::contains(const Vector& point, double tol) const {
  if (point.size() != lower_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point/box dimension mismatch");
  }
  for (int i = 0; i < dim(); ++i) {
    if (point[i] < lower_[i] - tol || point[i] > upper_[i] + tol) return false;
  }
  return true;
}

Vector BoxSet::project(const Vector& point) const {
  if (point.size() != lower_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point/box dimension mismatch");
  }
  Vector out(dim());
  for (int i = 0; i < dim(); ++i) out[i] = std::clamp(point[i], lower_[i], upper_[i]);
  return out;
}

double BoxSet::distance(const Vector& point) const { return (point - project(point)).norm(); }

double BoxSet::interior_margin(const Vector& point) const {
  if (point.size() != lower_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "point/box dimension mismatch");
  }
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dim(); ++i) {
    margin = std::min({margin, point[i] - lower_[i], upper_[i] - point[i]});
  }
  return margin;
}

BoxSet BoxSet::slice(int first, int count) const {
  if (first < 0 || count < 0 || first + count > dim()) {
    throw Error(ErrorCode::kDimensionMismatch, "box slice out of range");
  }
  return BoxSet(lower_.segment(first, count), upper_.segment(first, count));
}

BoxSet BoxSet::translated(const Vector& offset) const {
  if (offset.size() != lower_.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "offset/box dimension mismatch");
  }
  return BoxSet(lower_ + offset, upper_ + offset);
}

BoxSet BoxSet::minkowski_sum(const BoxSet& other) const {
  if (other.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "minkowski sum");
  return BoxSet(lower_ + other.lower_, upper_ + other.upper_);
}

BoxSet BoxSet::erode(const BoxSet& other) const {
  if (other.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "erosion");
  Vector lo = lower_ - other.lower_;
  Vector hi = upper_ - other.upper_;
  for (int i = 0; i < dim(); ++i) {
    if (lo[i] > hi[i]) {
      throw Error(ErrorCode::kEmptyErosion,
                  "tube is wider than the constraint box in dimension " + std::to_string(i));
    }
  }
  return BoxSet(lo, hi);
}

BoxSet BoxSet::intersect(const BoxSet& other) const {
  if (other.dim() != dim()) throw Error(ErrorCode::kDimensionMismatch, "intersection");
  Vector lo = lower_.cwiseMax(other.lower_);
  Vector hi = upper_.cwiseMin(other.upper_);
  for (int i = 0; i < dim(); ++i) {
    if (lo[i] > hi[i]) throw Error(ErrorCode::kInfeasible, "empty box intersection");
  }
  return BoxSet(lo, hi);
}

BoxSet BoxSet::negated() const { return BoxSet(-upper_, -lower_); }

std::vector<Vector> BoxSet::vertices() const { return grid(2); }

std::vector<Vector> BoxSet::grid(int points) const {
  if (points < 1) throw Error(ErrorCode::kInvalidArgument, "grid needs at least one point");
  std::vector<std::vector<double>> axes(dim());
  for (int i = 0; i < dim(); ++i) {
    axes[i] = lower_[i] == upper_[i] ? std::vector<double>{lower_[i]}
                                     : linspace(lower_[i], upper_[i], std::max(points, 2));
  }
  std::vector<Vector> out;
  if (dim() == 0) return out;
  std::vector<std::size_t> idx(dim(), 0);
  while (true) {
    Vector p(dim());
    for (int i = 0; i < dim(); ++i) p[i] = axes[i][idx[i]];
    out.push_back(p);
    int d = 0;
    while (d < dim() && ++idx[d] == axes[d].size()) idx[d++] = 0;
    if (d == dim()) break;
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 1) throw Error(ErrorCode::kInvalidArgument, "linspace needs at least one point");
  std::vector<double> out(points);
  if (points == 1) {
    out[0] = lo;
    return out;
  }
  const double step = (hi - lo) / (points - 1);
  for (int i = 0; i < points; ++i) out[i] = lo + step * i;
  out.back() = hi;
  return out;
}

}  // namespace rempc
