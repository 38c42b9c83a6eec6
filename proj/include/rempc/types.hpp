#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>

namespace rempc {

/// Upper bound on the dimension of any single state, input, disturbance or
/// joint (state, input) vector. Keeps the hot evaluation paths off the heap.
inline constexpr int kMaxDim = 12;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

enum class ErrorCode {
  kDimensionMismatch,
  kInvalidArgument,
  kInvalidDisturbance,
  kEmptyErosion,
  kNoSteadyState,
  kResidualUnreachable,
  kInfeasible,
  kMaxIterations,
  kMissingPrev,
  kStaleReference,
  kConfig,
  kIo,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline Vector scalar_vector(double value) {
  Vector v(1);
  v[0] = value;
  return v;
}

}  // namespace rempc
