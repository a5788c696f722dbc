#pragma once

#include <Eigen/Dense>

namespace sgmfs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Elementwise positive part (|x|+x)/2.
inline Matrix positive_part(const Matrix& a) {
  return a.cwiseMax(0.0);
}

/// Elementwise negative part (|x|-x)/2; nonnegative.
inline Matrix negative_part(const Matrix& a) {
  return (-a).cwiseMax(0.0);
}

/// Force exact symmetry: (a + a^T)/2.
inline Matrix symmetrized(const Matrix& a) {
  return 0.5 * (a + a.transpose());
}

inline bool all_finite(const Matrix& a) {
  return a.allFinite();
}

}  // namespace sgmfs
