#include "sgmfs/subspace.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sgmfs/kernels.hpp"

namespace sgmfs {

Matrix build_c_matrix(const Matrix& x, const Matrix& w, const SparseGraph& m,
                      double beta, double alpha) {
  const Index n = x.cols();
  if (m.weights.rows() != n) {
    throw std::invalid_argument("build_c_matrix: graph size mismatch");
  }
  if (w.rows() != x.rows()) {
    throw std::invalid_argument("build_c_matrix: weight shape mismatch");
  }
  const Matrix projected = x.transpose() * w;  // n x c
  Matrix c = alpha * kernels::gram(projected);
  c.noalias() -= beta * graph_deviation_penalty(m);
  return symmetrized(c);
}

Matrix update_q(const Matrix& c_matrix, Index lsd) {
  const Index n = c_matrix.rows();
  if (c_matrix.cols() != n) {
    throw std::invalid_argument("update_q: matrix must be square");
  }
  if (lsd < 1 || lsd > n) {
    throw std::invalid_argument("update_q: lsd must lie in [1, n]");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver(c_matrix);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("update_q: eigen-decomposition failed");
  }
  const Vector& values = solver.eigenvalues();  // ascending
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&values](Index a, Index b) {
    return values(a) > values(b);
  });

  Matrix q(n, lsd);
  for (Index k = 0; k < lsd; ++k) {
    Vector column = solver.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    for (Index i = 0; i < n; ++i) {
      if (std::abs(column(i)) > 1e-10) {
        if (column(i) < 0.0) column = -column;
        break;
      }
    }
    q.col(k) = column;
  }
  return q;
}

Matrix compute_p(const Matrix& q, const Matrix& x, const Matrix& w) {
  if (q.rows() != x.cols() || x.rows() != w.rows()) {
    throw std::invalid_argument("compute_p: inconsistent shapes");
  }
  const Matrix xq = x * q;  // d x lsd
  return xq.transpose() * w;
}

}  // namespace sgmfs
