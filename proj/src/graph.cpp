#include "sgmfs/graph.hpp"

#include <cmath>
#include <stdexcept>

#include "sgmfs/kernels.hpp"

namespace sgmfs {

namespace {

constexpr double kDenominatorFloor = 1e-12;

void check_graph_shapes(const SparseGraph& m, const Matrix& f,
                        const Matrix& q) {
  const Index n = m.weights.rows();
  if (m.weights.cols() != n || f.rows() != n || q.rows() != n) {
    throw std::invalid_argument("graph: inconsistent shapes");
  }
}

}  // namespace

SparseGraph init_graph(const Matrix& features, double sigma) {
  const Index n = features.cols();
  if (n < 2) throw std::invalid_argument("init_graph: need at least 2 samples");

  Matrix sq = kernels::pairwise_sq_dists(features);
  if (sigma <= 0.0) {
    double total = 0.0;
    for (Index i = 0; i < n; ++i) {
      for (Index j = i + 1; j < n; ++j) total += std::sqrt(sq(i, j));
    }
    sigma = total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
  }
  if (!(sigma > 0.0)) {
    throw std::runtime_error("degenerate kernel bandwidth");
  }

  const double inv_sigma_sq = 1.0 / (sigma * sigma);
  Matrix weights = (-sq * inv_sigma_sq).array().exp();
  weights.diagonal().setZero();
  weights = symmetrized(weights);
  weights.diagonal().setZero();
  return SparseGraph{std::move(weights)};
}

SplitPair build_splits(const Matrix& f, const Matrix& q, double gamma,
                       double beta) {
  if (!(beta > 0.0)) {
    throw std::runtime_error("beta must be positive for graph update");
  }
  if (f.rows() != q.rows()) {
    throw std::invalid_argument("build_splits: row count mismatch");
  }
  const Index n = f.rows();
  const Matrix ff = kernels::gram(f);
  const Matrix qq = kernels::gram(q);
  SplitPair splits;
  splits.a_plus = ff + positive_part(qq);
  splits.a_minus = negative_part(qq);
  splits.b_plus = splits.a_plus;
  splits.b_minus = splits.a_minus;
  splits.b_minus.array() += gamma / (2.0 * beta);
  (void)n;
  return splits;
}

SparseGraph update_graph(const SparseGraph& m, const SplitPair& splits) {
  return update_graph(m, splits, nullptr);
}

SparseGraph update_graph(const SparseGraph& m, const SplitPair& splits,
                         double* input_quadratic) {
  const Matrix pair_minus = kernels::sym_pair_product(m.weights, splits.a_minus);
  const Matrix pair_plus = kernels::sym_pair_product(m.weights, splits.a_plus);
  if (input_quadratic != nullptr) {
    // Tr(M A M^T) = sum((MA + AM) o M) / 2, Tr(B M^T) = sum(B o M).
    const double quad =
        0.5 * (pair_plus - pair_minus).cwiseProduct(m.weights).sum();
    const double linear =
        (splits.b_plus - splits.b_minus).cwiseProduct(m.weights).sum();
    *input_quadratic = quad - 2.0 * linear;
  }
  const Matrix numerator = pair_minus + 2.0 * splits.b_plus;
  const Matrix denominator = pair_plus + 2.0 * splits.b_minus;
  Matrix updated = m.weights;
  kernels::multiplicative_scale(updated, numerator, denominator,
                                kDenominatorFloor);
  updated = symmetrized(updated);
  updated.diagonal().setZero();
  return SparseGraph{std::move(updated)};
}

double graph_objective(const SparseGraph& m, const Matrix& f, const Matrix& q,
                       double gamma, double beta) {
  check_graph_shapes(m, f, q);
  const double reconstruction = (m.weights * f - f).squaredNorm() +
                                (m.weights * q - q).squaredNorm();
  return beta * reconstruction + gamma * m.weights.cwiseAbs().sum();
}

double graph_quadratic_objective(const SparseGraph& m, const Matrix& f,
                                 const Matrix& q, double gamma, double beta) {
  check_graph_shapes(m, f, q);
  const Matrix a = kernels::gram(f) + kernels::gram(q);
  // Tr(M A M^T) - 2 Tr(B M^T) with B = A - (gamma / 2 beta) E.
  const Matrix ma = m.weights * a;
  const double quad = ma.cwiseProduct(m.weights).sum();
  const double lin = a.cwiseProduct(m.weights).sum() -
                     (gamma / (2.0 * beta)) * m.weights.sum();
  return quad - 2.0 * lin;
}

Matrix graph_quadratic_gradient(const SparseGraph& m, const Matrix& f,
                                const Matrix& q, double gamma, double beta) {
  check_graph_shapes(m, f, q);
  const Matrix a = kernels::gram(f) + kernels::gram(q);
  Matrix b = a;
  b.array() -= gamma / (2.0 * beta);
  return kernels::sym_pair_product(m.weights, a) - 2.0 * b;
}

Matrix graph_deviation_penalty(const SparseGraph& m) {
  // (M - I)^T (M - I) = M^2 - 2M + I for symmetric M.
  Matrix penalty = kernels::gram(m.weights);
  penalty -= 2.0 * m.weights;
  penalty.diagonal().array() += 1.0;
  return penalty;
}

}  // namespace sgmfs
