#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>

#include "sgmfs/graph.hpp"
#include "sgmfs/subspace.hpp"
#include "test_support.hpp"

using namespace sgmfs;
using test_support::random_graph_weights;
using test_support::random_matrix;
using test_support::random_orthonormal;
using test_support::random_symmetric;

namespace {

// Naive triple-loop evaluation of alpha X^T W W^T X - beta (M - I)^T (M - I).
Matrix c_matrix_oracle(const Matrix& x, const Matrix& w, const Matrix& m,
                       double beta, double alpha) {
  const Index n = x.cols();
  const Index d = x.rows();
  const Index c = w.cols();
  Matrix xtw = Matrix::Zero(n, c);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < c; ++j) {
      for (Index r = 0; r < d; ++r) xtw(i, j) += x(r, i) * w(r, j);
    }
  }
  Matrix first = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index r = 0; r < c; ++r) first(i, j) += xtw(i, r) * xtw(j, r);
    }
  }
  Matrix dev = -m;
  dev.diagonal().array() += 1.0;  // I - M
  Matrix second = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      for (Index r = 0; r < n; ++r) second(i, j) += dev(r, i) * dev(r, j);
    }
  }
  return alpha * first - beta * second;
}

double q_block_objective(const Matrix& x, const Matrix& w, const Matrix& m,
                         const Matrix& q, double alpha, double beta) {
  const Matrix projected = x.transpose() * w;
  const double first =
      alpha * (projected - q * (q.transpose() * projected)).squaredNorm();
  const double second = beta * (m * q - q).squaredNorm();
  return first + second;
}

}  // namespace

TEST_CASE("build_c_matrix") {
  SUBCASE("zero W and zero graph give -beta I") {
    const Matrix x = Matrix::Ones(3, 4);
    const Matrix w = Matrix::Zero(3, 2);
    const SparseGraph m{Matrix::Zero(4, 4)};
    const Matrix c = build_c_matrix(x, w, m, 1.0);
    CHECK((c + Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    CHECK(es.eigenvalues().minCoeff() == doctest::Approx(-1.0));
    CHECK(es.eigenvalues().maxCoeff() == doctest::Approx(-1.0));
  }
  SUBCASE("random instance matches the naive oracle") {
    Rng rng(53);
    const Matrix x = random_matrix(6, 9, rng);
    const Matrix w = random_matrix(6, 4, rng);
    const SparseGraph m{random_graph_weights(9, rng)};
    for (double alpha : {1.0, 2.5}) {
      const Matrix c = build_c_matrix(x, w, m, 0.8, alpha);
      const Matrix oracle = c_matrix_oracle(x, w, m.weights, 0.8, alpha);
      CHECK((c - oracle).cwiseAbs().maxCoeff() < 1e-10);
      CHECK((c - c.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
  }
}

TEST_CASE("update_q recovers the dominant eigenvectors") {
  SUBCASE("diagonal case") {
    Matrix c = Matrix::Zero(3, 3);
    c.diagonal() << 3.0, 1.0, 2.0;
    const Matrix q = update_q(c, 2);
    // eigenvalue order 3, 2 -> columns e1, e3 (sign-fixed positive)
    CHECK(q(0, 0) == doctest::Approx(1.0));
    CHECK(q(1, 0) == doctest::Approx(0.0));
    CHECK(q(2, 1) == doctest::Approx(1.0));
    const double trace = (q.transpose() * c * q).trace();
    CHECK(trace == doctest::Approx(5.0).epsilon(1e-12));
  }
  SUBCASE("lsd = n spans everything") {
    Rng rng(59);
    const Matrix c = random_symmetric(6, rng);
    const Matrix q = update_q(c, 6);
    CHECK((q.transpose() * c * q).trace() == doctest::Approx(c.trace()).epsilon(1e-10));
  }
  SUBCASE("trace equals the top eigenvalue sum and no random draw beats it") {
    Rng rng(61);
    const Index n = 12;
    const Index lsd = 4;
    const Matrix c = random_symmetric(n, rng);
    const Matrix q = update_q(c, lsd);

    Eigen::SelfAdjointEigenSolver<Matrix> es(c);
    Vector values = es.eigenvalues();  // ascending
    double top_sum = 0.0;
    for (Index i = 0; i < lsd; ++i) top_sum += values(n - 1 - i);

    const double achieved = (q.transpose() * c * q).trace();
    CHECK(achieved == doctest::Approx(top_sum).epsilon(1e-8));

    for (int draw = 0; draw < 1000; ++draw) {
      const Matrix other = random_orthonormal(n, lsd, rng);
      CHECK((other.transpose() * c * other).trace() <= achieved + 1e-8);
    }
  }
  SUBCASE("orthonormality") {
    Rng rng(67);
    for (int trial = 0; trial < 10; ++trial) {
      const Matrix c = random_symmetric(9, rng);
      const Matrix q = update_q(c, 3);
      const Matrix gram = q.transpose() * q;
      CHECK((gram - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-8);
    }
  }
  SUBCASE("deterministic output, also under eigenvalue ties") {
    Matrix c = Matrix::Identity(5, 5);
    c(3, 3) = 2.0;
    const Matrix a = update_q(c, 3);
    const Matrix b = update_q(c, 3);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a(3, 0) == doctest::Approx(1.0));  // dominant eigenvector first
  }
  SUBCASE("lsd out of range") {
    const Matrix c = Matrix::Identity(4, 4);
    CHECK_THROWS_AS(update_q(c, 5), std::invalid_argument);
    CHECK_THROWS_AS(update_q(c, 0), std::invalid_argument);
  }
}

TEST_CASE("update_q decreases the Q block of the objective") {
  Rng rng(71);
  const Index n = 10;
  const Matrix x = random_matrix(5, n, rng);
  const Matrix w = random_matrix(5, 3, rng);
  const SparseGraph m{random_graph_weights(n, rng)};
  const double alpha = 3.0;  // exercises the alpha-weighted first term
  const double beta = 0.7;

  const Matrix c = build_c_matrix(x, w, m, beta, alpha);
  const Matrix q_opt = update_q(c, 2);
  const double optimal = q_block_objective(x, w, m.weights, q_opt, alpha, beta);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix q_other = random_orthonormal(n, 2, rng);
    const double other = q_block_objective(x, w, m.weights, q_other, alpha, beta);
    CHECK(optimal <= other + 1e-9);
  }
}

TEST_CASE("compute_p closed form") {
  Rng rng(73);
  SUBCASE("zero W gives zero P") {
    const Matrix q = random_orthonormal(6, 2, rng);
    const Matrix x = random_matrix(4, 6, rng);
    const Matrix p = compute_p(q, x, Matrix::Zero(4, 3));
    CHECK(p.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("identity Q reproduces X^T W") {
    const Matrix x = random_matrix(4, 5, rng);
    const Matrix w = random_matrix(4, 3, rng);
    const Matrix p = compute_p(Matrix::Identity(5, 5), x, w);
    CHECK((p - x.transpose() * w).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("no perturbation improves the fit") {
    const Matrix x = random_matrix(7, 9, rng);
    const Matrix w = random_matrix(7, 4, rng);
    const Matrix q = random_orthonormal(9, 3, rng);
    const Matrix p = compute_p(q, x, w);
    const double base = (x.transpose() * w - q * p).squaredNorm();
    for (int trial = 0; trial < 50; ++trial) {
      const Matrix direction = random_matrix(3, 4, rng);
      const double perturbed =
          (x.transpose() * w - q * (p + 1e-3 * direction)).squaredNorm();
      CHECK(perturbed >= base - 1e-12);
    }
  }
  SUBCASE("normal equation holds") {
    const Matrix x = random_matrix(6, 8, rng);
    const Matrix w = random_matrix(6, 2, rng);
    const Matrix q = random_orthonormal(8, 3, rng);
    const Matrix p = compute_p(q, x, w);
    const Matrix residual =
        q.transpose() * (x.transpose() * w) - (q.transpose() * q) * p;
    CHECK(residual.cwiseAbs().maxCoeff() <= 1e-9);
  }
}
