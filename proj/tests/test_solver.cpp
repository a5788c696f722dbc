#include <doctest.h>

#include <cmath>

#include "sgmfs/solver.hpp"
#include "sgmfs/subspace.hpp"
#include "test_support.hpp"

using namespace sgmfs;
using test_support::random_graph_weights;
using test_support::random_matrix;
using test_support::random_orthonormal;
using test_support::random_uniform_matrix;
using test_support::synthetic_dataset;

namespace {

Matrix centered(const Matrix& x) {
  return x.colwise() - x.rowwise().mean();
}

// Explicit dense assembly of the W normal-equation operator.
Matrix w_system_matrix(const Matrix& x, const Matrix& q, const Vector& d_vec,
                       double alpha, double gamma) {
  const Index n = x.cols();
  const Matrix h =
      Matrix::Identity(n, n) - Matrix::Ones(n, n) / static_cast<double>(n);
  Matrix lhs = x * h * x.transpose();
  lhs += Matrix((gamma * d_vec).asDiagonal());
  lhs += alpha * x * x.transpose();
  lhs -= alpha * x * q * q.transpose() * x.transpose();
  return lhs;
}

}  // namespace

TEST_CASE("compute_d") {
  SUBCASE("row (3, 4) has d = 0.1") {
    Matrix w(1, 2);
    w << 3.0, 4.0;
    const Vector d = compute_d(w, 1e-15);
    CHECK(d(0) == doctest::Approx(0.1).epsilon(1e-9));
  }
  SUBCASE("zero row with epsilon 1e-12 gives 5e5") {
    const Matrix w = Matrix::Zero(1, 3);
    const Vector d = compute_d(w, 1e-12);
    CHECK(d(0) == doctest::Approx(5e5).epsilon(1e-12));
  }
  SUBCASE("smoothed value approaches the exact reciprocal norm") {
    Rng rng(79);
    const Matrix w = random_matrix(6, 4, rng);
    for (double eps : {1e-6, 1e-9, 1e-12}) {
      const Vector d = compute_d(w, eps);
      for (Index i = 0; i < w.rows(); ++i) {
        const double norm_sq = w.row(i).squaredNorm();
        const double exact = 0.5 / std::sqrt(norm_sq);
        CHECK(std::abs(d(i) - exact) / exact <= eps / (2.0 * norm_sq) + 1e-15);
      }
    }
  }
  SUBCASE("epsilon must be positive") {
    CHECK_THROWS_AS(compute_d(Matrix::Zero(2, 2), 0.0), std::invalid_argument);
  }
}

TEST_CASE("update_w solves the stationarity system") {
  Rng rng(83);
  SUBCASE("zero F gives zero W") {
    const Matrix x = random_matrix(5, 12, rng);
    const Matrix q = random_orthonormal(12, 2, rng);
    const Vector d_vec = Vector::Ones(5);
    const Matrix w = update_w(x, centered(x), Matrix::Zero(12, 3), q, d_vec,
                              1.0, 1.0);
    CHECK(w.cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("residual check on random instances") {
    for (int trial = 0; trial < 5; ++trial) {
      const Index d = 8 + 3 * trial;
      const Index n = 20 + 2 * trial;
      const Matrix x = random_matrix(d, n, rng);
      const Matrix f = random_uniform_matrix(n, 3, rng);
      const Matrix q = random_orthonormal(n, 2, rng);
      const Vector d_vec = compute_d(random_matrix(d, 3, rng), 1e-12);
      const double alpha = 0.9;
      const double gamma = 1.4;
      const Matrix w = update_w(x, centered(x), f, q, d_vec, alpha, gamma);

      const Matrix lhs = w_system_matrix(x, q, d_vec, alpha, gamma);
      const Matrix rhs = centered(x) * f;
      const double residual = (lhs * w - rhs).cwiseAbs().maxCoeff();
      CHECK(residual <= 1e-8 * std::max(rhs.cwiseAbs().maxCoeff(), 1e-12));
    }
  }
  SUBCASE("direct and inverted routes agree on d > n") {
    const Index d = 50;
    const Index n = 20;
    const Matrix x = random_matrix(d, n, rng);
    const Matrix f = random_uniform_matrix(n, 4, rng);
    const Matrix q = random_orthonormal(n, 3, rng);
    const Vector d_vec = compute_d(random_matrix(d, 4, rng), 1e-12);
    const Matrix direct = update_w(x, centered(x), f, q, d_vec, 1.0, 1.0,
                                   WSolvePath::kDirect);
    const Matrix wood = update_w(x, centered(x), f, q, d_vec, 1.0, 1.0,
                                 WSolvePath::kWoodbury);
    const double rel = (direct - wood).cwiseAbs().maxCoeff() /
                       std::max(direct.cwiseAbs().maxCoeff(), 1e-12);
    CHECK(rel <= 1e-6);
  }
  SUBCASE("non-finite systems are reported") {
    Matrix x = random_matrix(4, 6, rng);
    x(0, 0) = 1e308;
    x(1, 1) = -1e308;
    const Matrix f = random_uniform_matrix(6, 2, rng);
    const Matrix q = random_orthonormal(6, 2, rng);
    const Vector d_vec = Vector::Ones(4);
    CHECK_THROWS_WITH_AS(update_w(x, centered(x), f, q, d_vec, 1.0, 1.0),
                         doctest::Contains("ill-conditioned"),
                         std::runtime_error);
  }
}

TEST_CASE("update_b") {
  SUBCASE("zeros") {
    const Vector b = update_b(Matrix::Zero(4, 2), Matrix::Zero(3, 4),
                              Matrix::Zero(3, 2));
    CHECK(b.cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("column means for zero W") {
    Matrix f(2, 2);
    f << 1.0, 0.0, 0.0, 1.0;
    const Vector b = update_b(f, Matrix::Zero(3, 2), Matrix::Zero(3, 2));
    CHECK(b(0) == doctest::Approx(0.5));
    CHECK(b(1) == doctest::Approx(0.5));
  }
  SUBCASE("finite-difference gradient vanishes at the optimum") {
    Rng rng(89);
    const Matrix x = random_matrix(5, 9, rng);
    const Matrix w = random_matrix(5, 3, rng);
    const Matrix f = random_uniform_matrix(9, 3, rng);
    const Vector b = update_b(f, x, w);

    const auto loss = [&](const Vector& bias) {
      Matrix fitted = x.transpose() * w;
      fitted.rowwise() += bias.transpose();
      return (fitted - f).squaredNorm();
    };
    const double h = 1e-4;
    for (Index j = 0; j < 3; ++j) {
      Vector up = b, down = b;
      up(j) += h;
      down(j) -= h;
      const double grad = (loss(up) - loss(down)) / (2.0 * h);
      CHECK(std::abs(grad) <= 1e-9 * std::max(1.0, loss(b)));
    }
  }
}

TEST_CASE("soft label solve and clamp") {
  Rng rng(97);
  SUBCASE("beta 0 with zero graph reproduces the linear scores exactly") {
    const Index n = 6;
    const Matrix x = random_matrix(4, n, rng);
    const Matrix w = random_matrix(4, 2, rng);
    const Vector b = random_matrix(2, 1, rng).col(0);
    const SparseGraph m{Matrix::Zero(n, n)};
    const Matrix raw = solve_soft_labels(graph_deviation_penalty(m), x, w, b, 0.0);
    Matrix expected = x.transpose() * w;
    expected.rowwise() += b.transpose();
    CHECK((raw - expected).cwiseAbs().maxCoeff() <= 1e-12);
  }
  SUBCASE("clamp rules on unlabeled rows, pinning on labeled rows") {
    // With M = 0 and beta = 1, K = 2I so the raw solution is half the scores.
    const Index n = 4;
    const Index c = 2;
    Matrix x = Matrix::Zero(1, n);
    Matrix w = Matrix::Zero(1, c);
    Vector b(c);
    b << 3.4, -0.6;  // raw rows become (1.7, -0.3)
    SemiSplit split;
    split.labeled_indices = {0};
    split.unlabeled_indices = {1, 2, 3};
    Matrix y_l(1, c);
    y_l << 0.25, 0.75;
    const SparseGraph m{Matrix::Zero(n, n)};
    const Matrix f = update_f(x, w, b, m, 1.0, y_l, split);
    CHECK(f(1, 0) == 1.0);   // 1.7 clamps to 1
    CHECK(f(1, 1) == 0.0);   // -0.3 clamps to 0
    CHECK(f(0, 0) == 0.25);  // labeled row pinned bit-exact
    CHECK(f(0, 1) == 0.75);
    CHECK(f.minCoeff() >= 0.0);
    CHECK(f.maxCoeff() <= 1.0);
  }
  SUBCASE("in-range entries pass through the identity system untouched") {
    const Index n = 3;
    Matrix x = Matrix::Zero(1, n);
    Matrix w = Matrix::Zero(1, 1);
    Vector b(1);
    b << 0.4;
    SemiSplit split;
    split.labeled_indices = {0};
    split.unlabeled_indices = {1, 2};
    Matrix y_l = Matrix::Zero(1, 1);
    const SparseGraph m{Matrix::Zero(n, n)};
    const Matrix f = update_f(x, w, b, m, 0.0, y_l, split);
    CHECK(f(1, 0) == doctest::Approx(0.4).epsilon(1e-12));
  }
}

namespace {

// Term-by-term summation oracle for the full objective.
double objective_oracle(const SolverState& state, const Matrix& x,
                        const SgmfsConfig& config) {
  const Index n = x.cols();
  const Index c = state.f.cols();
  const Matrix xtw = x.transpose() * state.w;
  double loss = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < c; ++j) {
      const double diff = xtw(i, j) + state.b(j) - state.f(i, j);
      loss += diff * diff;
    }
  }
  const Matrix p = state.q.transpose() * xtw;
  const Matrix recon = state.q * p;
  double subspace = 0.0;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < c; ++j) {
      const double diff = xtw(i, j) - recon(i, j);
      subspace += diff * diff;
    }
  }
  double consistency = 0.0;
  {
    const Matrix mf = state.m.weights * state.f;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < c; ++j) {
        const double diff = mf(i, j) - state.f(i, j);
        consistency += diff * diff;
      }
    }
    const Matrix mq = state.m.weights * state.q;
    for (Index i = 0; i < n; ++i) {
      for (Index j = 0; j < state.q.cols(); ++j) {
        const double diff = mq(i, j) - state.q(i, j);
        consistency += diff * diff;
      }
    }
  }
  double sparsity = 0.0;
  for (Index i = 0; i < state.w.rows(); ++i) sparsity += state.w.row(i).norm();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) sparsity += std::abs(state.m.weights(i, j));
  }
  return loss + config.alpha * subspace + config.beta * consistency +
         config.gamma * sparsity;
}

}  // namespace

TEST_CASE("objective") {
  SUBCASE("all-zero state scores zero") {
    SolverState state;
    state.w = Matrix::Zero(3, 2);
    state.b = Vector::Zero(2);
    state.f = Matrix::Zero(5, 2);
    state.m = SparseGraph{Matrix::Zero(5, 5)};
    state.q = Matrix::Zero(5, 1);
    SgmfsConfig config;
    CHECK(objective(state, Matrix::Zero(3, 5), config) == 0.0);
  }
  SUBCASE("labeled ones give k(1+beta) + beta*lsd") {
    Rng rng(101);
    const Index n = 6, c = 2, lsd = 2;
    SolverState state;
    state.w = Matrix::Zero(4, c);
    state.b = Vector::Zero(c);
    state.f = Matrix::Zero(n, c);
    state.f(0, 0) = 1.0;
    state.f(2, 1) = 1.0;
    state.f(4, 0) = 1.0;  // k = 3 ones
    state.m = SparseGraph{Matrix::Zero(n, n)};
    state.q = random_orthonormal(n, lsd, rng);
    SgmfsConfig config;
    config.beta = 0.5;
    const Matrix x = random_matrix(4, n, rng);
    const double expected = 3.0 * (1.0 + config.beta) + config.beta * lsd;
    CHECK(objective(state, x, config) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("random state matches the summation oracle") {
    Rng rng(103);
    SolverState state;
    const Index d = 5, n = 8, c = 3;
    state.w = random_matrix(d, c, rng);
    state.b = random_matrix(c, 1, rng).col(0);
    state.f = random_uniform_matrix(n, c, rng);
    state.m = SparseGraph{random_graph_weights(n, rng)};
    state.q = random_orthonormal(n, 2, rng);
    SgmfsConfig config;
    config.alpha = 1.7;
    config.beta = 0.4;
    config.gamma = 2.2;
    const Matrix x = random_matrix(d, n, rng);
    const double value = objective(state, x, config);
    CHECK(value == doctest::Approx(objective_oracle(state, x, config)).epsilon(1e-10));
  }
}

TEST_CASE("rank_features and select_features") {
  SUBCASE("scores are row norms, ties resolved by index") {
    Matrix w(4, 2);
    w << 3.0, 4.0,   // norm 5
        1.0, 0.0,    // norm 1
        0.0, 5.0,    // norm 5
        0.0, 0.0;    // norm 0
    const FeatureRanking ranking = rank_features(w);
    CHECK(ranking.scores(0) == doctest::Approx(5.0));
    CHECK(ranking.order == std::vector<int>{0, 2, 1, 3});
    CHECK(select_features(ranking, 0.5) == std::vector<int>{0, 2});
  }
  SUBCASE("selection counts") {
    Rng rng(107);
    const FeatureRanking ranking = rank_features(random_matrix(10, 2, rng));
    CHECK(select_features(ranking, 0.3).size() == 3);
    CHECK(select_features(ranking, 1.0) == ranking.order);
    CHECK_THROWS_AS(select_features(ranking, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(select_features(ranking, 1.2), std::invalid_argument);
  }
}

TEST_CASE("fit produces a monotone trace and converges") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const Dataset data = synthetic_dataset(12, 40, 4, seed);
    const SemiSplit split = make_split(data, 0.25, seed);
    SgmfsConfig config;
    config.seed = seed;
    const FitResult result = fit(data, split, config);
    CHECK(result.diagnostics.converged);
    CHECK(result.diagnostics.max_trace_increase <= 1e-7);
    CHECK(result.diagnostics.max_block_surrogate_increase <= 1e-9);
    CHECK(result.state.objective_trace.size() <= 100);
    for (double value : result.state.objective_trace) {
      CHECK(std::isfinite(value));
    }
  }
}

TEST_CASE("fit maintains every constraint at every iteration") {
  const Dataset data = synthetic_dataset(10, 30, 3, 5);
  const SemiSplit split = make_split(data, 0.2, 5);
  SgmfsConfig config;
  config.seed = 5;
  const FitResult result = fit(data, split, config);
  CHECK(result.diagnostics.max_f_bound_violation == 0.0);
  CHECK(result.diagnostics.max_labeled_row_mismatch == 0.0);
  CHECK(result.diagnostics.max_graph_asymmetry == 0.0);
  CHECK(result.diagnostics.max_graph_diagonal == 0.0);
  CHECK(result.diagnostics.min_graph_entry >= 0.0);
  CHECK(result.diagnostics.max_q_orthonormality_error <= 1e-8);
}

TEST_CASE("fit is deterministic") {
  const Dataset data = synthetic_dataset(9, 25, 3, 7);
  const SemiSplit split = make_split(data, 0.3, 7);
  SgmfsConfig config;
  config.seed = 7;
  const FitResult a = fit(data, split, config);
  const FitResult b = fit(data, split, config);
  CHECK(a.ranking.order == b.ranking.order);
  CHECK((a.ranking.scores - b.ranking.scores).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.state.w - b.state.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.state.objective_trace == b.state.objective_trace);
}

TEST_CASE("literal order and legacy C variants run deterministically") {
  const Dataset data = synthetic_dataset(8, 20, 3, 11);
  const SemiSplit split = make_split(data, 0.25, 11);
  SgmfsConfig config;
  config.seed = 11;
  config.literal_order = true;
  config.legacy_c = true;
  const FitResult a = fit(data, split, config);
  const FitResult b = fit(data, split, config);
  CHECK(a.ranking.order == b.ranking.order);
  for (double value : a.state.objective_trace) CHECK(std::isfinite(value));
}

TEST_CASE("resolve_config defaults and validation") {
  SgmfsConfig config;
  const SgmfsConfig resolved = resolve_config(config, 7, 100);
  CHECK(resolved.lsd == 4);  // ceil(7 / 2)

  SgmfsConfig bad = config;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(resolve_config(bad, 7, 100), std::invalid_argument);
  bad = config;
  bad.lsd = 8;
  CHECK_THROWS_AS(resolve_config(bad, 7, 100), std::invalid_argument);
  bad = config;
  bad.max_iters = 0;
  CHECK_THROWS_AS(resolve_config(bad, 7, 100), std::invalid_argument);
}
