#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sgmfs/dataset.hpp"
#include "sgmfs/graph.hpp"
#include "sgmfs/matrix.hpp"

namespace sgmfs {

struct SgmfsConfig {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  int lsd = 0;  // 0 resolves to ceil(c / 2)
  int max_iters = 100;
  double tol = 1e-5;        // relative objective change
  double epsilon_d = 1e-12;
  std::uint64_t seed = 1;
  double sigma = kAutoSigma;

  // Reproduce the printed update forms instead of the defaults: legacy_c
  // drops the alpha weight from the first term of the Q eigenproblem;
  // literal_order runs a single regression pass per iteration with W using
  // the previous iteration's Q and b using the previous W, and skips the
  // soft-label descent polish.
  bool legacy_c = false;
  bool literal_order = false;

  // Per-block surrogate descent tracking (FitDiagnostics); costs an extra
  // O(n^2 c) per block update, so sweeps may switch it off.
  bool check_blocks = true;

  bool operator==(const SgmfsConfig&) const = default;
};

struct SolverState {
  Matrix w;       // d x c
  Vector b;       // c
  Matrix f;       // n x c, entries in [0, 1], labeled rows pinned
  SparseGraph m;  // n x n
  Matrix q;       // n x lsd, orthonormal columns
  int iteration = 0;
  std::vector<double> objective_trace;
};

/// Feature scores ||W_i||_2 and the induced order (descending score, ties by
/// ascending feature index). Indices are 0-based.
struct FeatureRanking {
  Vector scores;
  std::vector<int> order;
};

/// Worst-case violations observed while fitting; all of these stay at zero
/// (or below the stated slack) for a healthy run.
struct FitDiagnostics {
  bool converged = false;
  double final_relative_change = 0.0;
  double max_trace_increase = 0.0;  // relative, over consecutive objectives
  double max_block_surrogate_increase = 0.0;  // relative, per block update
  double max_f_bound_violation = 0.0;
  double max_labeled_row_mismatch = 0.0;
  double max_graph_asymmetry = 0.0;
  double max_graph_diagonal = 0.0;
  double min_graph_entry = 0.0;
  double max_q_orthonormality_error = 0.0;
};

struct FitResult {
  SolverState state;
  FeatureRanking ranking;
  FitDiagnostics diagnostics;
};

enum class WSolvePath { kAuto, kDirect, kWoodbury };

/// Reweighting vector d_i = 1 / (2 sqrt(||W_i||_2^2 + epsilon_d)).
Vector compute_d(const Matrix& w, double epsilon_d);

/// Solve (X H X^T + gamma D + alpha X X^T - alpha X Q Q^T X^T) W = X H F.
/// kAuto picks the direct d x d factorization when n >= d and the inverted
/// n x n route otherwise; both agree to 1e-6 relative.
Matrix update_w(const Matrix& x, const Matrix& x_centered, const Matrix& f,
                const Matrix& q, const Vector& d_vec, double alpha,
                double gamma, WSolvePath path = WSolvePath::kAuto);

/// b = (F^T 1 - W^T X 1) / n.
Vector update_b(const Matrix& f, const Matrix& x, const Matrix& w);

/// Unclamped soft labels K^{-1} (X^T W + 1 b^T) with
/// K = I + beta * penalty, solved by Cholesky factorization.
Matrix solve_soft_labels(const Matrix& penalty, const Matrix& x,
                         const Matrix& w, const Vector& b, double beta);

/// Soft-label update: solve, clamp unlabeled entries into [0, 1], and pin
/// labeled rows to y_l (rows ordered like split.labeled_indices).
Matrix update_f(const Matrix& x, const Matrix& w, const Vector& b,
                const SparseGraph& m, double beta, const Matrix& y_l,
                const SemiSplit& split);

/// Full objective
///   ||X^T W + 1 b^T - F||^2 + alpha ||X^T W - Q P||^2
///   + beta (||MF - F||^2 + ||MQ - Q||^2) + gamma (||W||_{2,1} + ||M||_1)
/// with P = Q^T X^T W substituted and the l2,1 norm unsmoothed.
double objective(const SolverState& state, const Matrix& x,
                 const SgmfsConfig& config);

/// Scores ||W_i||_2 with the deterministic tie order.
FeatureRanking rank_features(const Matrix& w);

/// Alternating-minimization loop: seeded Gaussian W, kernel graph M,
/// F = [Y_l; 0]; per iteration D, C, Q, W, b, F, graph splits, M; stops when
/// the relative objective change drops below tol or at max_iters.
FitResult fit(const Dataset& dataset, const SemiSplit& split,
              const SgmfsConfig& config);

/// Top ceil(proportion * d) features in ranking order.
std::vector<int> select_features(const FeatureRanking& ranking,
                                 double proportion);

/// Resolved copy of config (lsd defaulted from c); throws
/// std::invalid_argument on out-of-range values.
SgmfsConfig resolve_config(const SgmfsConfig& config, Index label_count,
                           Index sample_count);

}  // namespace sgmfs
