#pragma once

#include "sgmfs/matrix.hpp"

namespace sgmfs {

/// Sample-reconstruction weight matrix: symmetric, nonnegative, zero diagonal.
struct SparseGraph {
  Matrix weights;  // n x n
};

/// Nonnegative split of the graph-update quadratic form:
///   a_plus - a_minus = F F^T + Q Q^T
///   b_plus - b_minus = F F^T + Q Q^T - (gamma / 2 beta) E,  E = ones.
struct SplitPair {
  Matrix a_plus;
  Matrix a_minus;
  Matrix b_plus;
  Matrix b_minus;
};

/// sigma <= 0 selects the mean pairwise Euclidean distance as bandwidth.
inline constexpr double kAutoSigma = 0.0;

/// Full Gaussian kernel graph over sample columns: every off-diagonal weight
/// is exp(-||x_i - x_j||^2 / sigma^2) and strictly positive, diagonal zero.
SparseGraph init_graph(const Matrix& features, double sigma = kAutoSigma);

/// Assemble the elementwise-nonnegative split matrices from soft labels f
/// (n x c, entries >= 0) and shared labels q (n x lsd).
SplitPair build_splits(const Matrix& f, const Matrix& q, double gamma,
                       double beta);

/// One multiplicative fixed-point step; preserves symmetry, nonnegativity,
/// the zero diagonal, and the zero pattern of m.
SparseGraph update_graph(const SparseGraph& m, const SplitPair& splits);

/// Same step, also reporting Tr(M A M^T - 2 B M^T) of the INPUT matrix
/// (computed from the products the step needs anyway).
SparseGraph update_graph(const SparseGraph& m, const SplitPair& splits,
                         double* input_quadratic);

/// beta * (||MF - F||_F^2 + ||MQ - Q||_F^2) + gamma * sum |M_ij|.
double graph_objective(const SparseGraph& m, const Matrix& f, const Matrix& q,
                       double gamma, double beta);

/// Tr(M A M^T - 2 B M^T) with A = FF^T + QQ^T, B = A - (gamma/2beta) E.
/// Same minimizers as graph_objective for fixed f, q; used by the
/// monotonicity and KKT checks.
double graph_quadratic_objective(const SparseGraph& m, const Matrix& f,
                                 const Matrix& q, double gamma, double beta);

/// Gradient of graph_quadratic_objective: (MA + AM) - 2B.
Matrix graph_quadratic_gradient(const SparseGraph& m, const Matrix& f,
                                const Matrix& q, double gamma, double beta);

/// (M - I)^T (M - I), exactly symmetric.
Matrix graph_deviation_penalty(const SparseGraph& m);

}  // namespace sgmfs
