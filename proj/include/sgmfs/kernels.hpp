#pragma once

#include <vector>

#include "sgmfs/matrix.hpp"

namespace sgmfs::kernels {

// OpenMP-parallel dense kernels. Work is split into row blocks of a fixed
// size, so the floating-point accumulation order per output entry does not
// depend on the thread count: results are bitwise identical for any number
// of threads. The serial variants under kernels::reference are independent
// naive implementations kept as test oracles and benchmark baselines.

/// Squared Euclidean distances between the columns of x (d x n) -> n x n.
Matrix pairwise_sq_dists(const Matrix& x);

/// u * u^T for u (n x k) -> symmetric n x n.
Matrix gram(const Matrix& u);

/// m*a + a*m for symmetric m, a (n x n); result exactly symmetric.
Matrix sym_pair_product(const Matrix& m, const Matrix& a);

/// Elementwise m <- m * sqrt(num / max(den, floor)).
void multiplicative_scale(Matrix& m, const Matrix& num, const Matrix& den,
                          double floor);

/// Indices of the k nearest training columns (squared Euclidean distance,
/// ties by ascending index) for every query column. When exclude_diagonal is
/// true, query j skips training column j (train and query must then refer to
/// the same matrix).
std::vector<std::vector<int>> knn_indices(const Matrix& train,
                                          const Matrix& query, int k,
                                          bool exclude_diagonal);

namespace reference {

Matrix pairwise_sq_dists(const Matrix& x);
Matrix gram(const Matrix& u);
Matrix sym_pair_product(const Matrix& m, const Matrix& a);
void multiplicative_scale(Matrix& m, const Matrix& num, const Matrix& den,
                          double floor);
std::vector<std::vector<int>> knn_indices(const Matrix& train,
                                          const Matrix& query, int k,
                                          bool exclude_diagonal);

}  // namespace reference

}  // namespace sgmfs::kernels
