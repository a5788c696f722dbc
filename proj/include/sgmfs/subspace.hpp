#pragma once

#include "sgmfs/graph.hpp"
#include "sgmfs/matrix.hpp"

namespace sgmfs {

/// C = alpha * X^T W W^T X - beta * (M - I)^T (M - I), exactly symmetrized.
/// alpha defaults to 1 (the form without the regression-term weight).
Matrix build_c_matrix(const Matrix& x, const Matrix& w, const SparseGraph& m,
                      double beta, double alpha = 1.0);

/// Orthonormal eigenvectors of the symmetric matrix c for its lsd largest
/// eigenvalues, eigenvalue-descending, ties by ascending solver index. Each
/// column is sign-fixed: its first entry of magnitude > 1e-10 is positive.
Matrix update_q(const Matrix& c_matrix, Index lsd);

/// Closed-form projection P = Q^T X^T W; minimizes ||X^T W - Q P||_F^2 over P
/// for orthonormal Q.
Matrix compute_p(const Matrix& q, const Matrix& x, const Matrix& w);

}  // namespace sgmfs
