#include "sgmfs/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgmfs/parallel.hpp"

namespace sgmfs::kernels {

namespace {

// Work is partitioned into blocks of this many output rows. The block grid is
// independent of the thread count, so every output entry is accumulated in
// the same order no matter how many threads run.
constexpr Index kRowBlock = 64;

Index block_count(Index rows) { return (rows + kRowBlock - 1) / kRowBlock; }

// Copy the strict upper triangle onto the lower one so both halves carry the
// same bits.
void mirror_upper(Matrix& a) {
  const Index n = a.rows();
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      a(j, i) = a(i, j);
    }
  }
}

}  // namespace

Matrix pairwise_sq_dists(const Matrix& x) {
  const Index n = x.cols();
  Matrix out(n, n);
  Vector sq(n);
  for (Index j = 0; j < n; ++j) sq(j) = x.col(j).squaredNorm();

  const Index blocks = block_count(n);
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index row0 = blk * kRowBlock;
    const Index rows = std::min(kRowBlock, n - row0);
    Matrix inner = x.middleCols(row0, rows).transpose() * x;  // rows x n
    for (Index r = 0; r < rows; ++r) {
      const Index i = row0 + r;
      for (Index j = 0; j < n; ++j) {
        out(i, j) = std::max(0.0, sq(i) + sq(j) - 2.0 * inner(r, j));
      }
      out(i, i) = 0.0;
    }
  }
  mirror_upper(out);
  return out;
}

Matrix gram(const Matrix& u) {
  const Index n = u.rows();
  Matrix out(n, n);
  const Index blocks = block_count(n);
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index row0 = blk * kRowBlock;
    const Index rows = std::min(kRowBlock, n - row0);
    out.middleRows(row0, rows).noalias() =
        u.middleRows(row0, rows) * u.transpose();
  }
  mirror_upper(out);
  return out;
}

Matrix sym_pair_product(const Matrix& m, const Matrix& a) {
  const Index n = m.rows();
  if (a.rows() != n || a.cols() != n || m.cols() != n) {
    throw std::invalid_argument("sym_pair_product: matrices must be n x n");
  }
  Matrix prod(n, n);
  const Index blocks = block_count(n);
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index blk = 0; blk < blocks; ++blk) {
    const Index row0 = blk * kRowBlock;
    const Index rows = std::min(kRowBlock, n - row0);
    prod.middleRows(row0, rows).noalias() = m.middleRows(row0, rows) * a;
  }
  // m a + a m = prod + prod^T for symmetric inputs; the commutative sum keeps
  // the result bitwise symmetric.
  Matrix out(n, n);
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      out(i, j) = prod(i, j) + prod(j, i);
    }
  }
  return out;
}

void multiplicative_scale(Matrix& m, const Matrix& num, const Matrix& den,
                          double floor) {
  const Index n = m.rows();
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      const double value = m(i, j);
      if (value == 0.0) continue;
      const double top = std::max(num(i, j), 0.0);
      const double bottom = std::max(den(i, j), floor);
      m(i, j) = value * std::sqrt(top / bottom);
    }
  }
}

namespace {

std::vector<int> nearest_for(const Matrix& train, const Matrix& query,
                             Index qi, int k, bool exclude_diagonal) {
  const Index n = train.cols();
  std::vector<std::pair<double, int>> dist;
  dist.reserve(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) {
    if (exclude_diagonal && j == qi) continue;
    const double d = (train.col(j) - query.col(qi)).squaredNorm();
    dist.emplace_back(d, static_cast<int>(j));
  }
  const auto cmp = [](const std::pair<double, int>& a,
                      const std::pair<double, int>& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second < b.second;
  };
  std::partial_sort(dist.begin(), dist.begin() + k, dist.end(), cmp);
  std::vector<int> result(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) result[static_cast<std::size_t>(i)] = dist[static_cast<std::size_t>(i)].second;
  return result;
}

}  // namespace

std::vector<std::vector<int>> knn_indices(const Matrix& train,
                                          const Matrix& query, int k,
                                          bool exclude_diagonal) {
  const Index n = train.cols();
  const Index m = query.cols();
  if (train.rows() != query.rows()) {
    throw std::invalid_argument("knn_indices: feature dimension mismatch");
  }
  const Index available = exclude_diagonal ? n - 1 : n;
  if (k < 1 || k > available) {
    throw std::invalid_argument("knn_indices: k out of range");
  }
  std::vector<std::vector<int>> result(static_cast<std::size_t>(m));
  const int threads = max_threads();
#pragma omp parallel for schedule(static) num_threads(threads)
  for (Index qi = 0; qi < m; ++qi) {
    result[static_cast<std::size_t>(qi)] =
        nearest_for(train, query, qi, k, exclude_diagonal);
  }
  return result;
}

}  // namespace sgmfs::kernels
