#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "sgmfs/kernels.hpp"

// Plain single-threaded loops, kept independent of the parallel kernels as
// oracles for the kernel tests and as the baseline for the benchmark tool.

namespace sgmfs::kernels::reference {

Matrix pairwise_sq_dists(const Matrix& x) {
  const Index d = x.rows();
  const Index n = x.cols();
  Matrix out = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      double acc = 0.0;
      for (Index r = 0; r < d; ++r) {
        const double diff = x(r, i) - x(r, j);
        acc += diff * diff;
      }
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

Matrix gram(const Matrix& u) {
  const Index n = u.rows();
  const Index k = u.cols();
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i; j < n; ++j) {
      double acc = 0.0;
      for (Index r = 0; r < k; ++r) acc += u(i, r) * u(j, r);
      out(i, j) = acc;
      out(j, i) = acc;
    }
  }
  return out;
}

Matrix sym_pair_product(const Matrix& m, const Matrix& a) {
  const Index n = m.rows();
  Matrix prod = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Index r = 0; r < n; ++r) acc += m(i, r) * a(r, j);
      prod(i, j) = acc;
    }
  }
  Matrix out(n, n);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) out(i, j) = prod(i, j) + prod(j, i);
  }
  return out;
}

void multiplicative_scale(Matrix& m, const Matrix& num, const Matrix& den,
                          double floor) {
  const Index n = m.rows();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (m(i, j) == 0.0) continue;
      const double top = std::max(num(i, j), 0.0);
      const double bottom = std::max(den(i, j), floor);
      m(i, j) *= std::sqrt(top / bottom);
    }
  }
}

std::vector<std::vector<int>> knn_indices(const Matrix& train,
                                          const Matrix& query, int k,
                                          bool exclude_diagonal) {
  const Index n = train.cols();
  const Index m = query.cols();
  const Index available = exclude_diagonal ? n - 1 : n;
  if (k < 1 || k > available) {
    throw std::invalid_argument("knn_indices: k out of range");
  }
  std::vector<std::vector<int>> result(static_cast<std::size_t>(m));
  for (Index qi = 0; qi < m; ++qi) {
    std::vector<std::pair<double, int>> dist;
    for (Index j = 0; j < n; ++j) {
      if (exclude_diagonal && j == qi) continue;
      dist.emplace_back((train.col(j) - query.col(qi)).squaredNorm(),
                        static_cast<int>(j));
    }
    std::sort(dist.begin(), dist.end());
    std::vector<int> picked;
    picked.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) picked.push_back(dist[static_cast<std::size_t>(i)].second);
    result[static_cast<std::size_t>(qi)] = std::move(picked);
  }
  return result;
}

}  // namespace sgmfs::kernels::reference
