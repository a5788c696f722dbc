#include "sgmfs/mlknn.hpp"

#include <stdexcept>
#include <vector>

#include "sgmfs/kernels.hpp"

namespace sgmfs {

MlknnModel mlknn_fit(const Matrix& train_x, const Matrix& train_y, int k,
                     double smoothing) {
  const Index n = train_x.cols();
  const Index c = train_y.cols();
  if (train_y.rows() != n) {
    throw std::invalid_argument("mlknn_fit: label row count must equal sample count");
  }
  if (k < 1 || k >= n) {
    throw std::invalid_argument("mlknn_fit: k must satisfy 1 <= k < n_train");
  }
  if (!(smoothing > 0.0)) {
    throw std::invalid_argument("mlknn_fit: smoothing must be positive");
  }
  for (Index i = 0; i < n; ++i) {
    for (Index b = 0; b < c; ++b) {
      const double v = train_y(i, b);
      if (v != 0.0 && v != 1.0) {
        throw std::invalid_argument("mlknn_fit: labels must be binary");
      }
    }
  }

  MlknnModel model;
  model.k = k;
  model.smoothing = smoothing;
  model.train_features = train_x;
  model.train_labels = train_y;

  model.priors.resize(c);
  for (Index b = 0; b < c; ++b) {
    model.priors(b) = (smoothing + train_y.col(b).sum()) /
                      (2.0 * smoothing + static_cast<double>(n));
  }

  const auto neighbors = kernels::knn_indices(train_x, train_x, k, true);

  // count_pos(b, j): training samples carrying label b whose k neighbors
  // include exactly j positives; count_neg the complement.
  Matrix count_pos = Matrix::Zero(c, k + 1);
  Matrix count_neg = Matrix::Zero(c, k + 1);
  for (Index i = 0; i < n; ++i) {
    for (Index b = 0; b < c; ++b) {
      int hits = 0;
      for (int j : neighbors[static_cast<std::size_t>(i)]) {
        if (train_y(j, b) > 0.0) ++hits;
      }
      if (train_y(i, b) > 0.0) {
        count_pos(b, hits) += 1.0;
      } else {
        count_neg(b, hits) += 1.0;
      }
    }
  }

  model.posterior_pos.resize(c, k + 1);
  model.posterior_neg.resize(c, k + 1);
  for (Index b = 0; b < c; ++b) {
    const double pos_total = count_pos.row(b).sum();
    const double neg_total = count_neg.row(b).sum();
    for (int j = 0; j <= k; ++j) {
      model.posterior_pos(b, j) =
          (smoothing + count_pos(b, j)) / (smoothing * (k + 1) + pos_total);
      model.posterior_neg(b, j) =
          (smoothing + count_neg(b, j)) / (smoothing * (k + 1) + neg_total);
    }
  }
  return model;
}

MlknnPrediction mlknn_predict(const MlknnModel& model, const Matrix& test_x) {
  if (test_x.rows() != model.train_features.rows()) {
    throw std::invalid_argument("mlknn_predict: feature dimension mismatch");
  }
  const Index m = test_x.cols();
  const Index c = model.train_labels.cols();
  const auto neighbors =
      kernels::knn_indices(model.train_features, test_x, model.k, false);

  MlknnPrediction out;
  out.scores.resize(m, c);
  out.predictions.resize(m, c);
  for (Index i = 0; i < m; ++i) {
    for (Index b = 0; b < c; ++b) {
      int hits = 0;
      for (int j : neighbors[static_cast<std::size_t>(i)]) {
        if (model.train_labels(j, b) > 0.0) ++hits;
      }
      const double pos = model.priors(b) * model.posterior_pos(b, hits);
      const double neg = (1.0 - model.priors(b)) * model.posterior_neg(b, hits);
      out.scores(i, b) = pos / (pos + neg);
      out.predictions(i, b) = pos > neg ? 1.0 : 0.0;
    }
  }
  return out;
}

}  // namespace sgmfs
