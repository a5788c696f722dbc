#pragma once

#include "sgmfs/matrix.hpp"

namespace sgmfs {

/// ML-kNN classifier state. posterior_pos(b, j) = P(E_j | H1^b) where E_j is
/// the event that j of the k nearest neighbors carry label b; posterior_neg
/// is the H0 counterpart. Training data is retained for neighbor queries.
struct MlknnModel {
  int k = 10;
  double smoothing = 1.0;
  Matrix train_features;  // d x n
  Matrix train_labels;    // n x c
  Vector priors;          // c, P(H1^b) = (s + count_b) / (2s + n)
  Matrix posterior_pos;   // c x (k+1)
  Matrix posterior_neg;   // c x (k+1)
};

struct MlknnPrediction {
  Matrix scores;       // m x c, posterior P(H1 | E) in [0, 1]
  Matrix predictions;  // m x c binary; 1 iff P(H1|E) > P(H0|E)
};

/// Neighbors are Euclidean with ties by ascending sample index; a sample is
/// never its own neighbor. Requires k < n and binary train_y.
MlknnModel mlknn_fit(const Matrix& train_x, const Matrix& train_y, int k,
                     double smoothing);

MlknnPrediction mlknn_predict(const MlknnModel& model, const Matrix& test_x);

}  // namespace sgmfs
