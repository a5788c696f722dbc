#pragma once

#include <utility>

#include "sgmfs/matrix.hpp"

namespace sgmfs {

struct MetricReport {
  double hamming_loss = 0.0;
  double ranking_loss = 0.0;
  double macro_f1 = 0.0;
  double micro_f1 = 0.0;
  double average_precision = 0.0;
};

/// Fraction of label mismatches over all m*c cells.
double hamming_loss(const Matrix& pred, const Matrix& truth);

/// Mean over evaluable samples (at least one positive and one negative
/// label) of the fraction of (positive, negative) pairs with
/// score(pos) <= score(neg); ties count as violations.
double ranking_loss(const Matrix& scores, const Matrix& truth);

/// Per-label F1 with the 0/0 -> 0 convention; macro is the unweighted label
/// mean, micro pools the counts.
std::pair<double, double> macro_micro_f1(const Matrix& pred,
                                         const Matrix& truth);

/// Example-based average precision. Labels are ranked by descending score,
/// ties by ascending label index; samples without positives are excluded.
double average_precision(const Matrix& scores, const Matrix& truth);

MetricReport evaluate_all(const Matrix& scores, const Matrix& pred,
                          const Matrix& truth);

}  // namespace sgmfs
