#include "sgmfs/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace sgmfs {

namespace {

void check_shapes(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(what) + ": shape mismatch");
  }
}

}  // namespace

double hamming_loss(const Matrix& pred, const Matrix& truth) {
  check_shapes(pred, truth, "hamming_loss");
  const Index m = pred.rows();
  const Index c = pred.cols();
  Index mismatches = 0;
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < c; ++j) {
      if ((pred(i, j) > 0.5) != (truth(i, j) > 0.5)) ++mismatches;
    }
  }
  return static_cast<double>(mismatches) / static_cast<double>(m * c);
}

double ranking_loss(const Matrix& scores, const Matrix& truth) {
  check_shapes(scores, truth, "ranking_loss");
  const Index m = scores.rows();
  const Index c = scores.cols();
  double total = 0.0;
  Index evaluable = 0;
  for (Index i = 0; i < m; ++i) {
    Index positives = 0;
    for (Index j = 0; j < c; ++j) {
      if (truth(i, j) > 0.5) ++positives;
    }
    const Index negatives = c - positives;
    if (positives == 0 || negatives == 0) continue;
    Index violations = 0;
    for (Index p = 0; p < c; ++p) {
      if (truth(i, p) <= 0.5) continue;
      for (Index q = 0; q < c; ++q) {
        if (truth(i, q) > 0.5) continue;
        if (scores(i, p) <= scores(i, q)) ++violations;
      }
    }
    total += static_cast<double>(violations) /
             static_cast<double>(positives * negatives);
    ++evaluable;
  }
  if (evaluable == 0) throw std::runtime_error("ranking loss undefined");
  return total / static_cast<double>(evaluable);
}

std::pair<double, double> macro_micro_f1(const Matrix& pred,
                                         const Matrix& truth) {
  check_shapes(pred, truth, "macro_micro_f1");
  const Index m = pred.rows();
  const Index c = pred.cols();
  double macro_sum = 0.0;
  Index tp_all = 0, fp_all = 0, fn_all = 0;
  for (Index j = 0; j < c; ++j) {
    Index tp = 0, fp = 0, fn = 0;
    for (Index i = 0; i < m; ++i) {
      const bool p = pred(i, j) > 0.5;
      const bool t = truth(i, j) > 0.5;
      if (p && t) ++tp;
      if (p && !t) ++fp;
      if (!p && t) ++fn;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    macro_sum += denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
    tp_all += tp;
    fp_all += fp;
    fn_all += fn;
  }
  const double micro_denom = static_cast<double>(2 * tp_all + fp_all + fn_all);
  const double micro =
      micro_denom > 0.0 ? 2.0 * static_cast<double>(tp_all) / micro_denom : 0.0;
  return {macro_sum / static_cast<double>(c), micro};
}

double average_precision(const Matrix& scores, const Matrix& truth) {
  check_shapes(scores, truth, "average_precision");
  const Index m = scores.rows();
  const Index c = scores.cols();
  double total = 0.0;
  Index evaluable = 0;
  std::vector<Index> order(static_cast<std::size_t>(c));
  for (Index i = 0; i < m; ++i) {
    bool any_positive = false;
    for (Index j = 0; j < c; ++j) {
      if (truth(i, j) > 0.5) any_positive = true;
    }
    if (!any_positive) continue;

    // Rank labels by descending score, ties by ascending label index.
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&scores, i](Index a, Index b) {
      return scores(i, a) > scores(i, b);
    });

    double sample_sum = 0.0;
    Index sample_positives = 0;
    Index positives_seen = 0;
    for (Index rank = 0; rank < c; ++rank) {
      if (truth(i, order[static_cast<std::size_t>(rank)]) > 0.5) {
        ++positives_seen;
        sample_sum += static_cast<double>(positives_seen) /
                      static_cast<double>(rank + 1);
        ++sample_positives;
      }
    }
    total += sample_sum / static_cast<double>(sample_positives);
    ++evaluable;
  }
  if (evaluable == 0) {
    throw std::runtime_error("average precision undefined: no positive labels");
  }
  return total / static_cast<double>(evaluable);
}

MetricReport evaluate_all(const Matrix& scores, const Matrix& pred,
                          const Matrix& truth) {
  MetricReport report;
  report.hamming_loss = hamming_loss(pred, truth);
  report.ranking_loss = ranking_loss(scores, truth);
  const auto [macro, micro] = macro_micro_f1(pred, truth);
  report.macro_f1 = macro;
  report.micro_f1 = micro;
  report.average_precision = average_precision(scores, truth);
  return report;
}

}  // namespace sgmfs
