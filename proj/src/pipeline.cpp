#include "sgmfs/pipeline.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "sgmfs/mlknn.hpp"
#include "sgmfs/rng.hpp"

namespace sgmfs {

std::vector<double> default_proportions() {
  std::vector<double> values;
  for (int i = 1; i <= 15; ++i) values.push_back(0.02 * i);
  return values;
}

std::vector<std::string> metric_names() {
  return {"hamming_loss", "ranking_loss", "macro_f1", "micro_f1",
          "average_precision"};
}

double metric_value(const MetricReport& report, const std::string& name) {
  if (name == "hamming_loss") return report.hamming_loss;
  if (name == "ranking_loss") return report.ranking_loss;
  if (name == "macro_f1") return report.macro_f1;
  if (name == "micro_f1") return report.micro_f1;
  if (name == "average_precision") return report.average_precision;
  throw std::invalid_argument("unknown metric: " + name);
}

namespace {

Dataset take_samples(const Dataset& dataset, const std::vector<int>& indices) {
  Dataset out;
  out.feature_names = dataset.feature_names;
  out.label_names = dataset.label_names;
  out.features.resize(dataset.feature_count(), static_cast<Index>(indices.size()));
  out.labels.resize(static_cast<Index>(indices.size()), dataset.label_count());
  for (Index i = 0; i < static_cast<Index>(indices.size()); ++i) {
    out.features.col(i) = dataset.features.col(indices[static_cast<std::size_t>(i)]);
    out.labels.row(i) = dataset.labels.row(indices[static_cast<std::size_t>(i)]);
  }
  return out;
}

Matrix select_rows(const Matrix& features, const std::vector<int>& rows) {
  Matrix out(static_cast<Index>(rows.size()), features.cols());
  for (Index i = 0; i < static_cast<Index>(rows.size()); ++i) {
    out.row(i) = features.row(rows[static_cast<std::size_t>(i)]);
  }
  return out;
}

}  // namespace

PipelineResult evaluate_pipeline(const Dataset& dataset,
                                 const SgmfsConfig& config,
                                 const PipelineOptions& options) {
  const Index n = dataset.sample_count();
  int train_count = options.train_count;
  int test_count = options.test_count;
  if (train_count <= 0) {
    train_count = static_cast<int>((8 * n) / 10);
  }
  if (test_count <= 0) {
    test_count = static_cast<int>(n) - train_count;
  }
  if (train_count < 2 || test_count < 1 ||
      train_count + test_count > static_cast<int>(n)) {
    throw std::invalid_argument("evaluate_pipeline: bad train/test counts");
  }
  if (options.runs < 1) {
    throw std::invalid_argument("evaluate_pipeline: runs must be >= 1");
  }
  std::vector<double> proportions =
      options.proportions.empty() ? default_proportions() : options.proportions;
  for (double p : proportions) {
    if (!(p > 0.0) || p > 1.0) {
      throw std::invalid_argument("evaluate_pipeline: proportions must lie in (0, 1]");
    }
  }

  PipelineResult result;
  result.proportions = proportions;
  result.raw.resize(static_cast<std::size_t>(options.runs));

  for (int run = 0; run < options.runs; ++run) {
    Rng rng(options.seed + static_cast<std::uint64_t>(run));
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<int> train_idx(order.begin(), order.begin() + train_count);
    std::vector<int> test_idx(order.begin() + train_count,
                              order.begin() + train_count + test_count);
    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());

    Dataset train = take_samples(dataset, train_idx);
    Matrix test_features(dataset.feature_count(), test_count);
    Matrix test_labels(test_count, dataset.label_count());
    for (Index i = 0; i < test_count; ++i) {
      test_features.col(i) = dataset.features.col(test_idx[static_cast<std::size_t>(i)]);
      test_labels.row(i) = dataset.labels.row(test_idx[static_cast<std::size_t>(i)]);
    }

    if (options.standardize) {
      auto [standardized, stats] = standardize(train);
      train = std::move(standardized);
      test_features = apply_standardization(stats, test_features);
    }

    const SemiSplit split = make_split(train, options.labeled_fraction,
                                       options.seed + static_cast<std::uint64_t>(run));
    SgmfsConfig run_config = config;
    run_config.seed = config.seed + static_cast<std::uint64_t>(run);
    const FitResult fitted = fit(train, split, run_config);

    auto& per_run = result.raw[static_cast<std::size_t>(run)];
    per_run.reserve(proportions.size());
    for (double proportion : proportions) {
      const std::vector<int> features = select_features(fitted.ranking, proportion);
      const Matrix train_sel = select_rows(train.features, features);
      const Matrix test_sel = select_rows(test_features, features);
      const MlknnModel model =
          mlknn_fit(train_sel, train.labels, options.mlknn_k, options.mlknn_smoothing);
      const MlknnPrediction prediction = mlknn_predict(model, test_sel);
      per_run.push_back(
          evaluate_all(prediction.scores, prediction.predictions, test_labels));
    }
  }

  const std::vector<std::string> names = metric_names();
  result.per_proportion.resize(proportions.size());
  for (std::size_t p = 0; p < proportions.size(); ++p) {
    for (const std::string& name : names) {
      double mean = 0.0;
      for (int run = 0; run < options.runs; ++run) {
        mean += metric_value(result.raw[static_cast<std::size_t>(run)][p], name);
      }
      mean /= options.runs;
      double variance = 0.0;
      for (int run = 0; run < options.runs; ++run) {
        const double diff =
            metric_value(result.raw[static_cast<std::size_t>(run)][p], name) - mean;
        variance += diff * diff;
      }
      MetricStats stats;
      stats.mean = mean;
      stats.std_dev =
          options.runs > 1 ? std::sqrt(variance / (options.runs - 1)) : 0.0;
      result.per_proportion[p][name] = stats;
    }
  }

  result.per_run_means.resize(static_cast<std::size_t>(options.runs));
  for (int run = 0; run < options.runs; ++run) {
    MetricReport& mean_report = result.per_run_means[static_cast<std::size_t>(run)];
    for (const std::string& name : names) {
      double mean = 0.0;
      for (std::size_t p = 0; p < proportions.size(); ++p) {
        mean += metric_value(result.raw[static_cast<std::size_t>(run)][p], name);
      }
      mean /= static_cast<double>(proportions.size());
      if (name == "hamming_loss") mean_report.hamming_loss = mean;
      if (name == "ranking_loss") mean_report.ranking_loss = mean;
      if (name == "macro_f1") mean_report.macro_f1 = mean;
      if (name == "micro_f1") mean_report.micro_f1 = mean;
      if (name == "average_precision") mean_report.average_precision = mean;
    }
  }
  return result;
}

}  // namespace sgmfs
