#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sgmfs/dataset.hpp"
#include "sgmfs/metrics.hpp"
#include "sgmfs/solver.hpp"

namespace sgmfs {

struct PipelineOptions {
  int train_count = 0;  // 0: 80% of the samples
  int test_count = 0;   // 0: the remainder
  double labeled_fraction = 0.1;
  std::vector<double> proportions;  // empty: 0.02 .. 0.30 step 0.02
  int runs = 10;
  std::uint64_t seed = 1;
  int mlknn_k = 10;
  double mlknn_smoothing = 1.0;
  bool standardize = true;
};

struct MetricStats {
  double mean = 0.0;
  double std_dev = 0.0;
};

struct PipelineResult {
  std::vector<double> proportions;
  /// raw[run][proportion_index]
  std::vector<std::vector<MetricReport>> raw;
  /// per proportion, keyed by metric name; means and sample stds over runs
  std::vector<std::map<std::string, MetricStats>> per_proportion;
  /// per run, each metric averaged over all proportions
  std::vector<MetricReport> per_run_means;
};

/// 0.02, 0.04, ..., 0.30.
std::vector<double> default_proportions();

/// Select-then-classify protocol: per run (seeded with seed + run index),
/// draw disjoint train/test samples, standardize on train, fit the feature
/// ranking on the semi-labeled train split, then for every proportion train
/// ML-kNN on the selected feature columns and score the test samples.
PipelineResult evaluate_pipeline(const Dataset& dataset,
                                 const SgmfsConfig& config,
                                 const PipelineOptions& options);

std::vector<std::string> metric_names();
double metric_value(const MetricReport& report, const std::string& name);

}  // namespace sgmfs
