#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sgmfs/matrix.hpp"

namespace sgmfs {

/// Multi-label dataset. Features are stored column-per-sample (d x n);
/// labels row-per-sample (n x c) with entries in {0, 1}.
struct Dataset {
  Matrix features;  // d x n
  Matrix labels;    // n x c
  std::vector<std::string> feature_names;
  std::vector<std::string> label_names;

  Index feature_count() const { return features.rows(); }
  Index sample_count() const { return features.cols(); }
  Index label_count() const { return labels.cols(); }
};

/// Partition of the training samples into labeled and unlabeled index sets.
struct SemiSplit {
  std::vector<int> labeled_indices;    // ascending
  std::vector<int> unlabeled_indices;  // ascending
  std::uint64_t seed = 0;
};

/// Per-feature z-score statistics. Zero-variance features carry stddev 0 and
/// pass through unscaled.
struct StandardizationStats {
  Vector mean;
  Vector stddev;
};

/// Load a comma-separated file with a header row; the last label_count
/// columns are labels (thresholded at 0.5). Errors cite 1-based data row and
/// column positions.
Dataset load_csv(const std::string& path, int label_count);

/// Load a Mulan-style dataset: an ARFF file (dense or sparse @data rows) plus
/// the XML manifest naming the label attributes.
Dataset load_mulan(const std::string& arff_path, const std::string& xml_path);

/// Deterministically draw ceil(labeled_fraction * n) labeled samples. Redraws
/// up to 10 times so every label that has a positive sample overall keeps at
/// least one positive in the labeled set; falls back to the last draw with a
/// warning on stderr.
SemiSplit make_split(const Dataset& dataset, double labeled_fraction,
                     std::uint64_t seed);

/// Z-score each feature over the given samples (population variance).
std::pair<Dataset, StandardizationStats> standardize(const Dataset& dataset);

/// Apply previously computed stats to held-out features (d x m).
Matrix apply_standardization(const StandardizationStats& stats,
                             const Matrix& features);

/// Ground-truth label rows for the labeled samples, in labeled_indices order.
Matrix labeled_rows(const Dataset& dataset, const SemiSplit& split);

}  // namespace sgmfs
