#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sgmfs/solver.hpp"

namespace sgmfs {

/// Everything needed to reconstruct a run; embedded in every output file.
/// Phase timings are informational and excluded from the deterministic form
/// used inside byte-stable outputs.
struct RunManifest {
  std::string command;
  std::string tool_version;
  std::string data_path;
  std::string labels_xml;
  std::string format;  // "csv" or "mulan"
  int label_count = 0;
  SgmfsConfig config;
  std::vector<double> labeled_fractions;
  std::vector<double> proportions;
  int runs = 1;
  int train_count = 0;
  int test_count = 0;
  int mlknn_k = 10;
  double mlknn_smoothing = 1.0;
  bool standardize = true;
  std::map<std::string, double> phase_seconds;

  bool operator==(const RunManifest&) const = default;
};

/// Compact JSON. include_timings=false drops phase_seconds (deterministic).
std::string emit_manifest(const RunManifest& manifest,
                          bool include_timings = true);

RunManifest parse_manifest(const std::string& json_text);

}  // namespace sgmfs
