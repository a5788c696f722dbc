#pragma once

#include <map>
#include <string>
#include <vector>

#include "sgmfs/manifest.hpp"
#include "sgmfs/pipeline.hpp"
#include "sgmfs/solver.hpp"

namespace sgmfs {

/// One (labeled_fraction, proportion) cell of a benchmark sweep.
struct BenchmarkCell {
  double labeled_fraction = 0.0;
  double proportion = 0.0;
  std::map<std::string, MetricStats> metrics;
};

/// Locale-independent shortest round-trip decimal form.
std::string format_double(double value);

// All writers embed the manifest. CSV files carry it as a leading
// "# manifest: {...}" comment without timings so byte-identical reruns stay
// byte-identical; JSON files carry the full manifest.

/// Columns: feature_index (1-based), score, rank (1 = best).
void write_ranking_csv(const std::string& path, const FeatureRanking& ranking,
                       const RunManifest& manifest);

/// Columns: feature_index (1-based) followed by one column per label.
void write_weights_csv(const std::string& path, const Matrix& w,
                       const RunManifest& manifest);

void write_trace_json(const std::string& path, const SolverState& state,
                      const FitDiagnostics& diagnostics,
                      const RunManifest& manifest);

/// Columns: labeled_fraction, proportion, metric, mean, std, runs.
void write_results_csv(const std::string& path,
                       const std::vector<BenchmarkCell>& cells, int runs,
                       const RunManifest& manifest);

void write_results_json(const std::string& path,
                        const std::vector<BenchmarkCell>& cells,
                        const RunManifest& manifest);

/// Dense CSV dump of the graph weights (debug aid).
void write_graph_csv(const std::string& path, const SparseGraph& graph);

}  // namespace sgmfs
