#include "sgmfs/reports.hpp"

#include <json.hpp>

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace sgmfs {

namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  return out;
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buffer, ptr);
}

void write_ranking_csv(const std::string& path, const FeatureRanking& ranking,
                       const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  out << "# manifest: " << emit_manifest(manifest, false) << "\n";
  out << "feature_index,score,rank\n";
  for (std::size_t rank = 0; rank < ranking.order.size(); ++rank) {
    const int feature = ranking.order[rank];
    out << (feature + 1) << ',' << format_double(ranking.scores(feature)) << ','
        << (rank + 1) << "\n";
  }
}

void write_weights_csv(const std::string& path, const Matrix& w,
                       const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  out << "# manifest: " << emit_manifest(manifest, false) << "\n";
  out << "feature_index";
  for (Index j = 0; j < w.cols(); ++j) out << ",w" << j;
  out << "\n";
  for (Index i = 0; i < w.rows(); ++i) {
    out << (i + 1);
    for (Index j = 0; j < w.cols(); ++j) out << ',' << format_double(w(i, j));
    out << "\n";
  }
}

void write_trace_json(const std::string& path, const SolverState& state,
                      const FitDiagnostics& diagnostics,
                      const RunManifest& manifest) {
  json j;
  j["manifest"] = json::parse(emit_manifest(manifest, true));
  j["iterations"] = state.iteration;
  j["objective_trace"] = state.objective_trace;
  j["converged"] = diagnostics.converged;
  j["final_relative_change"] = diagnostics.final_relative_change;
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_results_csv(const std::string& path,
                       const std::vector<BenchmarkCell>& cells, int runs,
                       const RunManifest& manifest) {
  std::ofstream out = open_out(path);
  out << "# manifest: " << emit_manifest(manifest, false) << "\n";
  out << "labeled_fraction,proportion,metric,mean,std,runs\n";
  for (const BenchmarkCell& cell : cells) {
    for (const auto& [name, stats] : cell.metrics) {
      out << format_double(cell.labeled_fraction) << ','
          << format_double(cell.proportion) << ',' << name << ','
          << format_double(stats.mean) << ',' << format_double(stats.std_dev)
          << ',' << runs << "\n";
    }
  }
}

void write_results_json(const std::string& path,
                        const std::vector<BenchmarkCell>& cells,
                        const RunManifest& manifest) {
  json j;
  j["manifest"] = json::parse(emit_manifest(manifest, true));
  j["cells"] = json::array();
  for (const BenchmarkCell& cell : cells) {
    json metrics = json::object();
    for (const auto& [name, stats] : cell.metrics) {
      metrics[name] = json{{"mean", stats.mean}, {"std", stats.std_dev}};
    }
    j["cells"].push_back(json{{"labeled_fraction", cell.labeled_fraction},
                              {"proportion", cell.proportion},
                              {"metrics", metrics}});
  }
  std::ofstream out = open_out(path);
  out << j.dump(2) << "\n";
}

void write_graph_csv(const std::string& path, const SparseGraph& graph) {
  std::ofstream out = open_out(path);
  const Matrix& m = graph.weights;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

}  // namespace sgmfs
