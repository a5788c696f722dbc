#include "sgmfs/validate.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sgmfs/graph.hpp"
#include "sgmfs/rng.hpp"

namespace sgmfs {

namespace {

// The fixed-point residual check iterates the multiplicative update to
// convergence, which is cubic per step; cap the instance size.
constexpr Index kKktMaxSamples = 120;
constexpr int kKktMaxIterations = 20000;

double graph_kkt_residual(const SolverState& state, const SgmfsConfig& config) {
  const Index n = state.m.weights.rows();
  SparseGraph graph = state.m;
  Matrix f = state.f;
  Matrix q = state.q;
  if (n > kKktMaxSamples) {
    Rng rng(config.seed);
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    order.resize(static_cast<std::size_t>(kKktMaxSamples));
    std::sort(order.begin(), order.end());
    const Index sub = kKktMaxSamples;
    Matrix weights(sub, sub);
    Matrix f_sub(sub, f.cols());
    Matrix q_sub(sub, q.cols());
    for (Index i = 0; i < sub; ++i) {
      f_sub.row(i) = f.row(order[static_cast<std::size_t>(i)]);
      q_sub.row(i) = q.row(order[static_cast<std::size_t>(i)]);
      for (Index j = 0; j < sub; ++j) {
        weights(i, j) = state.m.weights(order[static_cast<std::size_t>(i)],
                                        order[static_cast<std::size_t>(j)]);
      }
    }
    weights.diagonal().setZero();
    graph.weights = std::move(weights);
    f = std::move(f_sub);
    q = std::move(q_sub);
  }

  const SplitPair splits = build_splits(f, q, config.gamma, config.beta);
  double residual = 0.0;
  for (int iter = 0; iter < kKktMaxIterations; ++iter) {
    graph = update_graph(graph, splits);
    if (iter % 50 == 49 || iter == kKktMaxIterations - 1) {
      const Matrix gradient =
          graph_quadratic_gradient(graph, f, q, config.gamma, config.beta);
      residual = gradient.cwiseProduct(graph.weights).cwiseAbs().maxCoeff();
      if (residual <= 1e-6) break;
    }
  }
  return residual;
}

}  // namespace

ValidationReport run_validation(const Dataset& dataset, const SemiSplit& split,
                                const SgmfsConfig& config,
                                bool break_symmetry_hook) {
  FitResult result = fit(dataset, split, config);
  const FitDiagnostics& diag = result.diagnostics;

  if (break_symmetry_hook && result.state.m.weights.rows() >= 2) {
    result.state.m.weights(0, 1) += 0.25;
  }
  const Matrix& m = result.state.m.weights;

  ValidationReport report;
  report.properties.push_back(
      {"monotone_trace", diag.max_trace_increase <= 1e-7,
       diag.max_trace_increase, 1e-7});
  report.properties.push_back(
      {"block_surrogate_descent", diag.max_block_surrogate_increase <= 1e-9,
       diag.max_block_surrogate_increase, 1e-9});
  report.properties.push_back({"f_bounds", diag.max_f_bound_violation <= 0.0,
                               diag.max_f_bound_violation, 0.0});
  report.properties.push_back(
      {"f_labeled_rows", diag.max_labeled_row_mismatch <= 0.0,
       diag.max_labeled_row_mismatch, 0.0});
  report.properties.push_back(
      {"q_orthonormal", diag.max_q_orthonormality_error <= 1e-8,
       diag.max_q_orthonormality_error, 1e-8});

  const double asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff();
  report.properties.push_back(
      {"graph_symmetry", asymmetry <= 1e-10, asymmetry, 1e-10});
  const double negativity = std::max(0.0, -m.minCoeff());
  report.properties.push_back(
      {"graph_nonnegative", negativity <= 0.0, negativity, 0.0});
  const double diagonal = m.diagonal().cwiseAbs().maxCoeff();
  report.properties.push_back(
      {"graph_zero_diagonal", diagonal <= 0.0, diagonal, 0.0});

  const double kkt = graph_kkt_residual(result.state, resolve_config(
      config, dataset.label_count(), dataset.sample_count()));
  report.properties.push_back({"graph_kkt_residual", kkt <= 1e-6, kkt, 1e-6});

  report.all_pass = std::all_of(report.properties.begin(), report.properties.end(),
                                [](const PropertyCheck& p) { return p.pass; });
  return report;
}

std::string validation_report_json(const ValidationReport& report,
                                   const RunManifest& manifest) {
  nlohmann::json j;
  j["manifest"] = nlohmann::json::parse(emit_manifest(manifest, true));
  j["properties"] = nlohmann::json::array();
  for (const PropertyCheck& check : report.properties) {
    j["properties"].push_back(nlohmann::json{{"name", check.name},
                                             {"pass", check.pass},
                                             {"value", check.value},
                                             {"threshold", check.threshold}});
  }
  j["all_pass"] = report.all_pass;
  return j.dump(2);
}

}  // namespace sgmfs
