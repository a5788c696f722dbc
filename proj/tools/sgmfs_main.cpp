#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sgmfs/dataset.hpp"
#include "sgmfs/manifest.hpp"
#include "sgmfs/pipeline.hpp"
#include "sgmfs/reports.hpp"
#include "sgmfs/solver.hpp"
#include "sgmfs/validate.hpp"
#include "sgmfs/version.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct DataArgs {
  std::string data;
  std::string format = "csv";
  std::string labels_xml;
  int label_count = 1;
};

struct SolverArgs {
  sgmfs::SgmfsConfig config;
  double labeled_fraction = 0.1;
  bool no_standardize = false;
};

void add_data_flags(CLI::App* cmd, DataArgs& args) {
  cmd->add_option("--data", args.data, "dataset path")->required();
  cmd->add_option("--format", args.format, "input format")
      ->check(CLI::IsMember({"csv", "mulan"}));
  cmd->add_option("--labels-xml", args.labels_xml,
                  "Mulan XML label manifest (required for --format mulan)");
  cmd->add_option("--label-count", args.label_count,
                  "number of trailing label columns (csv format)")
      ->check(CLI::Range(1, 1 << 20));
}

void add_solver_flags(CLI::App* cmd, SolverArgs& args) {
  cmd->add_option("--alpha", args.config.alpha, "subspace term weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--beta", args.config.beta, "space-consistency weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--gamma", args.config.gamma, "sparsity weight")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--lsd", args.config.lsd,
                  "label subspace dimension (default: half the label count)")
      ->check(CLI::Range(1, 1 << 30));
  cmd->add_option("--labeled-fraction", args.labeled_fraction,
                  "fraction of training samples with labels")
      ->check(CLI::Range(1e-9, 1.0));
  cmd->add_option("--seed", args.config.seed, "random seed");
  cmd->add_option("--max-iters", args.config.max_iters, "iteration cap")
      ->check(CLI::Range(1, 1 << 30));
  cmd->add_option("--tol", args.config.tol, "relative objective change to stop")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--epsilon-d", args.config.epsilon_d,
                  "smoothing inside the row-norm reweighting")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--sigma", args.config.sigma,
                  "kernel bandwidth; <= 0 selects the mean pairwise distance");
  cmd->add_flag("--legacy-c", args.config.legacy_c,
                "drop the alpha weight from the Q eigenproblem matrix");
  cmd->add_flag("--literal-order", args.config.literal_order,
                "update W with the previous Q and b with the previous W");
  cmd->add_flag("--no-standardize", args.no_standardize,
                "skip per-feature z-scoring");
}

sgmfs::Dataset load_data(const DataArgs& args,
                         std::map<std::string, double>& timings) {
  const auto start = Clock::now();
  sgmfs::Dataset data;
  if (args.format == "mulan") {
    if (args.labels_xml.empty()) {
      throw CLI::ValidationError("--labels-xml is required for --format mulan");
    }
    data = sgmfs::load_mulan(args.data, args.labels_xml);
  } else {
    data = sgmfs::load_csv(args.data, args.label_count);
  }
  timings["load"] = seconds_since(start);
  return data;
}

sgmfs::RunManifest make_manifest(const std::string& command,
                                 const DataArgs& data, const SolverArgs& solver) {
  sgmfs::RunManifest manifest;
  manifest.command = command;
  manifest.tool_version = sgmfs::kVersion;
  manifest.data_path = data.data;
  manifest.labels_xml = data.labels_xml;
  manifest.format = data.format;
  manifest.label_count = data.label_count;
  manifest.config = solver.config;
  manifest.labeled_fractions = {solver.labeled_fraction};
  manifest.standardize = !solver.no_standardize;
  return manifest;
}

std::vector<double> parse_proportions(const std::string& spec) {
  std::vector<double> values;
  if (spec.find(':') != std::string::npos) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 ||
        !(step > 0.0)) {
      throw CLI::ValidationError("--proportions: expected start:stop:step");
    }
    for (int i = 0;; ++i) {
      const double value = start + i * step;
      if (value > stop + 1e-9) break;
      values.push_back(value);
    }
  } else {
    std::string token;
    std::istringstream stream(spec);
    while (std::getline(stream, token, ',')) {
      values.push_back(std::stod(token));
    }
  }
  if (values.empty()) throw CLI::ValidationError("--proportions: empty list");
  for (double v : values) {
    if (!(v > 0.0) || v > 1.0) {
      throw CLI::ValidationError("--proportions: values must lie in (0, 1]");
    }
  }
  return values;
}

std::vector<double> parse_fractions(const std::string& spec) {
  std::vector<double> values;
  std::string token;
  std::istringstream stream(spec);
  while (std::getline(stream, token, ',')) values.push_back(std::stod(token));
  if (values.empty()) {
    throw CLI::ValidationError("--labeled-fractions: empty list");
  }
  return values;
}

int run_select(const DataArgs& data_args, const SolverArgs& solver_args,
               const std::string& out_dir, bool dump_graph) {
  std::map<std::string, double> timings;
  sgmfs::Dataset data = load_data(data_args, timings);
  if (!solver_args.no_standardize) {
    const auto start = Clock::now();
    data = sgmfs::standardize(data).first;
    timings["standardize"] = seconds_since(start);
  }
  const sgmfs::SemiSplit split = sgmfs::make_split(
      data, solver_args.labeled_fraction, solver_args.config.seed);

  const auto fit_start = Clock::now();
  const sgmfs::FitResult result = sgmfs::fit(data, split, solver_args.config);
  timings["fit"] = seconds_since(fit_start);

  sgmfs::RunManifest manifest = make_manifest("select", data_args, solver_args);
  manifest.phase_seconds = timings;

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  sgmfs::write_ranking_csv((out / "ranking.csv").string(), result.ranking, manifest);
  sgmfs::write_weights_csv((out / "weights.csv").string(), result.state.w, manifest);
  sgmfs::write_trace_json((out / "trace.json").string(), result.state,
                          result.diagnostics, manifest);
  if (dump_graph) {
    sgmfs::write_graph_csv((out / "graph.csv").string(), result.state.m);
  }
  return 0;
}

int run_benchmark(const DataArgs& data_args, const SolverArgs& solver_args,
                  const std::string& out_dir, const std::string& proportions_spec,
                  const std::string& fractions_spec, int runs, int train_count,
                  int test_count, int mlknn_k, double mlknn_s) {
  std::map<std::string, double> timings;
  const sgmfs::Dataset data = load_data(data_args, timings);
  const std::vector<double> proportions = parse_proportions(proportions_spec);
  const std::vector<double> fractions = fractions_spec.empty()
                                            ? std::vector<double>{solver_args.labeled_fraction}
                                            : parse_fractions(fractions_spec);

  std::vector<sgmfs::BenchmarkCell> cells;
  const auto sweep_start = Clock::now();
  for (double fraction : fractions) {
    sgmfs::PipelineOptions options;
    options.train_count = train_count;
    options.test_count = test_count;
    options.labeled_fraction = fraction;
    options.proportions = proportions;
    options.runs = runs;
    options.seed = solver_args.config.seed;
    options.mlknn_k = mlknn_k;
    options.mlknn_smoothing = mlknn_s;
    options.standardize = !solver_args.no_standardize;
    const sgmfs::PipelineResult result =
        sgmfs::evaluate_pipeline(data, solver_args.config, options);
    for (std::size_t p = 0; p < result.proportions.size(); ++p) {
      sgmfs::BenchmarkCell cell;
      cell.labeled_fraction = fraction;
      cell.proportion = result.proportions[p];
      for (const auto& [name, stats] : result.per_proportion[p]) {
        cell.metrics[name] = stats;
      }
      cells.push_back(std::move(cell));
    }
  }
  timings["sweep"] = seconds_since(sweep_start);

  sgmfs::RunManifest manifest = make_manifest("benchmark", data_args, solver_args);
  manifest.labeled_fractions = fractions;
  manifest.proportions = proportions;
  manifest.runs = runs;
  manifest.train_count = train_count;
  manifest.test_count = test_count;
  manifest.mlknn_k = mlknn_k;
  manifest.mlknn_smoothing = mlknn_s;
  manifest.phase_seconds = timings;

  std::filesystem::create_directories(out_dir);
  const std::filesystem::path out(out_dir);
  sgmfs::write_results_csv((out / "results.csv").string(), cells, runs, manifest);
  sgmfs::write_results_json((out / "results.json").string(), cells, manifest);
  return 0;
}

int run_validate(const DataArgs& data_args, const SolverArgs& solver_args,
                 bool break_symmetry) {
  std::map<std::string, double> timings;
  sgmfs::Dataset data = load_data(data_args, timings);
  if (!solver_args.no_standardize) {
    data = sgmfs::standardize(data).first;
  }
  const sgmfs::SemiSplit split = sgmfs::make_split(
      data, solver_args.labeled_fraction, solver_args.config.seed);
  const sgmfs::ValidationReport report =
      sgmfs::run_validation(data, split, solver_args.config, break_symmetry);

  sgmfs::RunManifest manifest = make_manifest("validate", data_args, solver_args);
  manifest.phase_seconds = timings;
  std::cout << sgmfs::validation_report_json(report, manifest) << std::endl;
  if (!report.all_pass) {
    for (const sgmfs::PropertyCheck& check : report.properties) {
      if (!check.pass) {
        std::cerr << "property failed: " << check.name << " (value "
                  << sgmfs::format_double(check.value) << " > threshold "
                  << sgmfs::format_double(check.threshold) << ")\n";
      }
    }
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SGMFS semi-supervised multi-label feature selection"};
  app.set_version_flag("--version", sgmfs::kVersion);
  app.require_subcommand(1);

  DataArgs data_args;
  SolverArgs solver_args;

  auto* select = app.add_subcommand(
      "select", "fit the model and write ranking.csv / weights.csv / trace.json");
  std::string out_dir = "sgmfs-out";
  bool dump_graph = false;
  add_data_flags(select, data_args);
  add_solver_flags(select, solver_args);
  select->add_option("--out", out_dir, "output directory")->required();
  select->add_flag("--dump-graph", dump_graph,
                   "also write the learned graph as graph.csv");

  auto* benchmark = app.add_subcommand(
      "benchmark", "select-then-classify sweep over labeled fractions and "
                   "feature proportions; writes results.csv / results.json");
  std::string proportions_spec = "0.02:0.30:0.02";
  std::string fractions_spec;
  int runs = 10;
  int train_count = 0;
  int test_count = 0;
  int mlknn_k = 10;
  double mlknn_s = 1.0;
  add_data_flags(benchmark, data_args);
  add_solver_flags(benchmark, solver_args);
  benchmark->add_option("--out", out_dir, "output directory")->required();
  benchmark->add_option("--proportions", proportions_spec,
                        "comma list or start:stop:step");
  benchmark->add_option("--labeled-fractions", fractions_spec,
                        "comma list; default: the single --labeled-fraction");
  benchmark->add_option("--runs", runs, "independent repetitions")
      ->check(CLI::Range(1, 1 << 20));
  benchmark->add_option("--train-count", train_count,
                        "training samples per run (0: 80%)");
  benchmark->add_option("--test-count", test_count,
                        "test samples per run (0: the rest)");
  benchmark->add_option("--mlknn-k", mlknn_k, "ML-kNN neighbor count")
      ->check(CLI::Range(1, 1 << 20));
  benchmark->add_option("--mlknn-s", mlknn_s, "ML-kNN smoothing")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand(
      "validate", "fit and report the runtime invariant checks as JSON");
  bool break_symmetry = false;
  add_data_flags(validate, data_args);
  add_solver_flags(validate, solver_args);
  validate->add_flag("--break-symmetry", break_symmetry,
                     "fault-injection hook: perturb the graph before checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    if (select->parsed()) {
      return run_select(data_args, solver_args, out_dir, dump_graph);
    }
    if (benchmark->parsed()) {
      return run_benchmark(data_args, solver_args, out_dir, proportions_spec,
                           fractions_spec, runs, train_count, test_count,
                           mlknn_k, mlknn_s);
    }
    if (validate->parsed()) {
      return run_validate(data_args, solver_args, break_symmetry);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
