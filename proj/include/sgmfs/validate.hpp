#pragma once

#include <string>
#include <vector>

#include "sgmfs/dataset.hpp"
#include "sgmfs/manifest.hpp"
#include "sgmfs/solver.hpp"

namespace sgmfs {

struct PropertyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      // observed worst case
  double threshold = 0.0;  // pass iff value <= threshold
};

struct ValidationReport {
  std::vector<PropertyCheck> properties;
  bool all_pass = false;
};

/// Fit the model and check the runtime invariants: monotone objective trace,
/// per-block surrogate descent, F bounds and pinned labeled rows, graph
/// symmetry/nonnegativity/zero diagonal, Q orthonormality, and the graph
/// fixed-point residual (evaluated on a bounded subsample for large n).
/// break_symmetry_hook injects an asymmetric perturbation into the final
/// graph before the graph properties are measured (test hook).
ValidationReport run_validation(const Dataset& dataset, const SemiSplit& split,
                                const SgmfsConfig& config,
                                bool break_symmetry_hook = false);

/// {"manifest": ..., "properties": [{name, pass, value, threshold}...],
///  "all_pass": bool}
std::string validation_report_json(const ValidationReport& report,
                                   const RunManifest& manifest);

}  // namespace sgmfs
