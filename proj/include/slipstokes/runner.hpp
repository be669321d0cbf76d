#pragma once

#include <filesystem>

#include "slipstokes/config.hpp"
#include "slipstokes/limits.hpp"
#include "slipstokes/local_estimates.hpp"
#include "slipstokes/report.hpp"
#include "slipstokes/spectral.hpp"

namespace slipstokes {

/// Runs one experiment and writes the artifact tree
///   <out>/<name>/config.txt, report.json, *.csv, *.svg
/// Returns the process exit status (0 ok, 2 config error, 3 solver error);
/// on solver errors partial artifacts stay behind next to a FAILED marker.
int run_experiment(const ExperimentConfig& cfg);

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // measured values vs thresholds
};

/// The acceptance suite; level scales the meshes (1 = coarse smoke, 2 =
/// standard).  Writes one CSV row per criterion when out_dir is nonempty.
std::vector<CriterionResult> run_acceptance(int level, const std::string& out_dir,
                                            int threads);

/// Byte-deterministic JSON text for the acceptance run (criterion 15 compares
/// the bytes across thread counts).
std::string acceptance_report_json(const std::vector<CriterionResult>& results);

}  // namespace slipstokes
