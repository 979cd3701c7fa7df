#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "tsam/config.hpp"
#include "tsam/diagnostics.hpp"

namespace tsam {

/// Resolves a projection name (log_pi, x_<i>, pc1, pc2) against the traces
/// it will be applied to; principal directions come from their pooled states.
Projection projection_from_name(const std::string& name, const std::vector<const Trace*>& traces);

/// Runs the configured experiment and writes its files into `out_dir`:
/// effective_config.json always; data.csv for synthetic data sets; then
///   single-run    trace_<kernel>.csv, chains.csv
///   mc-estimate   summary_<kernel>.csv, replicates_<kernel>.csv
///   coverage      as mc-estimate
///   edpm-compare  trace_<kernel>.csv, chains.csv, summary_thin<k>.csv
/// Progress lines go to `log`. Returns the paths written.
std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& config, const std::filesystem::path& out_dir,
                                                  std::ostream& log);

}  // namespace tsam
