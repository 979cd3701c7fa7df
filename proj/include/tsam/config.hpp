#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "tsam/datasets.hpp"
#include "tsam/samplers.hpp"
#include "tsam/targets.hpp"

namespace tsam {

struct ShiftedTSpec {
  Vector mu;
  Vector variances;
  double rho = 0.4;
  double nu = 10.0;
  double truncation_sd = 5.0;
};

struct BananaSpec {
  Vector mu;
  Vector variances;
  double a = 1.0;
  double b = 0.05;
  double truncation_sd = 5.0;
};

struct SyntheticLogisticSpec {
  std::size_t n = 41188;
  double zero_fraction = 0.887;
  Vector beta_true;
  std::uint64_t seed = 7;
};

struct LogisticSpec {
  std::optional<std::filesystem::path> csv;  // absolute once loaded
  LogisticSchema schema;
  std::optional<SyntheticLogisticSpec> synthetic;
  std::size_t subsample_size = 10000;
  std::uint64_t subsample_seed = 11;
  double prior_variance = 100.0;
  double box_halfwidth = 20.0;
};

struct SyntheticLVSpec {
  Vector theta;
  int n_years = 20;
  std::uint64_t seed = 3;
  double start_year = 1900.0;
};

struct LotkaVolterraSpec {
  std::optional<std::filesystem::path> csv;
  std::optional<SyntheticLVSpec> synthetic;
  int fine_steps_per_year = 365;
  int coarse_steps_per_year = 12;
  Integrator integrator = Integrator::RK4;
  LVPriors priors;
};

using TargetSpec = std::variant<ShiftedTSpec, BananaSpec, LogisticSpec, LotkaVolterraSpec>;

enum class ExperimentType { SingleRun, McEstimate, Coverage, EdpmCompare };

std::string to_string(ExperimentType t);

/// The bounded function averaged by mc-estimate runs.
struct FunctionSpec {
  std::string type = "exp_sum";  // exp_sum | constant | coordinate
  double amplitude = 10.0;       // exp_sum: amplitude·exp(rate·Σx)
  double rate = -0.1;
  double value = 0.0;            // constant
  int index = 1;                 // coordinate, 1-based
};

struct ExperimentSpec {
  ExperimentType type = ExperimentType::SingleRun;
  std::vector<SamplerConfig> kernels;
  std::vector<std::int64_t> n_list{500, 1000, 2000, 5000, 10000};
  int replicates = 20;
  FunctionSpec function;
  double p = 0.683;
  std::vector<std::int64_t> thinning_strategies{1, 10, 20};
  std::vector<std::string> projections{"log_pi"};
  int workers = 1;
  bool write_traces = true;
};

/// A fully resolved experiment: every default has been applied and the
/// target has been constructed.
struct ExperimentConfig {
  TargetSpec target_spec;
  TargetPtr target;
  std::optional<CsvTable> generated_data;  // synthetic data set, if any
  SamplerConfig sampler;                   // base settings for every kernel
  ExperimentSpec experiment;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;

  /// Replaces the base seed of the experiment and of every kernel.
  void set_seed(std::uint64_t s);
};

/// Parses, validates and resolves a JSON configuration. Relative data paths
/// are taken relative to `base_dir`. Throws ParseError on malformed JSON and
/// ValidationError listing every violation, unknown keys included.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const std::string& source_name = "config");
ExperimentConfig load_config(const std::filesystem::path& path);

/// JSON text of the resolved configuration; loading it yields the same configuration.
std::string effective_config_json(const ExperimentConfig& config);

}  // namespace tsam
