#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tsam/csv.hpp"
#include "tsam/targets.hpp"

namespace tsam {

struct PredictorSpec {
  std::string name;
  bool categorical = true;
};

/// Which columns of a logistic CSV hold the response and the predictors.
struct LogisticSchema {
  std::string response = "y";
  std::vector<PredictorSpec> predictors;
};

/// Builds the design matrix: an intercept column, then for each predictor
/// either the numeric column or one dummy per non-reference level. Levels are
/// sorted and the first is the reference. The response must be 0 or 1.
/// Throws SchemaError for missing columns, ValueError for bad cells and
/// DataShapeError when the design is rank deficient.
LogisticData logistic_from_table(const CsvTable& table, const LogisticSchema& schema);
LogisticData load_logistic_csv(const std::filesystem::path& path, const LogisticSchema& schema);

/// Reads (year, hare, lynx) rows; counts must be positive.
ObservationSet observations_from_table(const CsvTable& table);
ObservationSet load_lv_csv(const std::filesystem::path& path);
void write_lv_csv(const ObservationSet& obs, const std::filesystem::path& path);

struct SyntheticLogistic {
  CsvTable table;               // raw categorical rows, response first
  LogisticSchema schema;        // how `table` maps onto the design
  LogisticData data;
  double intercept_shift = 0.0; // added to beta_true[0] to reach the target imbalance
};

/// Level counts of the categorical predictors of the synthetic generator:
/// 1 + Σ(levels − 1) = 11 coefficients.
const std::vector<int>& synthetic_logistic_levels();

/// n rows whose predictors are drawn uniformly over the levels. Responses
/// are Bernoulli(σ(xᵀβ + c)) with c chosen so that the mean success
/// probability is 1 − zero_fraction.
SyntheticLogistic generate_synthetic_logistic(std::size_t n, double zero_fraction, const Vector& beta_true,
                                              std::uint64_t seed);

/// Counts observed at the data grid's observation times (offset by
/// start_year) under multiplicative log-normal noise with scales σ₁, σ₂.
ObservationSet generate_synthetic_lv(const Vector& theta, const LVPriors& units, int n_years, std::uint64_t seed,
                                     double start_year = 1900.0);

}  // namespace tsam
