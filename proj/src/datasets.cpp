#include "tsam/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <Eigen/QR>

#include "tsam/errors.hpp"
#include "tsam/random.hpp"

namespace tsam {

namespace {

double logistic(double eta) {
  return eta >= 0.0 ? 1.0 / (1.0 + std::exp(-eta)) : std::exp(eta) / (1.0 + std::exp(eta));
}

double cell_real(const std::string& cell, std::size_t row, const std::string& column) {
  try {
    return parse_real(cell);
  } catch (const ValueError&) {
    throw ValueError("row " + std::to_string(row + 1) + ", column '" + column + "': not a number: '" + cell + "'");
  }
}

}  // namespace

LogisticData logistic_from_table(const CsvTable& table, const LogisticSchema& schema) {
  if (table.rows.empty()) throw ValueError("logistic data: no rows");
  const std::size_t n = table.rows.size();
  const std::size_t yc = table.column(schema.response);

  LogisticData data;
  data.y.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& cell = table.rows[i][yc];
    if (cell == "0") {
      data.y[i] = 0;
    } else if (cell == "1") {
      data.y[i] = 1;
    } else {
      throw ValueError("row " + std::to_string(i + 1) + ": response must be 0 or 1, found '" + cell + "'");
    }
  }

  std::vector<Vector> columns{Vector::Ones(static_cast<Eigen::Index>(n))};
  data.column_names.emplace_back("intercept");
  for (const PredictorSpec& p : schema.predictors) {
    const std::size_t c = table.column(p.name);
    if (!p.categorical) {
      Vector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) v(static_cast<Eigen::Index>(i)) = cell_real(table.rows[i][c], i, p.name);
      if (!v.allFinite()) throw ValueError("column '" + p.name + "': nonfinite value");
      columns.push_back(std::move(v));
      data.column_names.push_back(p.name);
      continue;
    }
    std::map<std::string, int> levels;
    for (const auto& row : table.rows) levels.emplace(row[c], 0);
    int k = 0;
    for (auto& [label, index] : levels) index = k++;
    for (auto it = std::next(levels.begin()); it != levels.end(); ++it) {
      Vector v = Vector::Zero(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        if (table.rows[i][c] == it->first) v(static_cast<Eigen::Index>(i)) = 1.0;
      }
      columns.push_back(std::move(v));
      data.column_names.push_back(p.name + "=" + it->first);
    }
  }

  data.X.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t j = 0; j < columns.size(); ++j) data.X.col(static_cast<Eigen::Index>(j)) = columns[j];

  const Eigen::ColPivHouseholderQR<Matrix> qr(data.X);
  if (qr.rank() < data.X.cols()) {
    throw DataShapeError("logistic data: design matrix has rank " + std::to_string(qr.rank()) + " < " +
                         std::to_string(data.X.cols()) + " columns");
  }
  return data;
}

LogisticData load_logistic_csv(const std::filesystem::path& path, const LogisticSchema& schema) {
  return logistic_from_table(read_csv(path), schema);
}

ObservationSet observations_from_table(const CsvTable& table) {
  const std::size_t tc = table.column("year");
  const std::size_t cols[2] = {table.column("hare"), table.column("lynx")};
  ObservationSet obs;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    obs.times.push_back(cell_real(row[tc], i, "year"));
    for (int j = 0; j < 2; ++j) {
      const double v = cell_real(row[cols[j]], i, table.header[cols[j]]);
      if (!(v > 0.0) || !std::isfinite(v)) {
        throw ValueError("row " + std::to_string(i + 1) + ", column '" + table.header[cols[j]] +
                         "': counts must be positive");
      }
      obs.counts[j].push_back(v);
    }
  }
  obs.validate();
  return obs;
}

ObservationSet load_lv_csv(const std::filesystem::path& path) { return observations_from_table(read_csv(path)); }

void write_lv_csv(const ObservationSet& obs, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"year", "hare", "lynx"});
  for (std::size_t i = 0; i < obs.size(); ++i) {
    w.write_row({format_real(obs.times[i]), format_real(obs.counts[0][i]), format_real(obs.counts[1][i])});
  }
  w.close();
}

const std::vector<int>& synthetic_logistic_levels() {
  static const std::vector<int> levels{4, 3, 2, 3, 3};
  return levels;
}

SyntheticLogistic generate_synthetic_logistic(std::size_t n, double zero_fraction, const Vector& beta_true,
                                              std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("synthetic logistic: n must be positive");
  if (!(zero_fraction > 0.0 && zero_fraction < 1.0)) {
    throw std::invalid_argument("synthetic logistic: zero_fraction must lie in (0, 1)");
  }
  const auto& levels = synthetic_logistic_levels();
  Eigen::Index d = 1;
  for (int l : levels) d += l - 1;
  if (beta_true.size() != d) {
    throw std::invalid_argument("synthetic logistic: beta_true needs " + std::to_string(d) + " entries");
  }

  SyntheticLogistic out;
  out.schema.response = "y";
  out.table.header.emplace_back("y");
  for (std::size_t p = 0; p < levels.size(); ++p) {
    const std::string name = "f" + std::to_string(p + 1);
    out.schema.predictors.push_back({name, true});
    out.table.header.push_back(name);
  }

  RandomStream rng(seed, 0x10c);
  std::vector<std::vector<int>> draws(n, std::vector<int>(levels.size()));
  for (auto& row : draws) {
    for (std::size_t p = 0; p < levels.size(); ++p) {
      row[p] = std::min(levels[p] - 1, static_cast<int>(rng.uniform() * levels[p]));
    }
  }

  // Linear predictor without the shift; level 0 of every factor is the reference.
  std::vector<double> eta(n, beta_true(0));
  for (std::size_t i = 0; i < n; ++i) {
    Eigen::Index col = 1;
    for (std::size_t p = 0; p < levels.size(); ++p) {
      if (draws[i][p] > 0) eta[i] += beta_true(col + draws[i][p] - 1);
      col += levels[p] - 1;
    }
  }

  const double target = 1.0 - zero_fraction;
  auto mean_prob = [&](double c) {
    double s = 0.0;
    for (double e : eta) s += logistic(e + c);
    return s / static_cast<double>(n);
  };
  double lo = -60.0;
  double hi = 60.0;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (mean_prob(mid) < target ? lo : hi) = mid;
  }
  out.intercept_shift = 0.5 * (lo + hi);

  for (std::size_t i = 0; i < n; ++i) {
    const bool one = rng.uniform() < logistic(eta[i] + out.intercept_shift);
    std::vector<std::string> row{one ? "1" : "0"};
    for (std::size_t p = 0; p < levels.size(); ++p) row.push_back("L" + std::to_string(draws[i][p] + 1));
    out.table.rows.push_back(std::move(row));
  }
  out.data = logistic_from_table(out.table, out.schema);
  return out;
}

ObservationSet generate_synthetic_lv(const Vector& theta, const LVPriors& units, int n_years, std::uint64_t seed,
                                     double start_year) {
  if (theta.size() != 8) throw std::invalid_argument("synthetic lv: theta needs 8 entries");
  const double u = units.rate_units_per_year;
  const LVParams rates{theta(0) * u, theta(1) * u, theta(2) * u, theta(3) * u};
  const SolverGrid grid = standard_grids(n_years).first;
  const LVTrajectory traj = solve_lv(rates, {theta(6), theta(7)}, grid);

  RandomStream rng(seed, 0x17);
  ObservationSet obs;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    obs.times.push_back(start_year + traj.times[i]);
    for (int j = 0; j < 2; ++j) obs.counts[j].push_back(traj.states[i][j] * std::exp(theta(4 + j) * rng.normal()));
  }
  obs.validate();
  return obs;
}

}  // namespace tsam
