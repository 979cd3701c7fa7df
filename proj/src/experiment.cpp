#include "tsam/experiment.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include <fmt/format.h>

#include "tsam/csv.hpp"
#include "tsam/errors.hpp"

namespace tsam {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> kernel_labels(const std::vector<SamplerConfig>& kernels) {
  std::map<std::string, int> seen;
  std::vector<std::string> labels;
  for (const auto& k : kernels) {
    const std::string base = to_string(k.kernel);
    const int n = ++seen[base];
    labels.push_back(n == 1 ? base : base + "_" + std::to_string(n));
  }
  return labels;
}

StateFunction make_function(const FunctionSpec& f) {
  if (f.type == "constant") {
    return [v = f.value](const Vector&) { return v; };
  }
  if (f.type == "coordinate") {
    return [i = f.index - 1](const Vector& x) { return x(i); };
  }
  return [a = f.amplitude, r = f.rate](const Vector& x) { return a * std::exp(r * x.sum()); };
}

double safe_ess(const std::vector<double>& series) {
  try {
    return ess(series);
  } catch (const DegenerateSeriesError&) {
    return kNaN;
  }
}

void write_chain_table(const std::vector<Trace>& traces, const std::vector<std::string>& labels,
                       const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"kernel", "n_iters", "retained", "stage1_accepts", "accepts", "expensive_evals", "cheap_evals",
               "failed_evals", "wall_seconds", "ess_log_pi", "edpm_log_pi"});
  for (std::size_t i = 0; i < traces.size(); ++i) {
    const Trace& t = traces[i];
    const auto& c = t.counters;
    const double e = t.rows.size() >= 2 ? safe_ess(t.log_pi_series()) : kNaN;
    const double minutes = t.wall_minutes();
    w.write_row({labels[i], std::to_string(t.config.n_iters), std::to_string(t.rows.size()),
                 std::to_string(c.stage1_accepts), std::to_string(c.accepts), std::to_string(c.expensive_evals),
                 std::to_string(c.cheap_evals), std::to_string(c.failed_evals), format_real(t.wall_seconds),
                 format_real(e), format_real(minutes > 0.0 ? e / minutes : kNaN)});
  }
  w.close();
}

void write_replicates(const std::vector<ReplicateSummary>& summary, const std::filesystem::path& path) {
  CsvWriter w(path);
  w.write_row({"n", "replicate", "estimate"});
  for (const auto& s : summary) {
    for (std::size_t k = 0; k < s.estimates.size(); ++k) {
      w.write_row({std::to_string(s.n), std::to_string(k), format_real(s.estimates[k])});
    }
  }
  w.close();
}

}  // namespace

Projection projection_from_name(const std::string& name, const std::vector<const Trace*>& traces) {
  if (name == "log_pi") return Projection::log_posterior();
  if (name == "pc1" || name == "pc2") {
    if (traces.empty()) throw std::invalid_argument("projection: no traces");
    Eigen::Index rows = 0;
    for (const Trace* t : traces) rows += static_cast<Eigen::Index>(t->rows.size());
    Matrix pooled(rows, traces.front()->dim);
    Eigen::Index r = 0;
    for (const Trace* t : traces) {
      const Matrix s = t->states();
      pooled.middleRows(r, s.rows()) = s;
      r += s.rows();
    }
    if (pooled.rows() < 2) throw DegenerateSeriesError("projection: need at least two states");
    const Matrix centered = pooled.rowwise() - pooled.colwise().mean();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(pooled.rows() - 1);
    const PrincipalDirections pcs = principal_projection(cov);
    return Projection::direction(name == "pc1" ? pcs.first : pcs.orthogonal, name);
  }
  if (name.rfind("x_", 0) == 0) return Projection::coordinate(std::stol(name.substr(2)) - 1);
  throw std::invalid_argument("unknown projection '" + name + "'");
}

std::vector<std::filesystem::path> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                                  std::ostream& log) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory '" + out_dir.string() + "': " + ec.message());

  std::vector<std::filesystem::path> written;
  auto out = [&](const std::string& name) {
    written.push_back(out_dir / name);
    return written.back();
  };

  {
    const auto path = out("effective_config.json");
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << effective_config_json(cfg);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
  }
  if (cfg.generated_data) write_table_csv(*cfg.generated_data, out("data.csv"));

  const TwoLevelTarget& target = *cfg.target;
  const ExperimentSpec& e = cfg.experiment;
  const auto labels = kernel_labels(e.kernels);
  log << fmt::format("target {} (d = {}), experiment {}, seed {}\n", target.name(), target.dim(), to_string(e.type),
                     cfg.seed);
  if (const auto* lt = dynamic_cast<const LogisticTarget*>(&target)) {
    log << fmt::format("logistic data: {} rows, {} zero responses, subsample {}\n", lt->n_ones() + lt->n_zeros(),
                       lt->n_zeros(), lt->n_subsample());
  }

  switch (e.type) {
    case ExperimentType::SingleRun:
    case ExperimentType::EdpmCompare: {
      std::vector<Trace> traces;
      for (std::size_t i = 0; i < e.kernels.size(); ++i) {
        traces.push_back(run_chain(target, e.kernels[i]));
        const Trace& t = traces.back();
        log << fmt::format("{}: {} iterations in {:.3f} s, acceptance {:.4f}, expensive evaluations {}\n", labels[i],
                           t.counters.iterations, t.wall_seconds,
                           static_cast<double>(t.counters.accepts) / static_cast<double>(t.counters.iterations),
                           t.counters.expensive_evals);
        if (e.write_traces) write_trace_csv(t, out("trace_" + labels[i] + ".csv"));
      }
      write_chain_table(traces, labels, out("chains.csv"));
      if (e.type == ExperimentType::SingleRun) break;

      const std::vector<const Trace*> both{&traces[0], &traces[1]};
      for (std::int64_t k : e.thinning_strategies) {
        std::vector<EdpmComparison> rows;
        for (const auto& name : e.projections) {
          const Projection proj = projection_from_name(name, both);
          EdpmComparison row;
          row.projection = name;
          row.edpm_a = edpm(traces[0], proj, static_cast<std::size_t>(k));
          row.edpm_b = edpm(traces[1], proj, static_cast<std::size_t>(k));
          row.redpm = row.edpm_a / row.edpm_b;
          log << fmt::format("thinning {}: {} EDPM {} = {:.6g}, {} = {:.6g}, REDPM = {:.4f}\n", k, name, labels[0],
                             row.edpm_a, labels[1], row.edpm_b, row.redpm);
          rows.push_back(row);
        }
        write_edpm_csv(rows, out("summary_thin" + std::to_string(k) + ".csv"));
      }
      break;
    }
    case ExperimentType::McEstimate:
    case ExperimentType::Coverage: {
      for (std::size_t i = 0; i < e.kernels.size(); ++i) {
        std::vector<ReplicateSummary> summary;
        if (e.type == ExperimentType::Coverage) {
          const auto& banana = dynamic_cast<const BananaTarget&>(target);
          summary = coverage_experiment(banana, e.kernels[i], e.p, e.replicates, e.n_list, e.workers);
        } else {
          summary = mc_estimate_experiment(target, e.kernels[i], make_function(e.function), e.replicates, e.n_list,
                                           e.workers);
        }
        for (const auto& s : summary) {
          log << fmt::format("{}: n = {}, mean = {:.6g}, sd = {:.6g}\n", labels[i], s.n, s.mean, s.sd);
        }
        write_summary_csv(summary, out("summary_" + labels[i] + ".csv"));
        write_replicates(summary, out("replicates_" + labels[i] + ".csv"));
      }
      break;
    }
  }
  return written;
}

}  // namespace tsam
