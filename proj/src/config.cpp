#include "tsam/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tsam/errors.hpp"

namespace tsam {

using Json = nlohmann::ordered_json;

namespace {

/// Reads typed fields of one JSON object, recording violations instead of
/// throwing so that every problem in a file is reported at once.
class Fields {
 public:
  Fields(const Json* obj, std::string path, std::vector<std::string>& errors)
      : obj_(obj), path_(std::move(path)), errors_(errors) {
    if (obj_ && !obj_->is_object()) {
      fail("expected an object");
      obj_ = nullptr;
    }
  }

  ~Fields() {
    if (!obj_) return;
    for (const auto& [key, value] : obj_->items()) {
      if (!used_.count(key)) errors_.push_back(at(key) + ": unknown key");
    }
  }

  Fields(const Fields&) = delete;
  Fields& operator=(const Fields&) = delete;

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  void fail(const std::string& msg) { errors_.push_back((path_.empty() ? std::string("config") : path_) + ": " + msg); }
  void fail(const std::string& key, const std::string& msg) { errors_.push_back(at(key) + ": " + msg); }

  const Json* raw(const std::string& key) {
    used_.insert(key);
    if (!obj_) return nullptr;
    auto it = obj_->find(key);
    return it == obj_->end() ? nullptr : &*it;
  }
  bool has(const std::string& key) const { return obj_ && obj_->contains(key); }

  std::optional<double> real(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number()) return type_error(key, "a number");
    return v->get<double>();
  }

  std::optional<std::int64_t> integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer()) return type_error(key, "an integer");
    if (v->is_number_unsigned() && v->get<std::uint64_t>() > static_cast<std::uint64_t>(INT64_MAX)) {
      return type_error(key, "an integer below 2^63");
    }
    return v->get<std::int64_t>();
  }

  std::optional<std::uint64_t> unsigned_integer(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_number_integer() || (!v->is_number_unsigned() && v->get<std::int64_t>() < 0)) {
      return type_error(key, "a nonnegative integer");
    }
    return v->get<std::uint64_t>();
  }

  std::optional<std::string> string(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_string()) return type_error(key, "a string");
    return v->get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_boolean()) return type_error(key, "true or false");
    return v->get<bool>();
  }

  std::optional<Vector> vector(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    auto out = to_vector(*v);
    if (!out) return type_error(key, "a nonempty array of numbers");
    return out;
  }

  std::optional<Matrix> matrix(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) return type_error(key, "a square array of number arrays");
    const auto n = static_cast<Eigen::Index>(v->size());
    Matrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto row = to_vector((*v)[static_cast<std::size_t>(i)]);
      if (!row || row->size() != n) return type_error(key, "a square array of number arrays");
      m.row(i) = row->transpose();
    }
    return m;
  }

  std::optional<std::vector<std::int64_t>> integers(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) return type_error(key, "a nonempty array of integers");
    std::vector<std::int64_t> out;
    for (const auto& e : *v) {
      if (!e.is_number_integer()) return type_error(key, "a nonempty array of integers");
      out.push_back(e.get<std::int64_t>());
    }
    return out;
  }

  std::optional<std::vector<std::string>> strings(const std::string& key) {
    const Json* v = raw(key);
    if (!v) return std::nullopt;
    if (!v->is_array() || v->empty()) return type_error(key, "a nonempty array of strings");
    std::vector<std::string> out;
    for (const auto& e : *v) {
      if (!e.is_string()) return type_error(key, "a nonempty array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

 private:
  static std::optional<Vector> to_vector(const Json& v) {
    if (!v.is_array() || v.empty()) return std::nullopt;
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) return std::nullopt;
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  std::nullopt_t type_error(const std::string& key, const std::string& expected) {
    fail(key, "expected " + expected);
    return std::nullopt;
  }

  const Json* obj_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> used_;
};

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

Vector default_t_mu() {
  Vector mu(8);
  for (int i = 0; i < 8; ++i) mu(i) = i;
  return mu;
}

Vector default_t_variances() {
  Vector v(8);
  v << 1, 1, 1, 1, 1, 2, 4, 6;
  return v;
}

Vector default_beta_true() {
  Vector b(11);
  b << 0.0, 0.4, -0.3, 0.6, -0.5, 0.3, 0.7, -0.4, 0.5, 0.9, -0.6;
  return b;
}

Vector default_lv_theta() {
  Vector t(8);
  t << 0.045, 0.0023, 0.067, 0.002, 0.25, 0.25, 30.0, 4.0;
  return t;
}

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base_dir) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base_dir / path;
  return std::filesystem::absolute(path).lexically_normal();
}

// --- targets -----------------------------------------------------------------

void check_mu_variances(Fields& f, const Vector& mu, const Vector& variances) {
  if (mu.size() != variances.size()) f.fail("mu and variances differ in length");
  if (!mu.allFinite()) f.fail("mu", "entries must be finite");
  if (!(variances.array() > 0.0).all() || !variances.allFinite()) f.fail("variances", "entries must be positive");
}

ShiftedTSpec parse_shifted_t(Fields& f) {
  ShiftedTSpec s;
  s.mu = f.vector("mu").value_or(default_t_mu());
  s.variances = f.vector("variances").value_or(default_t_variances());
  s.rho = f.real("rho").value_or(s.rho);
  s.nu = f.real("nu").value_or(s.nu);
  s.truncation_sd = f.real("truncation_sd").value_or(s.truncation_sd);
  check_mu_variances(f, s.mu, s.variances);
  if (!(std::abs(s.rho) < 1.0)) f.fail("rho", "must lie in (−1, 1)");
  if (!(s.nu > 0.0)) f.fail("nu", "must be positive");
  if (!(s.truncation_sd > 0.0)) f.fail("truncation_sd", "must be positive");
  return s;
}

BananaSpec parse_banana(Fields& f) {
  BananaSpec s;
  const Eigen::Index d = f.has("mu") || f.has("variances") ? 0 : 8;
  s.mu = f.vector("mu").value_or(Vector::Zero(d));
  Vector v = Vector::Ones(d);
  if (d > 0) v(0) = 10.0;
  s.variances = f.vector("variances").value_or(v);
  if (s.mu.size() == 0) s.mu = Vector::Zero(s.variances.size());
  if (s.variances.size() == 0) {
    s.variances = Vector::Ones(s.mu.size());
    if (s.mu.size() > 0) s.variances(0) = 10.0;
  }
  s.a = f.real("a").value_or(s.a);
  s.b = f.real("b").value_or(s.b);
  s.truncation_sd = f.real("truncation_sd").value_or(s.truncation_sd);
  check_mu_variances(f, s.mu, s.variances);
  if (s.mu.size() < 2) f.fail("mu", "banana needs at least two coordinates");
  if (s.a == 0.0 || !std::isfinite(s.a)) f.fail("a", "must be finite and nonzero");
  if (!std::isfinite(s.b)) f.fail("b", "must be finite");
  if (!(s.truncation_sd > 0.0)) f.fail("truncation_sd", "must be positive");
  return s;
}

LogisticSpec parse_logistic(Fields& f, const std::filesystem::path& base_dir, std::vector<std::string>& errors) {
  LogisticSpec s;
  {
    Fields data(f.raw("data"), f.at("data"), errors);
    if (!f.has("data")) f.fail("data", "required (an object with 'csv' or 'synthetic')");
    if (auto csv = data.string("csv")) s.csv = resolve_path(*csv, base_dir);
    s.schema.response = data.string("response").value_or("y");
    if (const Json* preds = data.raw("predictors")) {
      if (!preds->is_array()) {
        data.fail("predictors", "expected an array");
      } else {
        for (std::size_t i = 0; i < preds->size(); ++i) {
          const Json& p = (*preds)[i];
          if (p.is_string()) {
            s.schema.predictors.push_back({p.get<std::string>(), true});
            continue;
          }
          Fields pf(&p, data.at("predictors") + "[" + std::to_string(i) + "]", errors);
          PredictorSpec spec;
          spec.name = pf.string("name").value_or("");
          spec.categorical = pf.boolean("categorical").value_or(true);
          if (spec.name.empty()) pf.fail("name", "required");
          s.schema.predictors.push_back(spec);
        }
      }
    }
    if (data.has("synthetic")) {
      Fields syn(data.raw("synthetic"), data.at("synthetic"), errors);
      SyntheticLogisticSpec g;
      if (auto n = syn.integer("n")) {
        if (*n < 2) syn.fail("n", "must be at least 2");
        g.n = static_cast<std::size_t>(std::max<std::int64_t>(*n, 0));
      }
      g.zero_fraction = syn.real("zero_fraction").value_or(g.zero_fraction);
      g.beta_true = syn.vector("beta_true").value_or(default_beta_true());
      g.seed = syn.unsigned_integer("seed").value_or(g.seed);
      if (!(g.zero_fraction > 0.0 && g.zero_fraction < 1.0)) syn.fail("zero_fraction", "must lie in (0, 1)");
      s.synthetic = g;
    }
    if (s.csv && s.synthetic) data.fail("give either 'csv' or 'synthetic', not both");
    if (f.has("data") && !s.csv && !s.synthetic) data.fail("needs 'csv' or 'synthetic'");
    if (s.csv && s.schema.predictors.empty()) data.fail("predictors", "required with 'csv'");
    if (s.synthetic && (data.has("response") || data.has("predictors"))) {
      data.fail("'response' and 'predictors' apply only to 'csv' data");
    }
  }
  if (auto n = f.integer("subsample_size")) {
    if (*n < 1) f.fail("subsample_size", "must be positive");
    s.subsample_size = static_cast<std::size_t>(std::max<std::int64_t>(*n, 0));
  } else {
    s.subsample_size = 0;  // resolved against the data
  }
  s.subsample_seed = f.unsigned_integer("subsample_seed").value_or(s.subsample_seed);
  s.prior_variance = f.real("prior_variance").value_or(s.prior_variance);
  s.box_halfwidth = f.real("box_halfwidth").value_or(s.box_halfwidth);
  if (!(s.prior_variance > 0.0)) f.fail("prior_variance", "must be positive");
  if (!(s.box_halfwidth > 0.0)) f.fail("box_halfwidth", "must be positive");
  return s;
}

LVPriors parse_priors(Fields& f) {
  LVPriors p;
  p.alpha_max = f.real("alpha_max").value_or(p.alpha_max);
  p.beta_max = f.real("beta_max").value_or(p.beta_max);
  p.gamma_max = f.real("gamma_max").value_or(p.gamma_max);
  p.delta_max = f.real("delta_max").value_or(p.delta_max);
  p.sigma_log_mean = f.real("sigma_log_mean").value_or(p.sigma_log_mean);
  p.sigma_log_sd = f.real("sigma_log_sd").value_or(p.sigma_log_sd);
  p.y0_log_mean = f.real("y0_log_mean").value_or(p.y0_log_mean);
  p.y0_log_sd = f.real("y0_log_sd").value_or(p.y0_log_sd);
  p.lognormal_truncation = f.real("lognormal_truncation").value_or(p.lognormal_truncation);
  p.rate_units_per_year = f.real("rate_units_per_year").value_or(p.rate_units_per_year);
  for (const auto& [key, v] : {std::pair{"alpha_max", p.alpha_max}, {"beta_max", p.beta_max},
                               {"gamma_max", p.gamma_max}, {"delta_max", p.delta_max},
                               {"sigma_log_sd", p.sigma_log_sd}, {"y0_log_sd", p.y0_log_sd},
                               {"lognormal_truncation", p.lognormal_truncation},
                               {"rate_units_per_year", p.rate_units_per_year}}) {
    if (!(v > 0.0) || !std::isfinite(v)) f.fail(key, "must be positive");
  }
  if (!std::isfinite(p.sigma_log_mean)) f.fail("sigma_log_mean", "must be finite");
  if (!std::isfinite(p.y0_log_mean)) f.fail("y0_log_mean", "must be finite");
  return p;
}

LotkaVolterraSpec parse_lv(Fields& f, const std::filesystem::path& base_dir, std::vector<std::string>& errors) {
  LotkaVolterraSpec s;
  {
    Fields data(f.raw("data"), f.at("data"), errors);
    if (!f.has("data")) f.fail("data", "required (an object with 'csv' or 'synthetic')");
    if (auto csv = data.string("csv")) s.csv = resolve_path(*csv, base_dir);
    if (data.has("synthetic")) {
      Fields syn(data.raw("synthetic"), data.at("synthetic"), errors);
      SyntheticLVSpec g;
      g.theta = syn.vector("theta").value_or(default_lv_theta());
      if (auto n = syn.integer("n_years")) {
        if (*n < 1 || *n > 1000) syn.fail("n_years", "must lie in [1, 1000]");
        g.n_years = static_cast<int>(std::clamp<std::int64_t>(*n, 1, 1000));
      }
      g.seed = syn.unsigned_integer("seed").value_or(g.seed);
      g.start_year = syn.real("start_year").value_or(g.start_year);
      if (g.theta.size() != 8) syn.fail("theta", "needs 8 entries");
      s.synthetic = g;
    }
    if (s.csv && s.synthetic) data.fail("give either 'csv' or 'synthetic', not both");
    if (f.has("data") && !s.csv && !s.synthetic) data.fail("needs 'csv' or 'synthetic'");
  }
  if (auto n = f.integer("fine_steps_per_year")) {
    if (*n < 1) f.fail("fine_steps_per_year", "must be positive");
    s.fine_steps_per_year = static_cast<int>(std::max<std::int64_t>(*n, 1));
  }
  if (auto n = f.integer("coarse_steps_per_year")) {
    if (*n < 1) f.fail("coarse_steps_per_year", "must be positive");
    s.coarse_steps_per_year = static_cast<int>(std::max<std::int64_t>(*n, 1));
  }
  if (auto integ = f.string("integrator")) {
    if (*integ == "rk4") {
      s.integrator = Integrator::RK4;
    } else if (*integ == "euler") {
      s.integrator = Integrator::Euler;
    } else {
      f.fail("integrator", "must be 'rk4' or 'euler'");
    }
  }
  Fields pf(f.raw("priors"), f.at("priors"), errors);
  s.priors = parse_priors(pf);
  return s;
}

SolverGrid grid_for(const std::vector<double>& times, int steps_per_year) {
  SolverGrid g;
  g.t_start = 0.0;
  g.step = 1.0 / steps_per_year;
  for (double t : times) g.observation_times.push_back(t - times.front());
  g.t_end = g.observation_times.back();
  g.validate();
  return g;
}

/// Builds the target. Data set problems surface as exceptions.
TargetPtr build_target(TargetSpec& spec, std::optional<CsvTable>& generated) {
  if (auto* s = std::get_if<ShiftedTSpec>(&spec)) {
    return std::make_shared<ShiftedTTarget>(s->mu, ar_scale_matrix(s->variances, s->rho), s->nu, s->truncation_sd);
  }
  if (auto* s = std::get_if<BananaSpec>(&spec)) {
    return std::make_shared<BananaTarget>(s->mu, Matrix(s->variances.asDiagonal()), s->a, s->b, s->truncation_sd);
  }
  if (auto* s = std::get_if<LogisticSpec>(&spec)) {
    LogisticData data;
    if (s->synthetic) {
      SyntheticLogistic syn =
          generate_synthetic_logistic(s->synthetic->n, s->synthetic->zero_fraction, s->synthetic->beta_true,
                                      s->synthetic->seed);
      data = std::move(syn.data);
      generated = std::move(syn.table);
    } else {
      data = load_logistic_csv(*s->csv, s->schema);
    }
    const std::size_t n0 = data.n_zeros();
    if (n0 == 0) throw ValueError("logistic data has no zero responses");
    if (s->subsample_size == 0) s->subsample_size = std::min<std::size_t>(10000, n0);
    if (s->subsample_size > n0) {
      throw ValueError("subsample_size " + std::to_string(s->subsample_size) + " exceeds the " +
                       std::to_string(n0) + " zero responses");
    }
    const auto d = data.X.cols();
    const auto sub = draw_zero_subsample(data, s->subsample_size, s->subsample_seed);
    return std::make_shared<LogisticTarget>(data, sub, s->prior_variance * Matrix::Identity(d, d), s->box_halfwidth);
  }
  auto& s = std::get<LotkaVolterraSpec>(spec);
  ObservationSet obs;
  if (s.synthetic) {
    obs = generate_synthetic_lv(s.synthetic->theta, s.priors, s.synthetic->n_years, s.synthetic->seed,
                                s.synthetic->start_year);
    CsvTable table;
    table.header = {"year", "hare", "lynx"};
    for (std::size_t i = 0; i < obs.size(); ++i) {
      table.rows.push_back(
          {format_real(obs.times[i]), format_real(obs.counts[0][i]), format_real(obs.counts[1][i])});
    }
    generated = std::move(table);
  } else {
    obs = load_lv_csv(*s.csv);
  }
  SolverGrid fine = grid_for(obs.times, s.fine_steps_per_year);
  SolverGrid coarse = grid_for(obs.times, s.coarse_steps_per_year);
  return std::make_shared<LotkaVolterraTarget>(obs, fine, coarse, s.priors, s.integrator);
}

// --- samplers ----------------------------------------------------------------

/// Resolves one sampler object. `target` may be null when the target failed
/// to build; dimension-dependent checks are then skipped.
SamplerConfig parse_sampler(const Json& obj, const std::string& path, const TwoLevelTarget* target,
                            std::vector<std::string>& errors) {
  Fields f(&obj, path, errors);
  SamplerConfig cfg;
  if (auto k = f.string("kernel")) {
    try {
      cfg.kernel = kernel_from_string(*k);
    } catch (const std::invalid_argument&) {
      f.fail("kernel", "must be one of MH, TSMH, AM, TSAM");
    }
  }
  if (auto n = f.integer("n_iters")) {
    if (*n <= 0) f.fail("n_iters", "must be positive");
    cfg.n_iters = *n;
  }
  if (auto b = f.real("burn_in_fraction")) {
    if (!(*b >= 0.0 && *b < 1.0)) f.fail("burn_in_fraction", "must lie in [0, 1)");
    cfg.burn_in_fraction = *b;
  }
  if (auto t = f.integer("thinning")) {
    if (*t < 1) f.fail("thinning", "must be at least 1");
    cfg.thinning = *t;
  }
  const auto initial = f.vector("initial");

  const Eigen::Index d = target ? target->dim() : 0;
  AdaptationConfig defaults;
  if (target) defaults = default_adaptation_config(d, target->support());

  Fields a(f.raw("adaptation"), f.at("adaptation"), errors);
  const auto c = a.real("c");
  const auto c0_diag = a.vector("C0_diagonal");
  const auto c0 = a.matrix("C0");
  const auto t0 = a.integer("t0");
  const auto s_d = a.real("s_d");
  const auto eps = a.real("epsilon");
  const auto K = a.integer("K");
  if ((c ? 1 : 0) + (c0_diag ? 1 : 0) + (c0 ? 1 : 0) > 1) a.fail("give at most one of 'c', 'C0_diagonal', 'C0'");
  if (c && !(*c > 0.0)) a.fail("c", "must be positive");
  if (t0 && *t0 < 1) a.fail("t0", "must be at least 1");
  if (s_d && !(*s_d > 0.0)) a.fail("s_d", "must be positive");
  if (eps && !(*eps > 0.0)) a.fail("epsilon", "must be positive");
  if (K && *K < 1) a.fail("K", "must be at least 1");

  const auto fixed_scale = f.real("fixed_cov_scale");
  const auto fixed_diag = f.vector("fixed_cov_diagonal");
  const auto fixed = f.matrix("fixed_cov");
  if ((fixed_scale ? 1 : 0) + (fixed_diag ? 1 : 0) + (fixed ? 1 : 0) > 1) {
    f.fail("give at most one of 'fixed_cov_scale', 'fixed_cov_diagonal', 'fixed_cov'");
  }
  if (fixed_scale && !(*fixed_scale > 0.0)) f.fail("fixed_cov_scale", "must be positive");

  if (!target) return cfg;

  AdaptationConfig& ad = cfg.adaptation;
  ad.s_d = s_d.value_or(defaults.s_d);
  ad.t0 = t0.value_or(defaults.t0);
  ad.epsilon = eps.value_or(defaults.epsilon);
  ad.K = K.value_or(defaults.K);
  const Matrix I = Matrix::Identity(d, d);
  if (c0) {
    ad.C0 = *c0;
  } else if (c0_diag) {
    ad.C0 = c0_diag->size() == d ? Matrix(c0_diag->asDiagonal()) : I;
    if (c0_diag->size() != d) a.fail("C0_diagonal", "needs " + std::to_string(d) + " entries");
  } else {
    ad.C0 = c.value_or(1.0) * ad.s_d * I;
  }
  if (fixed) {
    cfg.fixed_cov = *fixed;
  } else if (fixed_diag) {
    cfg.fixed_cov = fixed_diag->size() == d ? Matrix(fixed_diag->asDiagonal()) : I;
    if (fixed_diag->size() != d) f.fail("fixed_cov_diagonal", "needs " + std::to_string(d) + " entries");
  } else {
    cfg.fixed_cov = fixed_scale.value_or(ad.s_d) * I;
  }
  for (const auto& [key, m] : {std::pair<const char*, const Matrix*>{"adaptation.C0", &ad.C0}, {"fixed_cov", &cfg.fixed_cov}}) {
    if (m->rows() != d) {
      f.fail(key, "must be " + std::to_string(d) + "×" + std::to_string(d));
      continue;
    }
    try {
      cholesky(*m);
    } catch (const NotPositiveDefinite&) {
      f.fail(key, "must be symmetric positive definite");
    }
  }
  if (initial) {
    if (initial->size() != d) {
      f.fail("initial", "needs " + std::to_string(d) + " entries");
    } else if (!target->support().contains(*initial)) {
      f.fail("initial", "lies outside the target support");
    } else {
      cfg.initial = *initial;
    }
  }
  return cfg;
}

Json sampler_json(const SamplerConfig& s) {
  Json j;
  j["kernel"] = to_string(s.kernel);
  j["n_iters"] = s.n_iters;
  j["burn_in_fraction"] = s.burn_in_fraction;
  j["thinning"] = s.thinning;
  j["adaptation"] = {{"C0", matrix_json(s.adaptation.C0)},
                     {"t0", s.adaptation.t0},
                     {"s_d", s.adaptation.s_d},
                     {"epsilon", s.adaptation.epsilon},
                     {"K", s.adaptation.K}};
  j["fixed_cov"] = matrix_json(s.fixed_cov);
  if (s.initial) j["initial"] = vector_json(*s.initial);
  return j;
}

Json target_json(const TargetSpec& spec) {
  Json j;
  if (const auto* s = std::get_if<ShiftedTSpec>(&spec)) {
    j["type"] = "shifted_t";
    j["mu"] = vector_json(s->mu);
    j["variances"] = vector_json(s->variances);
    j["rho"] = s->rho;
    j["nu"] = s->nu;
    j["truncation_sd"] = s->truncation_sd;
  } else if (const auto* s = std::get_if<BananaSpec>(&spec)) {
    j["type"] = "banana";
    j["mu"] = vector_json(s->mu);
    j["variances"] = vector_json(s->variances);
    j["a"] = s->a;
    j["b"] = s->b;
    j["truncation_sd"] = s->truncation_sd;
  } else if (const auto* s = std::get_if<LogisticSpec>(&spec)) {
    j["type"] = "logistic";
    Json data;
    if (s->csv) {
      data["csv"] = s->csv->string();
      data["response"] = s->schema.response;
      Json preds = Json::array();
      for (const auto& p : s->schema.predictors) preds.push_back({{"name", p.name}, {"categorical", p.categorical}});
      data["predictors"] = preds;
    } else if (s->synthetic) {
      data["synthetic"] = {{"n", s->synthetic->n},
                           {"zero_fraction", s->synthetic->zero_fraction},
                           {"beta_true", vector_json(s->synthetic->beta_true)},
                           {"seed", s->synthetic->seed}};
    }
    j["data"] = data;
    j["subsample_size"] = s->subsample_size;
    j["subsample_seed"] = s->subsample_seed;
    j["prior_variance"] = s->prior_variance;
    j["box_halfwidth"] = s->box_halfwidth;
  } else {
    const auto& lv = std::get<LotkaVolterraSpec>(spec);
    j["type"] = "lotka_volterra";
    Json data;
    if (lv.csv) {
      data["csv"] = lv.csv->string();
    } else if (lv.synthetic) {
      data["synthetic"] = {{"theta", vector_json(lv.synthetic->theta)},
                           {"n_years", lv.synthetic->n_years},
                           {"seed", lv.synthetic->seed},
                           {"start_year", lv.synthetic->start_year}};
    }
    j["data"] = data;
    j["fine_steps_per_year"] = lv.fine_steps_per_year;
    j["coarse_steps_per_year"] = lv.coarse_steps_per_year;
    j["integrator"] = lv.integrator == Integrator::RK4 ? "rk4" : "euler";
    const LVPriors& p = lv.priors;
    j["priors"] = {{"alpha_max", p.alpha_max},
                   {"beta_max", p.beta_max},
                   {"gamma_max", p.gamma_max},
                   {"delta_max", p.delta_max},
                   {"sigma_log_mean", p.sigma_log_mean},
                   {"sigma_log_sd", p.sigma_log_sd},
                   {"y0_log_mean", p.y0_log_mean},
                   {"y0_log_sd", p.y0_log_sd},
                   {"lognormal_truncation", p.lognormal_truncation},
                   {"rate_units_per_year", p.rate_units_per_year}};
  }
  return j;
}

std::optional<ExperimentType> experiment_type_from_string(const std::string& s) {
  if (s == "single-run") return ExperimentType::SingleRun;
  if (s == "mc-estimate") return ExperimentType::McEstimate;
  if (s == "coverage") return ExperimentType::Coverage;
  if (s == "edpm-compare") return ExperimentType::EdpmCompare;
  return std::nullopt;
}

bool valid_projection(const std::string& p, Eigen::Index d) {
  if (p == "log_pi" || p == "pc1" || p == "pc2") return true;
  if (p.rfind("x_", 0) != 0 || p.size() < 3) return false;
  const std::string digits = p.substr(2);
  if (!std::all_of(digits.begin(), digits.end(), [](unsigned char ch) { return std::isdigit(ch); })) return false;
  const long i = std::stol(digits);
  return i >= 1 && (d == 0 || i <= d);
}

void parse_experiment(const Json* obj, const Json& sampler_obj, ExperimentConfig& cfg,
                      std::vector<std::string>& errors) {
  Fields f(obj, "experiment", errors);
  ExperimentSpec& e = cfg.experiment;
  if (auto t = f.string("type")) {
    if (auto parsed = experiment_type_from_string(*t)) {
      e.type = *parsed;
    } else {
      f.fail("type", "must be one of single-run, mc-estimate, coverage, edpm-compare");
    }
  }
  e.n_list = f.integers("n_list").value_or(e.n_list);
  for (auto n : e.n_list) {
    if (n < 1) f.fail("n_list", "entries must be positive");
  }
  if (auto m = f.integer("replicates")) {
    if (*m < 2 || *m > 100000) f.fail("replicates", "must lie in [2, 100000]");
    e.replicates = static_cast<int>(std::clamp<std::int64_t>(*m, 2, 100000));
  }
  {
    Fields ff(f.raw("function"), f.at("function"), errors);
    FunctionSpec& fn = e.function;
    fn.type = ff.string("type").value_or(fn.type);
    fn.amplitude = ff.real("amplitude").value_or(fn.amplitude);
    fn.rate = ff.real("rate").value_or(fn.rate);
    fn.value = ff.real("value").value_or(fn.value);
    if (auto i = ff.integer("index")) fn.index = static_cast<int>(std::clamp<std::int64_t>(*i, -1, INT32_MAX));
    if (fn.type != "exp_sum" && fn.type != "constant" && fn.type != "coordinate") {
      ff.fail("type", "must be one of exp_sum, constant, coordinate");
    }
    if (fn.index < 1 || (cfg.target && fn.index > cfg.target->dim())) ff.fail("index", "out of range");
  }
  if (auto p = f.real("p")) {
    if (!(*p > 0.0 && *p < 1.0)) f.fail("p", "must lie in (0, 1)");
    e.p = *p;
  }
  e.thinning_strategies = f.integers("thinning_strategies").value_or(e.thinning_strategies);
  for (auto k : e.thinning_strategies) {
    if (k < 1) f.fail("thinning_strategies", "entries must be at least 1");
  }
  e.projections = f.strings("projections").value_or(e.projections);
  for (const auto& p : e.projections) {
    if (!valid_projection(p, cfg.target ? cfg.target->dim() : 0)) {
      f.fail("projections", "unknown projection '" + p + "' (log_pi, x_<i>, pc1, pc2)");
    }
  }
  if (auto w = f.integer("workers")) {
    if (*w < 1 || *w > 1024) f.fail("workers", "must lie in [1, 1024]");
    e.workers = static_cast<int>(std::clamp<std::int64_t>(*w, 1, 1024));
  }
  e.write_traces = f.boolean("write_traces").value_or(e.write_traces);

  std::vector<Json> kernel_objs;
  if (const Json* ks = f.raw("kernels")) {
    if (!ks->is_array() || ks->empty()) {
      f.fail("kernels", "expected a nonempty array");
    } else {
      for (std::size_t i = 0; i < ks->size(); ++i) {
        const Json& k = (*ks)[i];
        Json merged = sampler_obj;
        if (k.is_string()) {
          merged["kernel"] = k;
        } else if (k.is_object()) {
          merged.update(k, true);
        } else {
          f.fail("kernels", "entries must be kernel names or sampler objects");
          continue;
        }
        kernel_objs.push_back(std::move(merged));
      }
    }
  } else if (e.type == ExperimentType::EdpmCompare) {
    for (const char* k : {"TSAM", "AM"}) {
      Json merged = sampler_obj;
      merged["kernel"] = k;
      kernel_objs.push_back(std::move(merged));
    }
  } else {
    kernel_objs.push_back(sampler_obj);
  }
  for (std::size_t i = 0; i < kernel_objs.size(); ++i) {
    // Kernel entries inherit the sampler keys; problems already reported
    // under "sampler" are not repeated for every kernel.
    const std::string path = "experiment.kernels[" + std::to_string(i) + "]";
    std::vector<std::string> local;
    e.kernels.push_back(parse_sampler(kernel_objs[i], path, cfg.target.get(), local));
    for (auto& msg : local) {
      const std::string as_base = "sampler" + msg.substr(path.size());
      if (std::find(errors.begin(), errors.end(), as_base) == errors.end()) errors.push_back(std::move(msg));
    }
  }
  if (e.type == ExperimentType::EdpmCompare && e.kernels.size() != 2) {
    f.fail("kernels", "edpm-compare needs exactly two kernels");
  }
  if (e.type == ExperimentType::Coverage && !std::holds_alternative<BananaSpec>(cfg.target_spec)) {
    f.fail("type", "coverage runs need a banana target");
  }
}

std::pair<int, int> line_column(const std::string& text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

std::string to_string(ExperimentType t) {
  switch (t) {
    case ExperimentType::SingleRun: return "single-run";
    case ExperimentType::McEstimate: return "mc-estimate";
    case ExperimentType::Coverage: return "coverage";
    case ExperimentType::EdpmCompare: return "edpm-compare";
  }
  return "?";
}

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  sampler.seed = s;
  for (auto& k : experiment.kernels) k.seed = s;
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const std::string& source_name) {
  Json root;
  try {
    root = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError(source_name + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + e.what());
  }

  std::vector<std::string> errors;
  ExperimentConfig cfg;
  {
    Fields top(&root, "", errors);
    if (!root.is_object()) throw ValidationError({"config: top level must be an object"});

    cfg.seed = top.unsigned_integer("seed").value_or(cfg.seed);
    cfg.output_dir = top.string("output_dir").value_or(cfg.output_dir.string());

    const Json* target_obj = top.raw("target");
    bool target_ok = false;
    if (!target_obj) {
      errors.emplace_back("target: required");
    } else {
      Fields tf(target_obj, "target", errors);
      const std::size_t before = errors.size();
      const auto type = tf.string("type");
      if (!type) {
        tf.fail("type", "required (shifted_t, banana, logistic, lotka_volterra)");
      } else if (*type == "shifted_t") {
        cfg.target_spec = parse_shifted_t(tf);
      } else if (*type == "banana") {
        cfg.target_spec = parse_banana(tf);
      } else if (*type == "logistic") {
        cfg.target_spec = parse_logistic(tf, base_dir, errors);
      } else if (*type == "lotka_volterra") {
        cfg.target_spec = parse_lv(tf, base_dir, errors);
      } else {
        tf.fail("type", "unknown target '" + *type + "'");
      }
      target_ok = errors.size() == before && type.has_value();
    }
    if (target_ok) {
      try {
        cfg.target = build_target(cfg.target_spec, cfg.generated_data);
      } catch (const std::exception& e) {
        errors.push_back(std::string("target: ") + e.what());
      }
    }

    Json sampler_obj = Json::object();
    if (const Json* s = top.raw("sampler")) {
      if (s->is_object()) {
        sampler_obj = *s;
      } else {
        errors.emplace_back("sampler: expected an object");
      }
    }
    cfg.sampler = parse_sampler(sampler_obj, "sampler", cfg.target.get(), errors);
    parse_experiment(top.raw("experiment"), sampler_obj, cfg, errors);
  }

  if (!errors.empty()) throw ValidationError(std::move(errors));
  cfg.set_seed(cfg.seed);
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(ss.str(), base, path.filename().string());
}

std::string effective_config_json(const ExperimentConfig& cfg) {
  Json j;
  j["seed"] = cfg.seed;
  j["output_dir"] = cfg.output_dir.string();
  j["target"] = target_json(cfg.target_spec);
  j["sampler"] = sampler_json(cfg.sampler);
  const ExperimentSpec& e = cfg.experiment;
  Json ex;
  ex["type"] = to_string(e.type);
  Json kernels = Json::array();
  for (const auto& k : e.kernels) kernels.push_back(sampler_json(k));
  ex["kernels"] = kernels;
  ex["n_list"] = e.n_list;
  ex["replicates"] = e.replicates;
  ex["function"] = {{"type", e.function.type},
                    {"amplitude", e.function.amplitude},
                    {"rate", e.function.rate},
                    {"value", e.function.value},
                    {"index", e.function.index}};
  ex["p"] = e.p;
  ex["thinning_strategies"] = e.thinning_strategies;
  ex["projections"] = e.projections;
  ex["workers"] = e.workers;
  ex["write_traces"] = e.write_traces;
  j["experiment"] = ex;
  return j.dump(2) + "\n";
}

}  // namespace tsam
