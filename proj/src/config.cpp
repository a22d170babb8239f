#include "pfield/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "pfield/partition1d.hpp"
#include "pfield/renewal.hpp"

namespace pfield {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError(path + ": " + what);
}

// Object reader that remembers which keys were consumed.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(where(), "expected an object");
  }

  bool has(const char* key) const { return j_.contains(key); }
  std::string at(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  const json& get(const char* key) {
    used_.insert(key);
    if (!j_.contains(key)) fail(at(key), "required");
    return j_.at(key);
  }

  double number(const char* key) {
    const json& v = get(key);
    if (!v.is_number()) fail(at(key), "expected a number");
    return v.get<double>();
  }
  std::int64_t integer(const char* key) {
    const json& v = get(key);
    if (!v.is_number_integer()) fail(at(key), "expected an integer");
    return v.get<std::int64_t>();
  }
  std::string string(const char* key) {
    const json& v = get(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  std::vector<double> numbers(const char* key) {
    const json& v = get(key);
    if (!v.is_array()) fail(at(key), "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }
  std::vector<std::int64_t> integers(const char* key) {
    const json& v = get(key);
    if (!v.is_array()) fail(at(key), "expected an array");
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number_integer()) fail(at(key) + "[" + std::to_string(i) + "]", "expected an integer");
      out.push_back(v[i].get<std::int64_t>());
    }
    return out;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) fail(at(it.key().c_str()), "unknown field");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

MarginalLaw parse_marginal(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string kind = r.string("kind");
  MarginalLaw law;
  try {
    if (kind == "RademacherSign") {
      law = MarginalLaw::rademacher();
    } else if (kind == "ScaledSign") {
      law = MarginalLaw::scaled_sign(r.number("c"));
    } else if (kind == "TwoPoint") {
      const double a = r.number("a"), b = r.number("b"), p = r.number("p");
      law = MarginalLaw::two_point(a, b, p);
    } else {
      fail(r.at("kind"), "unknown marginal kind '" + kind + "'");
    }
  } catch (const std::domain_error& e) {
    fail(path, e.what());
  }
  r.finish();
  return law;
}

ModelSpec parse_model(const json& j) {
  Reader r(j, "model");
  ModelSpec spec;
  const std::string kind = r.string("kind");
  const auto k = parse_model_kind(kind);
  if (!k) fail("model.kind", "unknown model kind '" + kind + "'");
  spec.kind = *k;
  spec.alphas = r.numbers("alphas");
  spec.n = r.integers("n");
  if (r.has("forest_depth")) spec.forest_depth = r.integers("forest_depth");
  if (r.has("marginal")) spec.marginal = parse_marginal(r.get("marginal"), "model.marginal");
  r.finish();
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

CornerGrid parse_grid(const json& j, bool two_d) {
  Reader r(j, "grid");
  CornerGrid g;
  g.t1 = r.numbers("t1");
  if (r.has("t2")) g.t2 = r.numbers("t2");
  r.finish();
  try {
    g.validate(two_d);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return g;
}

CornerGrid default_grid(bool two_d) {
  CornerGrid g;
  g.t1 = {0.25, 0.5, 0.75, 1.0};
  if (two_d) g.t2 = g.t1;
  return g;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_or_null(x));
  return a;
}

}  // namespace

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.model == b.model && a.grid == b.grid && a.R == b.R &&
         a.seed == b.seed && a.output == b.output && a.format == b.format && a.suite == b.suite &&
         a.renewal == b.renewal && a.hurst == b.hurst;
}

RunConfig parse_run_config(const json& j) {
  Reader r(j, "");
  RunConfig cfg;
  cfg.command = r.string("command");
  static const std::set<std::string> commands = {"simulate", "verify", "renewal", "sample-fbs"};
  if (!commands.count(cfg.command)) fail("command", "unknown command '" + cfg.command + "'");

  if (r.has("model")) cfg.model = parse_model(r.get("model"));
  const bool two_d = cfg.model ? cfg.model->dims() == 2
                               : (!r.has("grid") || j.at("grid").contains("t2"));
  cfg.grid = r.has("grid") ? parse_grid(r.get("grid"), two_d) : default_grid(two_d);
  if (r.has("R")) {
    const std::int64_t R = r.integer("R");
    if (R < 1) fail("R", "must be >= 1");
    cfg.R = static_cast<std::size_t>(R);
  }
  if (r.has("seed")) {
    try {
      cfg.seed = Seed128::from_hex(r.string("seed"));
    } catch (const std::invalid_argument& e) {
      fail("seed", e.what());
    }
  }
  if (r.has("parallelism")) {
    const std::int64_t p = r.integer("parallelism");
    if (p < 1) fail("parallelism", "must be >= 1");
    cfg.parallelism = static_cast<std::size_t>(p);
  }
  if (r.has("output")) cfg.output = r.string("output");
  if (r.has("format")) {
    cfg.format = r.string("format");
    if (cfg.format != "csv" && cfg.format != "json") fail("format", "must be 'csv' or 'json'");
  }
  if (r.has("suite")) cfg.suite = r.string("suite");
  if (r.has("renewal")) {
    Reader rr(r.get("renewal"), "renewal");
    RenewalRequest req;
    req.alpha = rr.number("alpha");
    req.kmax = rr.integer("kmax");
    if (rr.has("n")) req.n = rr.integer("n");
    rr.finish();
    if (!(req.alpha > 0.0 && req.alpha < 0.5)) fail("renewal.alpha", "must lie in (0,1/2)");
    if (req.kmax < 1) fail("renewal.kmax", "must be >= 1");
    if (req.n < 0) fail("renewal.n", "must be >= 0");
    if (req.n > 0 && req.kmax < 16 * req.n) fail("renewal.kmax", "must be >= 16 n when n is given");
    cfg.renewal = req;
  }
  if (r.has("hurst")) {
    Reader hr(r.get("hurst"), "hurst");
    HurstPair H;
    H.H1 = hr.number("H1");
    if (hr.has("H2")) H.H2 = hr.number("H2");
    hr.finish();
    try {
      H.validate();
    } catch (const std::domain_error& e) {
      fail("hurst", e.what());
    }
    cfg.hurst = H;
  }
  r.finish();

  if (cfg.command == "simulate" || cfg.command == "verify") {
    if (!cfg.model && !(cfg.command == "verify" && cfg.suite == "renewal-asymptotics" && cfg.renewal)) {
      fail("model", "required");
    }
  }
  if (cfg.command == "verify") {
    if (cfg.suite.empty()) fail("suite", "required");
    const auto& s = verify_suites();
    if (std::find(s.begin(), s.end(), cfg.suite) == s.end()) fail("suite", "unknown suite '" + cfg.suite + "'");
  }
  if (cfg.command == "renewal" && !cfg.renewal) fail("renewal", "required");
  if (cfg.command == "sample-fbs" && !cfg.hurst) fail("hurst", "required");
  return cfg;
}

RunConfig parse_run_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  return parse_run_config(j);
}

json to_json(const ModelSpec& spec) {
  json j;
  j["kind"] = to_string(spec.kind);
  j["alphas"] = spec.alphas;
  j["n"] = spec.n;
  if (!spec.forest_depth.empty()) j["forest_depth"] = spec.forest_depth;
  const MarginalLaw& m = spec.marginal;
  json mj;
  mj["kind"] = to_string(m.kind());
  if (m.kind() == MarginalLaw::Kind::ScaledSign) mj["c"] = m.a();
  if (m.kind() == MarginalLaw::Kind::TwoPoint) {
    mj["a"] = m.a();
    mj["b"] = m.b();
    mj["p"] = m.p();
  }
  j["marginal"] = mj;
  return j;
}

json to_json(const CornerGrid& grid) {
  json j;
  j["t1"] = grid.t1;
  if (!grid.t2.empty()) j["t2"] = grid.t2;
  return j;
}

json to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  if (cfg.model) j["model"] = to_json(*cfg.model);
  j["grid"] = to_json(cfg.grid);
  j["R"] = cfg.R;
  j["seed"] = cfg.seed.to_hex();
  j["output"] = cfg.output;
  j["format"] = cfg.format;
  if (!cfg.suite.empty()) j["suite"] = cfg.suite;
  if (cfg.renewal) {
    json r;
    r["alpha"] = cfg.renewal->alpha;
    r["kmax"] = cfg.renewal->kmax;
    if (cfg.renewal->n > 0) r["n"] = cfg.renewal->n;
    j["renewal"] = r;
  }
  if (cfg.hurst) j["hurst"] = {{"H1", cfg.hurst->H1}, {"H2", cfg.hurst->H2}};
  return j;
}

json to_json(const ReplicateReport& rep) {
  json j;
  j["R"] = rep.R;
  j["model"] = to_json(rep.model);
  j["grid"] = to_json(rep.grid);
  j["seeds"] = {{"base", rep.base_seed.to_hex()}, {"scheme", rep.seed_scheme}};
  j["dim"] = rep.dim;
  j["normalization"] = rep.normalization;
  j["sigma"] = rep.sigma;
  j["mean_vec"] = numbers_json(rep.mean_vec);
  j["cov_mat"] = numbers_json(rep.cov_mat);
  j["cov_se"] = numbers_json(rep.cov_se);
  j["analytic_cov"] = numbers_json(rep.analytic_cov);
  json ks = json::array();
  for (const KsResult& k : rep.ks) {
    ks.push_back({{"statistic", k.statistic}, {"p_value", k.p_value}, {"n", k.n}, {"degenerate", k.degenerate}});
  }
  j["ks"] = ks;
  j["max_truncation_bound"] = number_or_null(rep.max_truncation_bound);
  return j;
}

json to_json(const IdentityRecord& rec) {
  return {{"name", rec.name},
          {"kind", rec.kind},
          {"analytic", number_or_null(rec.analytic)},
          {"mc", number_or_null(rec.mc)},
          {"se", number_or_null(rec.se)},
          {"exact_finite_n", number_or_null(rec.exact_finite_n)},
          {"allowance", number_or_null(rec.allowance)},
          {"pass", rec.pass}};
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

bool VerifyResult::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckRow& c) { return c.pass || !c.gating; });
}

std::string checks_csv(const std::vector<CheckRow>& rows) {
  std::string out = "test,analytic,estimate,se,pass,gating\n";
  for (const CheckRow& c : rows) {
    out += c.test + "," + format_double(c.analytic) + "," + format_double(c.estimate) + "," +
           format_double(c.se) + "," + (c.pass ? "1" : "0") + "," + (c.gating ? "1" : "0") + "\n";
  }
  return out;
}

namespace {

CheckRow ratio_row(std::string name, double target, double estimate, double rel_tol, bool gating = true) {
  CheckRow c;
  c.test = std::move(name);
  c.analytic = target;
  c.estimate = estimate;
  c.se = std::numeric_limits<double>::quiet_NaN();
  c.pass = std::abs(estimate / target - 1.0) <= rel_tol;
  c.gating = gating;
  return c;
}

CheckRow identity_row(const IdentityRecord& rec) {
  CheckRow c;
  c.test = rec.name + (rec.kind == "asymptotic" ? "_asymptotic" : "_exact");
  c.analytic = rec.analytic;
  c.estimate = rec.mc;
  c.se = rec.se;
  c.pass = rec.pass;
  return c;
}

std::size_t workers(const RunConfig& cfg) { return cfg.parallelism == 0 ? 1 : cfg.parallelism; }

void require_kind(const ModelSpec& spec, std::initializer_list<ModelKind> kinds, const char* suite) {
  if (std::find(kinds.begin(), kinds.end(), spec.kind) == kinds.end()) {
    fail("model.kind", std::string("suite ") + suite + " does not support " + to_string(spec.kind));
  }
}

VerifyResult verify_occupancy(const RunConfig& cfg) {
  const ModelSpec& spec = *cfg.model;
  require_kind(spec, {ModelKind::Karlin1D, ModelKind::GeneralizedKarlin1D}, "occupancy");
  const double a = spec.alphas[0];
  const auto n = static_cast<std::size_t>(spec.n[0]);
  if (n < 4) fail("model.n", "occupancy suite needs n >= 4");
  const PowerLawPmf pmf = make_karlin_pmf(a);
  RandomStream rng(split_seed(cfg.seed, 0), 1);
  const UrnPath path = sample_urn(pmf, n, rng);
  const OccupancySummary occ = occupancy(path);
  const OccupancySummary inc = occupancy_increment(path, n / 4, (3 * n) / 4);
  const ExpectedOccupancy ex = expected_occupancy(pmf, n);
  const double scale = std::pow(static_cast<double>(n), a) * pmf.sv_constant();
  const double g = std::tgamma(1.0 - a);

  VerifyResult out;
  out.suite = "occupancy";
  out.checks.push_back(ratio_row("K_n_over_scale", g, static_cast<double>(occ.K_n) / scale, 0.10));
  out.checks.push_back(ratio_row("K_odd_over_K_n", std::exp2(a - 1.0),
                                 static_cast<double>(occ.K_odd) / static_cast<double>(occ.K_n), 0.05));
  out.checks.push_back(ratio_row("K_increment_over_scale", std::pow(0.5, a) * g,
                                 static_cast<double>(inc.K_n) / scale, 0.10));
  out.checks.push_back(ratio_row("Phi_n_over_scale", g, ex.Phi_n / scale, 0.10));
  out.checks.push_back(ratio_row("K_n_vs_Phi_n", ex.Phi_n, static_cast<double>(occ.K_n), 0.10, false));
  out.checks.push_back(ratio_row("K_odd_vs_EK_odd", ex.EK_odd, static_cast<double>(occ.K_odd), 0.10, false));
  json hist = json::object();
  for (const auto& [r, c] : occ.K_n_r) hist[std::to_string(r)] = c;
  out.report = {{"n", occ.n},
                {"K_n", occ.K_n},
                {"K_odd", occ.K_odd},
                {"K_n_r", hist},
                {"Phi_n", ex.Phi_n},
                {"EK_odd", ex.EK_odd},
                {"sv_constant", pmf.sv_constant()}};
  return out;
}

VerifyResult verify_variance(const RunConfig& cfg) {
  const ModelSpec& spec = *cfg.model;
  if (cfg.R < 2) fail("R", "variance suite needs R >= 2");
  CornerGrid grid;
  grid.t1 = {1.0};
  if (spec.dims() == 2) grid.t2 = {1.0};
  const ReplicateReport rep = run_replicates(spec, grid, cfg.R, cfg.seed, workers(cfg), false);
  VerifyResult out;
  out.suite = "variance";
  json ids = json::array();
  auto add = [&](IdentityName name) {
    const IdentityRecord rec = check_identity(name, spec, rep.raw_last, rep.max_truncation_bound);
    out.checks.push_back(identity_row(rec));
    ids.push_back(to_json(rec));
  };
  switch (spec.kind) {
    case ModelKind::Karlin1D:
    case ModelKind::GeneralizedKarlin1D:
      add(IdentityName::KarlinVar);
      break;
    case ModelKind::HS1D:
    case ModelKind::GeneralizedHS1D:
      add(IdentityName::HsVar);
      break;
    case ModelKind::HS2D:
      add(IdentityName::Hs2dVar);
      break;
    case ModelKind::Combined2D:
      add(IdentityName::CombinedVar);
      break;
    case ModelKind::Karlin2D:
      break;
  }
  if (spec.dims() == 2) {
    // Exact finite-n product identity, plus the asymptotic target for Karlin2D.
    const double R = static_cast<double>(rep.R);
    double mean = pairwise_sum(rep.raw_last) / R;
    std::vector<double> d(rep.raw_last.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (rep.raw_last[i] - mean) * (rep.raw_last[i] - mean);
    const double mc = pairwise_sum(d) / (R - 1.0);
    const double se = mc * std::sqrt(2.0 / (R - 1.0));
    const double exact = exact_variance(spec);
    double allowance = 0.0;
    if (spec.kind != ModelKind::Karlin2D) {
      // First-order truncation allowance: the 1D allowance of each forest
      // direction times the exact variance of the other direction.
      ModelSpec d1 = spec;
      d1.kind = ModelKind::HS1D;
      d1.alphas = {spec.alphas[0]};
      d1.n = {spec.n[0]};
      d1.forest_depth = spec.forest_depth.empty() ? std::vector<std::int64_t>{} : std::vector<std::int64_t>{spec.forest_depth[0]};
      const double v1 = exact_variance(d1);
      const double n1 = static_cast<double>(spec.n[0]), n2 = static_cast<double>(spec.n[1]);
      const double b = rep.max_truncation_bound;
      allowance = 2.0 * b * n1 * n1 * (exact / v1);
      if (spec.kind == ModelKind::HS2D) allowance += 2.0 * b * n2 * n2 * v1;
    }
    CheckRow exact_row;
    exact_row.test = to_string(spec.kind) + "Var_exact";
    exact_row.analytic = exact;
    exact_row.estimate = mc;
    exact_row.se = se;
    exact_row.pass = std::abs(mc - exact) <= 3.0 * se + allowance;
    out.checks.push_back(exact_row);
    if (spec.kind == ModelKind::Karlin2D) {
      const double z = normalization(spec).z;
      CheckRow asym;
      asym.test = "Karlin2dVar_asymptotic";
      asym.analytic = z * z;
      asym.estimate = mc;
      asym.se = se;
      asym.pass = std::abs(mc - z * z) <= 3.0 * se + 0.1 * z * z;
      out.checks.push_back(asym);
    }
  }
  out.report = {{"identities", ids}, {"replicates", to_json(rep)}};
  return out;
}

VerifyResult verify_covariance(const RunConfig& cfg) {
  if (cfg.R < 100) fail("R", "covariance suite needs R >= 100");
  const ReplicateReport rep = run_replicates(*cfg.model, cfg.grid, cfg.R, cfg.seed, workers(cfg), false);
  VerifyResult out;
  out.suite = "covariance";
  for (std::size_t i = 0; i < rep.dim; ++i) {
    for (std::size_t j = i; j < rep.dim; ++j) {
      const std::size_t k = i * rep.dim + j;
      CheckRow c;
      c.test = "cov[" + std::to_string(i) + "," + std::to_string(j) + "]";
      c.analytic = rep.analytic_cov[k];
      c.estimate = rep.cov_mat[k];
      c.se = rep.cov_se[k];
      c.pass = std::abs(c.estimate - c.analytic) <= 0.05 + 3.0 * c.se;
      out.checks.push_back(c);
    }
  }
  out.report = {{"replicates", to_json(rep)}};
  return out;
}

VerifyResult verify_normality(const RunConfig& cfg) {
  if (cfg.R < 100) fail("R", "normality suite needs R >= 100");
  const ModelSpec& spec = *cfg.model;
  const ReplicateReport rep = run_replicates(spec, cfg.grid, cfg.R, cfg.seed, workers(cfg), false);
  VerifyResult out;
  out.suite = "normality";
  const double sd = std::sqrt(exact_variance(spec));
  std::vector<double> z(rep.raw_last.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = rep.raw_last[i] / sd;
  const KsResult ks = ks_normal(z, 1.0);
  CheckRow c;
  c.test = "ks_standardized_S_n";
  c.analytic = 0.001;
  c.estimate = ks.p_value;
  c.se = ks.statistic;
  c.pass = !ks.degenerate && ks.p_value > 0.001;
  out.checks.push_back(c);
  for (std::size_t i = 0; i < rep.ks.size(); ++i) {
    CheckRow d;
    d.test = "ks_limit_corner[" + std::to_string(i) + "]";
    d.analytic = 0.001;
    d.estimate = rep.ks[i].p_value;
    d.se = rep.ks[i].statistic;
    d.pass = !rep.ks[i].degenerate && rep.ks[i].p_value > 0.001;
    d.gating = false;
    out.checks.push_back(d);
  }
  out.report = {{"standardized_ks", {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"exact_sd", sd}}},
                {"replicates", to_json(rep)}};
  return out;
}

VerifyResult verify_renewal(const RunConfig& cfg) {
  double alpha = 0.0;
  std::int64_t n = 0;
  if (cfg.renewal) {
    alpha = cfg.renewal->alpha;
    n = cfg.renewal->n;
  } else {
    const ModelSpec& spec = *cfg.model;
    if (!spec.direction_is_hs(0)) fail("model.kind", "renewal-asymptotics needs an HS direction");
    alpha = spec.alphas[0];
    n = spec.n[0];
  }
  if (n < 2) fail("renewal.n", "renewal-asymptotics needs n >= 2");
  const auto kmax = static_cast<std::size_t>(16 * 2 * n);
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(alpha), kmax);
  const double C = c_alpha(alpha);
  const double bn = weight_sum_sq(rs, n, static_cast<std::size_t>(16 * n));
  const double b2n = weight_sum_sq(rs, 2 * n, kmax);
  const double nd = static_cast<double>(n);
  const RenewalSummary& summary = renewal_summary(alpha);
  const XstarVariance vx = var_xstar(renewal_sequence(make_hs_pmf(alpha), std::max<std::size_t>(kmax, 1000000)));
  const DoublingDiagnostic dd = weight_doubling_check(alpha, n, static_cast<std::size_t>(16 * n));

  VerifyResult out;
  out.suite = "renewal-asymptotics";
  out.checks.push_back(ratio_row("b_n_sq_over_C_alpha_n_pow", 1.0, bn / (C * std::pow(nd, 2.0 * alpha + 1.0)), 0.10));
  out.checks.push_back(ratio_row("b_2n_sq_over_b_n_sq", std::exp2(2.0 * alpha + 1.0), b2n / bn, 0.05));
  CheckRow conv;
  conv.test = "q_tail_increment";
  conv.analytic = 1e-8;
  conv.estimate = vx.tail_increment;
  conv.se = std::numeric_limits<double>::quiet_NaN();
  conv.pass = vx.tail_increment < 1e-8;
  out.checks.push_back(conv);
  CheckRow vxr;
  vxr.test = "var_xstar_in_unit_interval";
  vxr.analytic = 1.0;
  vxr.estimate = vx.value;
  vxr.se = std::numeric_limits<double>::quiet_NaN();
  vxr.pass = vx.value > 0.0 && vx.value <= 1.0;
  out.checks.push_back(vxr);
  out.checks.push_back(ratio_row("kmax_doubling_change", 1.0, 1.0 + dd.relative_change, 0.01, false));
  // Continuum limit of b_n^2 / n^(2a+1) for q_k ~ sin(pi a)/pi k^(a-1).
  const double pi = std::numbers::pi;
  const double s = std::sin(pi * alpha);
  const double K_cont = s * s * std::tgamma(alpha) * std::tgamma(alpha) /
                        (pi * pi * std::tgamma(2.0 * alpha + 2.0) * std::cos(pi * alpha));
  out.checks.push_back(ratio_row("b_n_sq_over_continuum_constant", 1.0,
                                 bn / (K_cont * std::pow(nd, 2.0 * alpha + 1.0)), 0.10, false));
  out.report = {{"alpha", alpha},
                {"n", n},
                {"kmax", 16 * n},
                {"C_alpha", C},
                {"b_n_sq", bn},
                {"b_2n_sq", b2n},
                {"sum_q_sq", summary.sum_sq},
                {"var_xstar", vx.value},
                {"continuum_constant", K_cont},
                {"doubling_relative_change", dd.relative_change}};
  return out;
}

}  // namespace

VerifyResult run_verify(const RunConfig& cfg) {
  if (cfg.suite != "renewal-asymptotics" && !cfg.model) fail("model", "required");
  VerifyResult out;
  if (cfg.suite == "occupancy") {
    out = verify_occupancy(cfg);
  } else if (cfg.suite == "variance") {
    out = verify_variance(cfg);
  } else if (cfg.suite == "covariance") {
    out = verify_covariance(cfg);
  } else if (cfg.suite == "normality") {
    out = verify_normality(cfg);
  } else if (cfg.suite == "renewal-asymptotics") {
    out = verify_renewal(cfg);
  } else {
    fail("suite", "unknown suite '" + cfg.suite + "'");
  }
  json checks = json::array();
  for (const CheckRow& c : out.checks) {
    checks.push_back({{"test", c.test},
                      {"analytic", number_or_null(c.analytic)},
                      {"estimate", number_or_null(c.estimate)},
                      {"se", number_or_null(c.se)},
                      {"pass", c.pass},
                      {"gating", c.gating}});
  }
  out.report = {{"tool", version_string()},
                {"suite", out.suite},
                {"config", to_json(cfg)},
                {"checks", checks},
                {"all_pass", out.all_pass()},
                {"details", out.report}};
  return out;
}

}  // namespace pfield
