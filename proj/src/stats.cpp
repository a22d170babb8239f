#include "pfield/stats.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "pfield/fbs.hpp"

namespace pfield {

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

double ks_statistic(std::span<const double> samples, double sigma) {
  std::vector<double> x(samples.begin(), samples.end());
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double F = 0.5 * std::erfc(-x[i] / (sigma * std::numbers::sqrt2));
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  return d;
}

double kolmogorov_tail(double lambda) {
  if (lambda <= 0.0) return 1.0;
  const double pi = std::numbers::pi;
  if (lambda < 1.18) {
    // Jacobi form converges fast for small lambda.
    const double c = std::sqrt(2.0 * pi) / lambda;
    double s = 0.0;
    for (int k = 1; k < 100; ++k) {
      const double odd = 2.0 * k - 1.0;
      const double term = std::exp(-odd * odd * pi * pi / (8.0 * lambda * lambda));
      s += term;
      if (term < 1e-12 * s) break;
    }
    return std::clamp(1.0 - c * s, 0.0, 1.0);
  }
  double s = 0.0;
  for (int k = 1; k < 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += (k & 1) ? term : -term;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

KsResult ks_normal(std::span<const double> samples, double sigma) {
  if (samples.size() < 100) throw std::invalid_argument("ks_normal needs at least 100 samples");
  if (!(sigma > 0.0)) throw std::invalid_argument("ks_normal needs sigma > 0");
  KsResult r;
  r.n = samples.size();
  r.statistic = ks_statistic(samples, sigma);
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    r.degenerate = true;
    r.p_value = 0.0;
    return r;
  }
  const double sn = std::sqrt(static_cast<double>(r.n));
  r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * r.statistic);
  return r;
}

CovEstimate empirical_cov(std::span<const double> rows, std::size_t dim) {
  if (dim == 0 || rows.size() % dim != 0) throw std::invalid_argument("empirical_cov: length mismatch");
  const std::size_t R = rows.size() / dim;
  if (R < 2) throw std::invalid_argument("empirical_cov needs at least 2 vectors");
  CovEstimate out;
  out.dim = dim;
  out.mean.resize(dim);
  std::vector<double> col(R);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t r = 0; r < R; ++r) col[r] = rows[r * dim + i];
    out.mean[i] = pairwise_sum(col) / static_cast<double>(R);
  }
  out.cov.assign(dim * dim, 0.0);
  out.se.assign(dim * dim, std::numeric_limits<double>::quiet_NaN());
  const double Rd = static_cast<double>(R);
  std::vector<double> u(R);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i; j < dim; ++j) {
      for (std::size_t r = 0; r < R; ++r) {
        u[r] = (rows[r * dim + i] - out.mean[i]) * (rows[r * dim + j] - out.mean[j]);
      }
      const double S = pairwise_sum(u);
      out.cov[i * dim + j] = out.cov[j * dim + i] = S / (Rd - 1.0);
      if (R >= 3) {
        // Leave-one-out: C_(r) = (S - R/(R-1) u_r) / (R-2).
        const double ubar = S / Rd;
        for (std::size_t r = 0; r < R; ++r) u[r] = (u[r] - ubar) * (u[r] - ubar);
        const double f = Rd / ((Rd - 1.0) * (Rd - 2.0));
        const double var = (Rd - 1.0) / Rd * f * f * pairwise_sum(u);
        out.se[i * dim + j] = out.se[j * dim + i] = std::sqrt(var);
      }
    }
  }
  return out;
}

CovEstimate empirical_cov(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) throw std::invalid_argument("empirical_cov needs at least 2 vectors");
  const std::size_t dim = vectors[0].size();
  std::vector<double> flat;
  flat.reserve(dim * vectors.size());
  for (const auto& v : vectors) {
    if (v.size() != dim) throw std::invalid_argument("empirical_cov: length mismatch");
    flat.insert(flat.end(), v.begin(), v.end());
  }
  return empirical_cov(flat, dim);
}

void parallel_for(std::size_t R, std::size_t parallelism,
                  const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::clamp<std::size_t>(parallelism, 1, std::max<std::size_t>(R, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t r = next.fetch_add(1);
      if (r >= R) return;
      try {
        body(r);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(R);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

ReplicateReport run_replicates(const ModelSpec& spec, const CornerGrid& grid, std::size_t R,
                               Seed128 base_seed, std::size_t parallelism, bool keep_samples) {
  if (R < 2) throw std::invalid_argument("run_replicates needs R >= 2");
  spec.validate();
  grid.validate(spec.dims() == 2);
  const std::size_t dim = grid.t1.size() * (spec.dims() == 2 ? grid.t2.size() : 1);
  // Warm shared caches before the workers start.
  const Normalization norm = normalization(spec);

  std::vector<double> rows(R * dim);
  std::vector<double> bounds(R, 0.0);
  std::vector<double> last(R);
  parallel_for(R, parallelism, [&](std::size_t r) {
    const FieldSample s = simulate(spec, grid, split_seed(base_seed, r));
    std::copy(s.normalized.begin(), s.normalized.end(), rows.begin() + static_cast<std::ptrdiff_t>(r * dim));
    bounds[r] = s.truncation_error_bound;
    last[r] = s.raw.back();
  });

  ReplicateReport rep;
  rep.R = R;
  rep.model = spec;
  rep.grid = grid;
  rep.base_seed = base_seed;
  rep.dim = dim;
  rep.normalization = norm.z;
  rep.sigma = norm.sigma;
  CovEstimate est = empirical_cov(rows, dim);
  rep.mean_vec = std::move(est.mean);
  rep.cov_mat = std::move(est.cov);
  rep.cov_se = std::move(est.se);
  rep.analytic_cov = limit_gram(hurst_of(spec), grid);
  rep.max_truncation_bound = *std::max_element(bounds.begin(), bounds.end());
  if (R >= 100) {
    std::vector<double> col(R);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t r = 0; r < R; ++r) col[r] = rows[r * dim + i];
      rep.ks.push_back(ks_normal(col, std::sqrt(rep.analytic_cov[i * dim + i])));
    }
  }
  rep.raw_last = std::move(last);
  if (keep_samples) rep.normalized = std::move(rows);
  return rep;
}

std::string to_string(IdentityName name) {
  switch (name) {
    case IdentityName::KarlinVar:
      return "KarlinVar";
    case IdentityName::HsVar:
      return "HsVar";
    case IdentityName::Hs2dVar:
      return "Hs2dVar";
    case IdentityName::CombinedVar:
      return "CombinedVar";
  }
  return "?";
}

namespace {
void require_identity_model(IdentityName name, const ModelSpec& spec) {
  bool ok = false;
  switch (name) {
    case IdentityName::KarlinVar:
      ok = spec.kind == ModelKind::Karlin1D || spec.kind == ModelKind::GeneralizedKarlin1D;
      break;
    case IdentityName::HsVar:
      ok = spec.kind == ModelKind::HS1D || spec.kind == ModelKind::GeneralizedHS1D;
      break;
    case IdentityName::Hs2dVar:
      ok = spec.kind == ModelKind::HS2D;
      break;
    case IdentityName::CombinedVar:
      ok = spec.kind == ModelKind::Combined2D;
      break;
  }
  if (!ok) throw std::invalid_argument(to_string(name) + " does not apply to " + to_string(spec.kind));
}
}  // namespace

IdentityRecord check_identity(IdentityName name, const ModelSpec& spec, std::span<const double> raw,
                              double truncation_bound) {
  require_identity_model(name, spec);
  if (raw.size() < 2) throw std::invalid_argument("check_identity needs R >= 2");
  const double R = static_cast<double>(raw.size());
  const double mean = pairwise_sum(raw) / R;
  std::vector<double> d(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) d[i] = (raw[i] - mean) * (raw[i] - mean);
  IdentityRecord rec;
  rec.name = to_string(name);
  rec.mc = pairwise_sum(d) / (R - 1.0);
  rec.se = rec.mc * std::sqrt(2.0 / (R - 1.0));
  rec.exact_finite_n = exact_variance(spec);
  switch (name) {
    case IdentityName::KarlinVar:
      rec.kind = "exact";
      rec.analytic = rec.exact_finite_n;
      break;
    case IdentityName::HsVar: {
      rec.kind = "exact";
      rec.analytic = rec.exact_finite_n;
      const double n = static_cast<double>(spec.n[0]);
      rec.allowance = 2.0 * truncation_bound * n * n * spec.marginal.variance();
      break;
    }
    case IdentityName::Hs2dVar:
    case IdentityName::CombinedVar: {
      rec.kind = "asymptotic";
      const double z = normalization(spec).z;
      rec.analytic = z * z;
      rec.allowance = 0.1 * rec.analytic;
      break;
    }
  }
  rec.pass = std::abs(rec.mc - rec.analytic) <= 3.0 * rec.se + rec.allowance;
  return rec;
}

IdentityRecord check_identity(IdentityName name, const ModelSpec& spec, std::size_t R, Seed128 seed,
                              std::size_t parallelism) {
  require_identity_model(name, spec);
  CornerGrid grid;
  grid.t1 = {1.0};
  if (spec.dims() == 2) grid.t2 = {1.0};
  const ReplicateReport rep = run_replicates(spec, grid, R, seed, parallelism, false);
  return check_identity(name, spec, rep.raw_last, rep.max_truncation_bound);
}

}  // namespace pfield
