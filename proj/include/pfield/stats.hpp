#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pfield/fields.hpp"
#include "pfield/rng.hpp"

namespace pfield {

/// Identifier of the replicate seed derivation, recorded in every report.
inline constexpr const char* kSeedScheme = "siphash24-counter-v1";

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool degenerate = false;
};

/// sup |F_n - Phi(x / sigma)| without size requirements.
double ks_statistic(std::span<const double> samples, double sigma);
/// Asymptotic Kolmogorov tail P(K > lambda).
double kolmogorov_tail(double lambda);
/// One-sample KS against N(0, sigma^2). Needs >= 100 samples and sigma > 0;
/// zero sample variance sets `degenerate` and p = 0.
KsResult ks_normal(std::span<const double> samples, double sigma);

struct CovEstimate {
  std::size_t dim = 0;
  std::vector<double> mean;
  std::vector<double> cov;  // dim x dim, divisor R - 1
  std::vector<double> se;   // jackknife, NaN when R < 3
};

/// rows: R vectors of equal length, flattened row-major (R x dim).
CovEstimate empirical_cov(std::span<const double> rows, std::size_t dim);
CovEstimate empirical_cov(const std::vector<std::vector<double>>& vectors);

enum class IdentityName { KarlinVar, HsVar, Hs2dVar, CombinedVar };
std::string to_string(IdentityName name);

struct IdentityRecord {
  std::string name;
  /// "exact" for the 1D identities, "asymptotic" for the 2D targets.
  std::string kind;
  double analytic = 0.0;
  double mc = 0.0;
  double se = 0.0;
  /// Exact finite-n Var(S_n), reported for every identity.
  double exact_finite_n = 0.0;
  /// Extra tolerance: truncation allowance for HS, 10% relative slack for
  /// the asymptotic targets.
  double allowance = 0.0;
  bool pass = false;
};

struct ReplicateReport {
  std::size_t R = 0;
  ModelSpec model;
  CornerGrid grid;
  Seed128 base_seed{};
  std::string seed_scheme = kSeedScheme;
  std::size_t dim = 0;
  std::vector<double> mean_vec;
  std::vector<double> cov_mat;
  std::vector<double> cov_se;
  /// Limit covariance at the grid points.
  std::vector<double> analytic_cov;
  std::vector<KsResult> ks;  // per corner, empty when R < 100
  double max_truncation_bound = 0.0;
  /// Normalized corner vectors, R x dim, when kept.
  std::vector<double> normalized;
  /// Raw S at the last corner, one per replicate.
  std::vector<double> raw_last;
  double normalization = 1.0;
  double sigma = 1.0;
};

/// Replicate r uses split_seed(base_seed, r). Results land in per-index
/// slots and every reduction runs in a fixed order, so the report does not
/// depend on `parallelism`.
ReplicateReport run_replicates(const ModelSpec& spec, const CornerGrid& grid, std::size_t R,
                               Seed128 base_seed, std::size_t parallelism, bool keep_samples = true);

/// Runs body(r) for r in [0, R) on `parallelism` threads; rethrows the first
/// exception.
void parallel_for(std::size_t R, std::size_t parallelism, const std::function<void(std::size_t)>& body);

/// Pairwise summation in a fixed tree order.
double pairwise_sum(std::span<const double> x);

/// Checks a variance identity at the full horizon (grid {1} or {1}x{1}).
IdentityRecord check_identity(IdentityName name, const ModelSpec& spec, std::size_t R, Seed128 seed,
                              std::size_t parallelism = 1);
/// Same, from an existing sample of raw S_n values.
IdentityRecord check_identity(IdentityName name, const ModelSpec& spec, std::span<const double> raw,
                              double truncation_bound);

}  // namespace pfield
