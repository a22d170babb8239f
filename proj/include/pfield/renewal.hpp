#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pfield/distributions.hpp"

namespace pfield {

/// q_0..q_kmax of the renewal recursion q_k = sum_{j=1..k} p_j q_{k-j}.
class RenewalSequence {
 public:
  /// p_1.. taken from an HsTail pmf.
  static RenewalSequence from_pmf(const PowerLawPmf& pmf, std::size_t kmax);
  /// p[0] = p_1, p[1] = p_2, ...; missing entries are zero.
  static RenewalSequence from_probabilities(std::span<const double> p, std::size_t kmax);

  std::size_t kmax() const { return q_.size() - 1; }
  const std::vector<double>& q() const { return q_; }
  double q_at(std::size_t k) const { return q_[k]; }
  /// alpha of the generating pmf; 0 when built from explicit probabilities.
  double alpha() const { return alpha_; }
  /// prefix(m) = q_0 + ... + q_{m-1}.
  double prefix(std::size_t m) const { return prefix_[m]; }

 private:
  RenewalSequence() = default;
  void finish();

  std::vector<double> q_;
  std::vector<double> prefix_;
  double alpha_ = 0.0;
};

/// Orders up to this size use the O(k^2) recursion with compensated sums;
/// larger ones use Newton inversion of 1 - P(z) with FFT products.
inline constexpr std::size_t kDirectRecursionLimit = 4096;

RenewalSequence renewal_sequence(const PowerLawPmf& pmf, std::size_t kmax);
/// Always the direct recursion, for cross-checks.
std::vector<double> renewal_direct(std::span<const double> p, std::size_t kmax);
/// Always the FFT route.
std::vector<double> renewal_fft(std::span<const double> p, std::size_t kmax);

struct XstarVariance {
  double value = 0.0;           // 1 / sum_{k<=kmax} q_k^2
  double sum_sq = 0.0;          // sum_{k<=kmax} q_k^2
  double tail_increment = 0.0;  // q_kmax^2
  bool converged = false;       // tail_increment < 1e-10
};

XstarVariance var_xstar(const RenewalSequence& rs);

/// b_{n,j} = sum_{i=1..n} q_{i-j} for j in (n - kmax, n].
struct WeightProfile {
  std::int64_t n = 0;
  std::int64_t j_min = 0;  // b[0] is b_{n, j_min}
  std::vector<double> b;
  double b_n_sq = 0.0;

  double b_at(std::int64_t j) const;
};

/// Throws std::invalid_argument unless rs.kmax() >= 16 n.
WeightProfile weights(const RenewalSequence& rs, std::int64_t n);
/// sum_j b_{n,j}^2 over j in (n - kmax, n] without materializing b; needs kmax >= n.
double weight_sum_sq(const RenewalSequence& rs, std::int64_t n, std::size_t kmax);

/// sin(pi a) / (pi a (2a+1) Gamma(1-2a)); domain (0, 1/2).
double c_alpha(double alpha);

enum class TheoremModel { Karlin2D, HS2D, Combined };

/// Limit variance constant of each 2D theorem. HS directions need their
/// sum_k q_k^2: both for HS2D, sum_sq1 only for Combined.
double sigma_sq(TheoremModel model, double alpha1, double alpha2, double sum_sq1 = 0.0,
                double sum_sq2 = 0.0);

/// alpha (1-alpha) ... (r-1-alpha) / r!.
double p_alpha_weight(double alpha, std::uint64_t r);

/// Cached per-alpha data for an HsTail direction.
struct RenewalSummary {
  double alpha = 0.0;
  std::size_t K = 0;
  std::vector<double> q;          // q_0..q_K
  double sum_sq_partial = 0.0;    // sum_{k<=K} q_k^2
  double decay_exponent = 0.0;    // gamma with q_k ~ k^-gamma near K
  double sum_sq = 0.0;            // partial plus extrapolated tail

  /// sum_{k>M} q_k^2, extrapolated past K with the local power law.
  double tail_sum_sq(std::size_t M) const;
};

/// q up to K = max(2^20, next power of two >= min_K), computed once per
/// (alpha, K) and shared. Thread safe.
const RenewalSummary& renewal_summary(double alpha, std::size_t min_K = 0);

/// Per-pair truncation bound for a forest of depth M: by Cauchy-Schwarz,
/// sum_{k>M} q_k q_{k+d} <= sum_{k>M} q_k^2 for every offset d >= 0.
double forest_truncation_bound(double alpha, std::int64_t depth);

/// Exact Var(S_n) / Var(X) for the 1D forest model: b_n^2 / sum_k q_k^2,
/// with b_n^2 over all j (the summary's K, far beyond 16n).
double hs_exact_variance(double alpha, std::int64_t n);

struct DoublingDiagnostic {
  std::int64_t n = 0;
  std::size_t kmax = 0;
  double b_sq = 0.0;
  double b_sq_doubled = 0.0;
  double relative_change = 0.0;
};

/// Compares b_n^2 summed with kmax and with 2 kmax.
DoublingDiagnostic weight_doubling_check(double alpha, std::int64_t n, std::size_t kmax);

}  // namespace pfield
