#pragma once

#include <cstdint>
#include <string>

#include "pfield/rng.hpp"

namespace pfield {

enum class PmfKind {
  /// p_k = k^(-1/alpha) / zeta(1/alpha): the urn label law.
  KarlinZipf,
  /// P(J >= n) = n^(-alpha) exactly: the backward-jump law of the forest.
  HsTail,
};

std::string to_string(PmfKind kind);

/// Regularly varying probability mass function on {1, 2, ...}. Immutable
/// after construction; normalizing constants are computed once.
class PowerLawPmf {
 public:
  PmfKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  /// Constant value of the slowly varying factor: zeta^(-alpha) for
  /// KarlinZipf, 1 for HsTail.
  double sv_constant() const { return sv_constant_; }
  /// Zipf exponent 1/alpha (KarlinZipf only; 0 for HsTail).
  double exponent() const { return exponent_; }
  /// Riemann zeta(1/alpha) for KarlinZipf, 1 for HsTail.
  double normalizer() const { return normalizer_; }

  double pmf_at(std::uint64_t k) const;
  /// Sum of p_j over j >= n.
  double tail_at(std::uint64_t n) const;

  /// Exact draw. KarlinZipf labels whose continuous proposal exceeds 2^62
  /// are returned in an order-preserving encoding >= 2^63 (see
  /// kHugeLabelFlag); they are distinct from every ordinary label.
  std::uint64_t sample(RandomStream& rng) const;

  static constexpr std::uint64_t kHugeLabelFlag = std::uint64_t{1} << 63;

 private:
  friend PowerLawPmf make_karlin_pmf(double alpha);
  friend PowerLawPmf make_hs_pmf(double alpha);
  PowerLawPmf() = default;

  std::uint64_t sample_zipf(RandomStream& rng) const;

  PmfKind kind_ = PmfKind::HsTail;
  double alpha_ = 0.0;
  double sv_constant_ = 1.0;
  double exponent_ = 0.0;
  double normalizer_ = 1.0;
  double accept_scale_ = 1.0;  // 1 - 2^(1-s)
};

/// Zipf law with p_k proportional to k^(-1/alpha). Throws std::domain_error
/// unless 0 < alpha < 1.
PowerLawPmf make_karlin_pmf(double alpha);

/// p_n = n^(-alpha) - (n+1)^(-alpha). Throws std::domain_error unless
/// 0 < alpha < 1/2.
PowerLawPmf make_hs_pmf(double alpha);

inline std::uint64_t sample(const PowerLawPmf& pmf, RandomStream& rng) { return pmf.sample(rng); }
inline double pmf_at(const PowerLawPmf& pmf, std::uint64_t k) { return pmf.pmf_at(k); }
inline double tail_at(const PowerLawPmf& pmf, std::uint64_t n) { return pmf.tail_at(n); }

/// Inversion step of the HsTail sampler: ceil((1-u)^(-1/alpha)) - 1, at
/// least 1, saturating at 2^63.
std::uint64_t hs_jump_from_uniform(double alpha, double u);

/// Hurwitz zeta sum_{k>=0} (a+k)^(-s) for s > 1, a >= 1, by direct
/// summation followed by an Euler-Maclaurin remainder.
double hurwitz_zeta(double s, double a);

/// Bounded, centered law used as the per-class value in the generalized
/// one-dimensional models.
class MarginalLaw {
 public:
  enum class Kind { RademacherSign, ScaledSign, TwoPoint };

  MarginalLaw() = default;
  static MarginalLaw rademacher() { return MarginalLaw{}; }
  /// +-c with equal probability.
  static MarginalLaw scaled_sign(double c);
  /// a with probability p, b otherwise; must have mean zero.
  static MarginalLaw two_point(double a, double b, double p);

  Kind kind() const { return kind_; }
  double a() const { return a_; }
  double b() const { return b_; }
  double p() const { return p_; }

  /// Quantile map: u in (0,1) -> value.
  double from_uniform(double u) const { return u < p_ ? a_ : b_; }
  double mean() const { return p_ * a_ + (1.0 - p_) * b_; }
  double variance() const { return p_ * a_ * a_ + (1.0 - p_) * b_ * b_; }
  double support_bound() const;

  friend bool operator==(const MarginalLaw&, const MarginalLaw&) = default;

 private:
  MarginalLaw(Kind kind, double a, double b, double p) : kind_(kind), a_(a), b_(b), p_(p) {}

  Kind kind_ = Kind::RademacherSign;
  double a_ = 1.0;
  double b_ = -1.0;
  double p_ = 0.5;
};

std::string to_string(MarginalLaw::Kind kind);

}  // namespace pfield
