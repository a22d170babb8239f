#include "pfield/distributions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfield {

namespace {

// B_{2j} / (2j)! for j = 1..8.
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0,
};

constexpr double kLn2 = std::numbers::ln2;

}  // namespace

std::string to_string(PmfKind kind) {
  return kind == PmfKind::KarlinZipf ? "KarlinZipf" : "HsTail";
}

double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0)) throw std::domain_error("hurwitz_zeta requires s > 1");
  if (!(a >= 1.0)) throw std::domain_error("hurwitz_zeta requires a >= 1");
  // Shift the remainder point far enough that the Euler-Maclaurin terms,
  // which grow like (s)_{2j} / a^{2j}, are negligible after 8 corrections.
  const double shift_to = std::max(24.0, 2.0 * s);
  double sum = 0.0;
  double comp = 0.0;
  double x = a;
  // Terms decrease, so summing them in order loses at most a few ulps.
  while (x < shift_to) {
    const double term = std::pow(x, -s);
    const double t = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
    sum = t;
    x += 1.0;
  }
  const double xs = std::pow(x, -s);
  double remainder = x * xs / (s - 1.0) + 0.5 * xs;
  double rising = s;          // s (s+1) ... (s+2j-2)
  double power = xs / x;      // x^(-s-2j+1)
  for (std::size_t j = 0; j < kBernoulliOverFactorial.size(); ++j) {
    const double term = kBernoulliOverFactorial[j] * rising * power;
    remainder += term;
    if (std::abs(term) < 1e-18 * remainder) break;
    rising *= (s + 2.0 * j + 1.0) * (s + 2.0 * j + 2.0);
    power /= x * x;
  }
  return sum + comp + remainder;
}

PowerLawPmf make_karlin_pmf(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("KarlinZipf alpha must lie in (0,1)");
  }
  PowerLawPmf pmf;
  pmf.kind_ = PmfKind::KarlinZipf;
  pmf.alpha_ = alpha;
  pmf.exponent_ = 1.0 / alpha;
  pmf.normalizer_ = hurwitz_zeta(pmf.exponent_, 1.0);
  pmf.sv_constant_ = std::pow(pmf.normalizer_, -alpha);
  pmf.accept_scale_ = -std::expm1((1.0 - pmf.exponent_) * kLn2);
  return pmf;
}

PowerLawPmf make_hs_pmf(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw std::domain_error("HsTail alpha must lie in (0,1/2)");
  }
  PowerLawPmf pmf;
  pmf.kind_ = PmfKind::HsTail;
  pmf.alpha_ = alpha;
  return pmf;
}

double PowerLawPmf::pmf_at(std::uint64_t k) const {
  if (k == 0) return 0.0;
  const double x = static_cast<double>(k);
  if (kind_ == PmfKind::KarlinZipf) return std::pow(x, -exponent_) / normalizer_;
  // n^-a - (n+1)^-a without cancellation.
  return -std::pow(x, -alpha_) * std::expm1(-alpha_ * std::log1p(1.0 / x));
}

double PowerLawPmf::tail_at(std::uint64_t n) const {
  if (n <= 1) return 1.0;
  const double x = static_cast<double>(n);
  if (kind_ == PmfKind::HsTail) return std::pow(x, -alpha_);
  return hurwitz_zeta(exponent_, x) / normalizer_;
}

std::uint64_t hs_jump_from_uniform(double alpha, double u) {
  const double tail_u = 1.0 - u;  // in (0,1]
  if (!(tail_u > 0.0)) return PowerLawPmf::kHugeLabelFlag;
  const double v = std::exp(-std::log(tail_u) / alpha);
  if (!(v < 0x1.0p63)) return PowerLawPmf::kHugeLabelFlag;
  const double k = std::ceil(v) - 1.0;
  return k < 1.0 ? 1 : static_cast<std::uint64_t>(k);
}

std::uint64_t PowerLawPmf::sample(RandomStream& rng) const {
  if (kind_ == PmfKind::HsTail) return hs_jump_from_uniform(alpha_, rng.uniform01());
  return sample_zipf(rng);
}

// Rejection from the continuous proposal with density (s-1) x^-s on [1,inf).
// With r(k) = p_k / P(floor(X) = k), the ratio r(k)/r(1) equals
// (1 - 2^(1-s)) / (k (1 - (1+1/k)^(1-s))), which is at most 1 and is the
// acceptance probability. Expected proposals are at most 1/ln 2.
std::uint64_t PowerLawPmf::sample_zipf(RandomStream& rng) const {
  const double s = exponent_;
  const double inv_sm1 = 1.0 / (s - 1.0);
  constexpr double kLog2Pow62 = 62.0 * kLn2;
  for (;;) {
    const double log_x = -std::log(rng.uniform_open_low()) * inv_sm1;
    const double v = rng.uniform01();
    if (log_x < kLog2Pow62) {
      const double k = std::floor(std::exp(log_x));
      const double kk = std::max(k, 1.0);
      const double denom = -kk * std::expm1((1.0 - s) * std::log1p(1.0 / kk));
      if (v * denom < accept_scale_) return static_cast<std::uint64_t>(kk);
    } else {
      // k >= 2^62: the acceptance ratio equals its k -> inf limit
      // (1 - 2^(1-s)) / (s-1) to double precision.
      if (v * (s - 1.0) < accept_scale_) {
        return kHugeLabelFlag + std::bit_cast<std::uint64_t>(log_x);
      }
    }
  }
}

MarginalLaw MarginalLaw::scaled_sign(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::domain_error("ScaledSign requires a positive finite scale");
  }
  return MarginalLaw(Kind::ScaledSign, c, -c, 0.5);
}

MarginalLaw MarginalLaw::two_point(double a, double b, double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("TwoPoint p must lie in (0,1)");
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw std::domain_error("TwoPoint support must be finite");
  }
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  if (std::abs(p * a + (1.0 - p) * b) > 1e-12 * scale) {
    throw std::domain_error("TwoPoint law must be centered: p*a + (1-p)*b = 0");
  }
  return MarginalLaw(Kind::TwoPoint, a, b, p);
}

double MarginalLaw::support_bound() const { return std::max(std::abs(a_), std::abs(b_)); }

std::string to_string(MarginalLaw::Kind kind) {
  switch (kind) {
    case MarginalLaw::Kind::RademacherSign:
      return "RademacherSign";
    case MarginalLaw::Kind::ScaledSign:
      return "ScaledSign";
    case MarginalLaw::Kind::TwoPoint:
      return "TwoPoint";
  }
  return "?";
}

}  // namespace pfield
