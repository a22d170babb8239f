#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "oracles.hpp"
#include "pfield/renewal.hpp"

using namespace pfield;

TEST(Renewal, HandConvolution) {
  const std::vector<double> p = {0.5, 0.5};
  const RenewalSequence rs = RenewalSequence::from_probabilities(p, 6);
  EXPECT_DOUBLE_EQ(rs.q_at(0), 1.0);
  EXPECT_DOUBLE_EQ(rs.q_at(1), 0.5);
  EXPECT_DOUBLE_EQ(rs.q_at(2), 0.75);
  EXPECT_DOUBLE_EQ(rs.prefix(3), 2.25);
  EXPECT_EQ(rs.kmax(), 6u);
}

TEST(Renewal, EnumerationOracle) {
  const std::vector<std::vector<double>> pmfs = {
      {0.5, 0.5}, {0.1, 0.2, 0.3, 0.25, 0.15}, {0.0, 0.0, 1.0}, {0.9, 0, 0, 0, 0.1}};
  for (const auto& p : pmfs) {
    const RenewalSequence rs = RenewalSequence::from_probabilities(p, 15);
    for (int k = 0; k <= 15; ++k) EXPECT_NEAR(rs.q_at(k), oracle::renewal_by_enumeration(p, k), 1e-12);
  }
}

TEST(Renewal, FftMatchesDirect) {
  for (double a : {0.1, 0.25, 0.45}) {
    const PowerLawPmf pmf = make_hs_pmf(a);
    std::vector<double> p(20000);
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = pmf.pmf_at(k + 1);
    const std::vector<double> d = renewal_direct(p, 20000);
    const std::vector<double> f = renewal_fft(p, 20000);
    double worst = 0.0;
    for (std::size_t k = 0; k < d.size(); ++k) worst = std::max(worst, std::abs(d[k] - f[k]));
    EXPECT_LT(worst, 1e-10) << a;
    const RenewalSequence rs = renewal_sequence(pmf, 20000);
    EXPECT_NEAR(rs.q_at(20000), d[20000], 1e-10);
  }
}

TEST(Renewal, Alpha025Values) {
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(0.25), 10);
  EXPECT_DOUBLE_EQ(rs.q_at(0), 1.0);
  EXPECT_NEAR(rs.q_at(1), 1.0 - std::pow(2.0, -0.25), 1e-15);
  EXPECT_THROW(renewal_sequence(make_hs_pmf(0.25), 0), std::invalid_argument);
  EXPECT_THROW(renewal_sequence(make_karlin_pmf(0.25), 10), std::domain_error);
}

TEST(VarXstar, DegenerateChainFlagged) {
  const RenewalSequence rs = RenewalSequence::from_probabilities(std::vector<double>{1.0}, 1000);
  const XstarVariance v = var_xstar(rs);
  EXPECT_FALSE(v.converged);
  EXPECT_DOUBLE_EQ(v.sum_sq, 1001.0);
  EXPECT_LT(v.value, 1e-3);
}

TEST(VarXstar, BruteForceSumOfSquares) {
  const std::vector<double> p = {0.5, 0.5};
  const RenewalSequence rs = RenewalSequence::from_probabilities(p, 20);
  double s = 0.0;
  for (int k = 0; k <= 20; ++k) s += std::pow(oracle::renewal_by_enumeration(p, k), 2);
  EXPECT_NEAR(var_xstar(rs).sum_sq, s, 1e-12);
}

TEST(VarXstar, Alpha025Converges) {
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(0.25), 1000000);
  const XstarVariance v = var_xstar(rs);
  EXPECT_LT(v.tail_increment, 1e-8);
  EXPECT_GT(v.value, 0.0);
  EXPECT_LE(v.value, 1.0);
  // the extrapolated total is a little above the partial sum
  const RenewalSummary& s = renewal_summary(0.25);
  EXPECT_GE(s.sum_sq, v.sum_sq);
  EXPECT_LT(s.sum_sq - v.sum_sq, 2e-3);
}

TEST(Weights, HandSums) {
  const std::vector<double> p = {0.5, 0.5};
  const RenewalSequence rs = RenewalSequence::from_probabilities(p, 64);
  const WeightProfile w1 = weights(rs, 1);
  EXPECT_DOUBLE_EQ(w1.b_at(1), 1.0);
  const WeightProfile w = weights(rs, 2);
  EXPECT_DOUBLE_EQ(w.b_at(2), 1.0);
  EXPECT_DOUBLE_EQ(w.b_at(1), 1.5);
  EXPECT_DOUBLE_EQ(w.b_at(0), 1.25);
  double s = 0.0;
  for (double b : w.b) s += b * b;
  EXPECT_NEAR(w.b_n_sq, s, 1e-12);
  EXPECT_NEAR(weight_sum_sq(rs, 2, 64), w.b_n_sq, 1e-12);
  EXPECT_THROW(weights(rs, 5), std::invalid_argument);
}

TEST(Weights, DirectDefinition) {
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(0.3), 16 * 40);
  const WeightProfile w = weights(rs, 40);
  for (std::int64_t j : {40, 17, 1, 0, -3, -500}) {
    double b = 0.0;
    for (std::int64_t i = 1; i <= 40; ++i)
      if (i - j >= 0) b += rs.q_at(static_cast<std::size_t>(i - j));
    EXPECT_NEAR(w.b_at(j), b, 1e-12) << j;
  }
}

TEST(Weights, SelfSimilarGrowth) {
  const double a = 0.25;
  const std::int64_t n = 10000;
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(a), static_cast<std::size_t>(32 * n));
  const double r = weight_sum_sq(rs, 2 * n, 32 * n) / weight_sum_sq(rs, n, 16 * n);
  EXPECT_NEAR(r / std::exp2(2 * a + 1), 1.0, 0.05);
}

TEST(Weights, ExactVarianceMatchesProfile) {
  // Direct sum over j in (n - 2^22, n]; what is left beyond is below
  // n^2 sum_{k > 2^22} q_k^2, about 1e-3 relative at n = 64.
  const double a = 0.25;
  const std::int64_t n = 64;
  const std::size_t K = std::size_t{1} << 22;
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(a), K);
  const double direct = weight_sum_sq(rs, n, K) / renewal_summary(a).sum_sq;
  const double exact = hs_exact_variance(a, n);
  EXPECT_GE(exact, direct);
  double rest = 0.0;
  for (std::size_t k = K; k > K / 2; --k) rest += rs.q_at(k) * rs.q_at(k);
  // the remaining tail is about as large as the last octave for q^2 ~ k^-1.5
  const double bound = 3.0 * static_cast<double>(n * n) * rest / renewal_summary(a).sum_sq;
  EXPECT_LE(exact - direct, bound);
  EXPECT_NEAR(exact / direct, 1.0, 2e-3);
}

TEST(Constants, CAlpha) {
  const double pi = std::numbers::pi;
  const double expect = std::sin(pi / 4) / (pi * 0.25 * 1.5 * std::sqrt(pi));
  EXPECT_NEAR(c_alpha(0.25), expect, 1e-15);
  EXPECT_NEAR(c_alpha(0.25), 0.33863, 5e-6);
  EXPECT_THROW(c_alpha(0.0), std::domain_error);
  EXPECT_THROW(c_alpha(0.5), std::domain_error);
  for (double a = 0.05; a < 0.5; a += 0.05) EXPECT_GT(c_alpha(a), 0.0);
}

TEST(Constants, SigmaSq) {
  EXPECT_NEAR(sigma_sq(TheoremModel::Karlin2D, 0.5, 0.5), std::numbers::pi / 2, 1e-14);
  const double S = 1.7;
  EXPECT_NEAR(sigma_sq(TheoremModel::HS2D, 0.25, 0.3, S, S), c_alpha(0.25) * c_alpha(0.3) / (S * S), 1e-15);
  EXPECT_NEAR(sigma_sq(TheoremModel::Combined, 0.25, 0.5, S),
              c_alpha(0.25) * std::tgamma(0.5) * std::exp2(-0.5) / S, 1e-15);
  EXPECT_THROW(sigma_sq(TheoremModel::HS2D, 0.25, 0.25), std::invalid_argument);
}

TEST(Constants, PAlphaWeight) {
  EXPECT_DOUBLE_EQ(p_alpha_weight(0.3, 1), 0.3);
  EXPECT_DOUBLE_EQ(p_alpha_weight(0.5, 2), 0.125);
  // the weights are the jumps of the oracle partial sum
  for (double a : {0.3, 0.7}) {
    for (std::uint64_t r : {3ULL, 10ULL, 500ULL}) {
      const double jump = oracle::p_alpha_partial_sum(a, r) - oracle::p_alpha_partial_sum(a, r - 1);
      EXPECT_NEAR(p_alpha_weight(a, r) / jump, 1.0, 1e-9);
    }
  }
  EXPECT_THROW(p_alpha_weight(0.3, 0), std::invalid_argument);
}

TEST(Truncation, BoundAt512) {
  const double b = forest_truncation_bound(0.25, 100000);
  EXPECT_GT(b, 0.0);
  EXPECT_LT(b, 1e-2);
  EXPECT_GT(forest_truncation_bound(0.25, 1000), b);
  // tail of q^2 from the exact sequence, checked against the summary
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(0.25), 1 << 20);
  double tail = 0.0;
  for (std::size_t k = (1 << 20); k > 100000; --k) tail += rs.q_at(k) * rs.q_at(k);
  const double summary_tail = renewal_summary(0.25).tail_sum_sq(100000) - renewal_summary(0.25).tail_sum_sq(1 << 20);
  EXPECT_NEAR(summary_tail / tail, 1.0, 1e-6);
}
