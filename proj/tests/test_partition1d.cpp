#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pfield/partition1d.hpp"
#include "pfield/renewal.hpp"

using namespace pfield;

TEST(UrnPath, RunningParity) {
  const UrnPath p = UrnPath::from_labels({3, 3, 5});
  EXPECT_EQ(p.running_parity, (std::vector<std::uint8_t>{1, 0, 1}));
  const UrnPath one = UrnPath::from_labels({7});
  EXPECT_EQ(one.running_parity[0], 1);
  EXPECT_EQ(occupancy(one).K_n, 1u);
}

TEST(Occupancy, HandCounts) {
  const OccupancySummary s = occupancy(UrnPath::from_labels({3, 3, 5}));
  EXPECT_EQ(s.n, 3u);
  EXPECT_EQ(s.K_n, 2u);
  EXPECT_EQ(s.K_odd, 1u);
  EXPECT_EQ(s.K_n_r.at(1), 1u);
  EXPECT_EQ(s.K_n_r.at(2), 1u);
  const OccupancySummary f = occupancy(UrnPath::from_labels({1, 1, 1, 1}));
  EXPECT_EQ(f.K_n, 1u);
  EXPECT_EQ(f.K_odd, 0u);
}

TEST(Occupancy, Increment) {
  const UrnPath p = UrnPath::from_labels({3, 3, 5});
  const OccupancySummary inc = occupancy_increment(p, 1, 3);
  EXPECT_EQ(inc.K_n, 2u);
  EXPECT_EQ(inc.K_odd, 2u);
  const OccupancySummary whole = occupancy_increment(p, 0, 2);
  const OccupancySummary trunc = occupancy(UrnPath::from_labels({3, 3}));
  EXPECT_EQ(whole.K_n, trunc.K_n);
  EXPECT_EQ(whole.K_odd, trunc.K_odd);
  EXPECT_EQ(whole.K_n_r, trunc.K_n_r);
  EXPECT_THROW(occupancy_increment(p, 2, 2), std::out_of_range);
  EXPECT_THROW(occupancy_increment(p, 0, 4), std::out_of_range);
}

TEST(Occupancy, SampledInvariants) {
  const PowerLawPmf pmf = make_karlin_pmf(0.6);
  RandomStream rng(Seed128{0, 3});
  const UrnPath p = sample_urn(pmf, 20000, rng);
  const OccupancySummary s = occupancy(p);
  std::uint64_t sum_k = 0, sum_rk = 0;
  for (const auto& [r, c] : s.K_n_r) {
    sum_k += c;
    sum_rk += r * c;
  }
  EXPECT_EQ(sum_k, s.K_n);
  EXPECT_EQ(sum_rk, s.n);
  EXPECT_LE(s.K_odd, s.K_n);
  // parity recomputed by brute force on a prefix
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto c = std::count(p.labels.begin(), p.labels.begin() + static_cast<long>(i) + 1, p.labels[i]);
    ASSERT_EQ(p.running_parity[i], c % 2) << i;
    if (i > 2000) break;
  }
}

TEST(ExpectedOccupancy, SmallCases) {
  const PowerLawPmf pmf = make_karlin_pmf(0.6);
  const ExpectedOccupancy one = expected_occupancy(pmf, 1);
  EXPECT_NEAR(one.Phi_n, 1.0, 1e-12);
  EXPECT_NEAR(one.EK_odd, 1.0, 1e-12);
  const std::vector<double> two = {0.5, 0.5};
  const ExpectedOccupancy e = expected_occupancy(two, 2);
  EXPECT_DOUBLE_EQ(e.Phi_n, 1.5);
  // each box odd with prob 2 * 1/2 * 1/2
  EXPECT_DOUBLE_EQ(e.EK_odd, 1.0);
}

TEST(ExpectedOccupancy, BruteForceOracle) {
  // Light tail: direct sum over 2e6 labels plus a first-order remainder.
  for (double a : {0.25, 0.3}) {
    const PowerLawPmf pmf = make_karlin_pmf(a);
    for (std::uint64_t n : {10ULL, 1000ULL, 20000ULL}) {
      double phi = 0.0, odd = 0.0;
      const std::uint64_t L = 2000000;
      for (std::uint64_t l = L; l >= 1; --l) {
        const double p = pmf.pmf_at(l);
        phi += -std::expm1(static_cast<double>(n) * std::log1p(-p));
        // log1p keeps tiny p accurate; pow handles 1 - 2p < 0
        odd += 0.5 * (2.0 * p < 1.0 ? -std::expm1(static_cast<double>(n) * std::log1p(-2.0 * p))
                                    : 1.0 - std::pow(1.0 - 2.0 * p, static_cast<double>(n)));
      }
      const double rest = static_cast<double>(n) * pmf.tail_at(L + 1);
      phi += rest;
      odd += rest;
      const ExpectedOccupancy e = expected_occupancy(pmf, n);
      EXPECT_NEAR(e.Phi_n / phi, 1.0, 1e-9) << a << " " << n;
      EXPECT_NEAR(e.EK_odd / odd, 1.0, 1e-9) << a << " " << n;
    }
  }
}

TEST(ExpectedOccupancy, Asymptotic) {
  const PowerLawPmf pmf = make_karlin_pmf(0.6);
  const double n = 1e4;
  const ExpectedOccupancy e = expected_occupancy(pmf, 10000);
  const double r = e.Phi_n / (std::pow(n, 0.6) * pmf.sv_constant() * std::tgamma(0.4));
  EXPECT_GT(r, 0.9);
  EXPECT_LT(r, 1.1);
}

TEST(DisjointSet, FindReturnsMinimum) {
  DisjointSet ds(10);
  ds.unite(7, 3);
  ds.unite(9, 7);
  ds.unite(5, 6);
  EXPECT_EQ(ds.find(9), 3u);
  EXPECT_EQ(ds.find(6), 5u);
  EXPECT_TRUE(ds.same(3, 9));
  EXPECT_FALSE(ds.same(3, 5));
  ds.unite(6, 9);
  EXPECT_EQ(ds.find(5), 3u);
  EXPECT_EQ(ds.find(ds.find(5)), ds.find(5));
}

TEST(Forest, ChainIsOneComponent) {
  const ForestWindow w = ForestWindow::from_jumps(-3, 6, std::vector<std::uint64_t>(9, 1));
  const std::vector<std::int64_t>& r = w.observed_roots();
  ASSERT_EQ(r.size(), 6u);
  for (std::int64_t v : r) EXPECT_EQ(v, -2);
  EXPECT_TRUE(std::isnan(w.truncation_error_bound()));
}

TEST(Forest, HugeJumpsAreSingletons) {
  const ForestWindow w = ForestWindow::from_jumps(-4, 5, std::vector<std::uint64_t>(9, 1000));
  const std::vector<std::int64_t> idx = {1, 2, 3, 4, 5};
  const std::vector<std::int64_t> r = w.roots_of(idx);
  EXPECT_EQ(r, idx);
  EXPECT_THROW(ForestWindow::from_jumps(-1, 1, {1, 0}), std::invalid_argument);
  EXPECT_THROW(w.jump(-4), std::out_of_range);
}

TEST(Forest, AlternatingJumps) {
  // odd vertices jump out of the window, even ones point at their predecessor
  std::vector<std::uint64_t> j;
  for (std::int64_t v = -5; v <= 6; ++v) j.push_back((v & 1) ? 100 : 1);
  const ForestWindow w = ForestWindow::from_jumps(-6, 6, j);
  for (std::int64_t v = 1; v <= 6; ++v) EXPECT_EQ(w.root(v), (v & 1) ? v : v - 1);
}

TEST(Forest, KeyedWindowInvariants) {
  const PowerLawPmf pmf = make_hs_pmf(0.25);
  const ForestWindow w = sample_forest(pmf, -100000, 512, Seed128{4, 5});
  EXPECT_LT(w.truncation_error_bound(), 1e-2);
  EXPECT_GT(w.truncation_error_bound(), 0.0);
  for (std::int64_t i = 1; i <= 512; ++i) {
    const std::int64_t r = w.root(i);
    EXPECT_LE(r, i);
    EXPECT_EQ(w.root(r), r);
    const std::int64_t parent = i - static_cast<std::int64_t>(w.jump(i));
    if (parent > w.lo()) EXPECT_EQ(w.root(parent), r) << i;
  }
}

TEST(Forest, KeyedMatchesExplicit) {
  const PowerLawPmf pmf = make_hs_pmf(0.3);
  const ForestWindow w = sample_forest(pmf, -2000, 100, Seed128{9, 9});
  const ForestWindow e = ForestWindow::from_jumps(-2000, 100, w.jumps());
  EXPECT_EQ(w.observed_roots(), e.observed_roots());
}

TEST(Forest, StreamOverloadJumpLaw) {
  const PowerLawPmf pmf = make_hs_pmf(0.25);
  RandomStream rng(Seed128{2, 2});
  const ForestWindow w = sample_forest(pmf, -100000, 0, rng);
  const std::vector<std::uint64_t> j = w.jumps();
  const double ones = static_cast<double>(std::count(j.begin(), j.end(), 1u)) / static_cast<double>(j.size());
  const double p1 = pmf.pmf_at(1);
  EXPECT_NEAR(ones, p1, 4.0 * std::sqrt(p1 * (1 - p1) / static_cast<double>(j.size())));
  EXPECT_THROW(sample_forest(make_karlin_pmf(0.5), -10, 5, rng), std::domain_error);
  EXPECT_THROW(sample_forest(pmf, 0, 5, rng), std::invalid_argument);
}

TEST(Forest, DefaultDepth) {
  EXPECT_EQ(default_forest_depth(512), 100000);
  EXPECT_EQ(default_forest_depth(4096), 64 * 4096);
}

TEST(Forest, MeetingProbabilityMatchesVarXstar) {
  // Two independent ancestral lines from 0 share a geometric number of
  // vertices with mean sum q^2, so they meet only at 0 w.p. 1/sum q^2.
  const double a = 0.25;
  const PowerLawPmf pmf = make_hs_pmf(a);
  RandomStream rng(Seed128{6, 6});
  const int N = 100000;
  const std::int64_t depth = 1 << 22;
  int only_zero = 0;
  auto step = [&] { return static_cast<std::int64_t>(std::min<std::uint64_t>(pmf.sample(rng), 2 * depth)); };
  for (int t = 0; t < N; ++t) {
    std::int64_t x = 0, y = 0;
    bool met = false;
    x -= step();
    y -= step();
    while (x > -depth && y > -depth) {
      if (x == y) {
        met = true;
        break;
      }
      if (x > y) x -= step();
      else y -= step();
    }
    if (!met) ++only_zero;
  }
  const double p = static_cast<double>(only_zero) / N;
  const double target = 1.0 / renewal_summary(a).sum_sq;
  const double truncation = renewal_summary(a).tail_sum_sq(depth);
  EXPECT_NEAR(p, target, 3.0 * std::sqrt(p * (1 - p) / N) + truncation);
}
