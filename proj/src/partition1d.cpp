#include "pfield/partition1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_map>

#include "pfield/renewal.hpp"

namespace pfield {

namespace {

struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    comp += (std::abs(sum) >= std::abs(x)) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// 1 - (1 - c p)^n, accurate for small p.
double occupied_prob(double p, double c, double n) {
  const double x = c * p;
  if (x < 1.0) return -std::expm1(n * std::log1p(-x));
  return 1.0 - std::pow(1.0 - x, n);
}

}  // namespace

UrnPath UrnPath::from_labels(std::vector<std::uint64_t> labels) {
  UrnPath path;
  path.running_parity.resize(labels.size());
  std::unordered_map<std::uint64_t, std::uint8_t> parity;
  parity.reserve(labels.size() / 4 + 16);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto& bit = parity[labels[i]];
    bit ^= 1;
    path.running_parity[i] = bit;
  }
  path.labels = std::move(labels);
  return path;
}

UrnPath sample_urn(const PowerLawPmf& pmf, std::size_t n, RandomStream& rng) {
  std::vector<std::uint64_t> labels(n);
  for (auto& y : labels) y = pmf.sample(rng);
  return UrnPath::from_labels(std::move(labels));
}

OccupancySummary occupancy_increment(const UrnPath& path, std::size_t m, std::size_t n) {
  if (!(m < n && n <= path.size())) {
    throw std::out_of_range("occupancy_increment requires 0 <= m < n <= path length");
  }
  std::unordered_map<std::uint64_t, std::uint64_t> counts;
  counts.reserve((n - m) / 4 + 16);
  for (std::size_t i = m; i < n; ++i) ++counts[path.labels[i]];
  OccupancySummary out;
  out.n = n - m;
  out.K_n = counts.size();
  for (const auto& [label, c] : counts) {
    ++out.K_n_r[c];
    if (c & 1) ++out.K_odd;
  }
  return out;
}

OccupancySummary occupancy(const UrnPath& path) {
  if (path.size() == 0) throw std::out_of_range("occupancy of an empty path");
  return occupancy_increment(path, 0, path.size());
}

ExpectedOccupancy expected_occupancy(std::span<const double> pmf, std::uint64_t n) {
  const double nn = static_cast<double>(n);
  KahanSum phi, odd;
  for (double p : pmf) {
    if (p <= 0.0) continue;
    phi.add(occupied_prob(p, 1.0, nn));
    odd.add(0.5 * occupied_prob(p, 2.0, nn));
  }
  return {phi.value(), odd.value()};
}

ExpectedOccupancy expected_occupancy(const PowerLawPmf& pmf, std::uint64_t n) {
  if (pmf.kind() != PmfKind::KarlinZipf) {
    throw std::domain_error("expected_occupancy needs a KarlinZipf pmf");
  }
  if (n == 0) throw std::invalid_argument("expected_occupancy requires n >= 1");
  const double nn = static_cast<double>(n);
  // Head: labels with n p_l > 1e-3, summed from the smallest term up.
  std::uint64_t L = 1;
  while (nn * pmf.pmf_at(L) > 1e-3) ++L;
  KahanSum phi, odd;
  for (std::uint64_t l = L; l-- > 1;) {
    const double p = pmf.pmf_at(l);
    phi.add(occupied_prob(p, 1.0, nn));
    odd.add(0.5 * occupied_prob(p, 2.0, nn));
  }
  // Tail l >= L: sum_j (-1)^{j+1} C(n,j) c^j zeta(j s, L) / Z^j.
  const double s = pmf.exponent();
  const double logZ = std::log(pmf.normalizer());
  const double lgn1 = std::lgamma(nn + 1.0);
  for (int which = 0; which < 2; ++which) {
    const double c = which == 0 ? 1.0 : 2.0;
    KahanSum tail;
    for (std::uint64_t j = 1; j <= n; ++j) {
      const double jj = static_cast<double>(j);
      const double log_mag = lgn1 - std::lgamma(jj + 1.0) - std::lgamma(nn - jj + 1.0) +
                             jj * (std::log(c) - logZ) +
                             std::log(hurwitz_zeta(jj * s, static_cast<double>(L)));
      const double term = std::exp(log_mag);
      tail.add((j & 1) ? term : -term);
      if (term < 1e-17 * std::max(1.0, std::abs(tail.value()))) break;
    }
    if (which == 0) {
      phi.add(tail.value());
    } else {
      odd.add(0.5 * tail.value());
    }
  }
  return {phi.value(), odd.value()};
}

DisjointSet::DisjointSet(std::size_t n) : parent_(n), size_(n, 1), min_(n) {
  for (std::size_t i = 0; i < n; ++i) parent_[i] = min_[i] = i;
}

std::size_t DisjointSet::find_root(std::size_t x) {
  std::size_t r = x;
  while (parent_[r] != r) r = parent_[r];
  while (parent_[x] != r) {
    const std::size_t next = parent_[x];
    parent_[x] = r;
    x = next;
  }
  return r;
}

std::size_t DisjointSet::find(std::size_t x) { return min_[find_root(x)]; }

void DisjointSet::unite(std::size_t a, std::size_t b) {
  a = find_root(a);
  b = find_root(b);
  if (a == b) return;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  min_[a] = std::min(min_[a], min_[b]);
}

std::int64_t default_forest_depth(std::int64_t hi) {
  return std::max<std::int64_t>(100000, 64 * hi);
}

ForestWindow ForestWindow::from_jumps(std::int64_t lo, std::int64_t hi,
                                      std::vector<std::uint64_t> jumps) {
  if (!(lo < hi) || jumps.size() != static_cast<std::size_t>(hi - lo)) {
    throw std::invalid_argument("from_jumps needs one jump per vertex of (lo, hi]");
  }
  if (std::find(jumps.begin(), jumps.end(), 0) != jumps.end()) {
    throw std::invalid_argument("jumps must be positive");
  }
  ForestWindow w;
  w.lo_ = lo;
  w.hi_ = hi;
  w.bound_ = std::numeric_limits<double>::quiet_NaN();
  w.explicit_ = std::move(jumps);
  w.resolve_observed();
  return w;
}

ForestWindow ForestWindow::keyed(double alpha, std::int64_t lo, std::int64_t hi, Seed128 key,
                                 double truncation_error_bound) {
  if (!(lo < 0 && 0 <= hi)) throw std::invalid_argument("forest window needs lo < 0 <= hi");
  ForestWindow w;
  w.lo_ = lo;
  w.hi_ = hi;
  w.bound_ = truncation_error_bound;
  w.keyed_ = true;
  w.alpha_ = alpha;
  w.key_ = key;
  w.resolve_observed();
  return w;
}

std::uint64_t ForestWindow::raw_jump(std::int64_t i) const {
  if (!keyed_) return explicit_[static_cast<std::size_t>(i - lo_ - 1)];
  const std::uint64_t bits = keyed_hash(key_, tag::kJump, static_cast<std::uint64_t>(i), 0);
  return hs_jump_from_uniform(alpha_, bits_to_open_unit(bits));
}

std::uint64_t ForestWindow::jump(std::int64_t i) const {
  if (i <= lo_ || i > hi_) throw std::out_of_range("vertex outside forest window");
  return raw_jump(i);
}

std::int64_t ForestWindow::parent_or_self(std::int64_t v) const {
  const std::uint64_t j = raw_jump(v);
  if (j >= static_cast<std::uint64_t>(v - lo_)) return v;
  return v - static_cast<std::int64_t>(j);
}

std::int64_t ForestWindow::root(std::int64_t i) const {
  if (i <= lo_ || i > hi_) throw std::out_of_range("vertex outside forest window");
  if (i >= 1) return observed_[static_cast<std::size_t>(i - 1)];
  std::int64_t v = i;
  for (;;) {
    const std::int64_t p = parent_or_self(v);
    if (p == v) return v;
    v = p;
  }
}

std::vector<std::int64_t> ForestWindow::roots_of(std::span<const std::int64_t> indices) const {
  std::vector<std::int64_t> out;
  out.reserve(indices.size());
  for (std::int64_t i : indices) out.push_back(root(i));
  return out;
}

std::vector<std::uint64_t> ForestWindow::jumps() const {
  if (!keyed_) return explicit_;
  std::vector<std::uint64_t> out(static_cast<std::size_t>(hi_ - lo_));
  for (std::int64_t v = lo_ + 1; v <= hi_; ++v) out[static_cast<std::size_t>(v - lo_ - 1)] = raw_jump(v);
  return out;
}

void ForestWindow::resolve_observed() {
  observed_.assign(static_cast<std::size_t>(std::max<std::int64_t>(hi_, 0)), 0);
  std::unordered_map<std::int64_t, std::int64_t> below;  // roots of visited v <= 0
  std::vector<std::int64_t> trail;
  for (std::int64_t i = 1; i <= hi_; ++i) {
    if (i <= lo_) {  // only for explicit windows with lo >= 0
      observed_[static_cast<std::size_t>(i - 1)] = i;
      continue;
    }
    const std::int64_t p = parent_or_self(i);
    std::int64_t r;
    if (p == i) {
      r = i;
    } else if (p >= 1) {
      r = observed_[static_cast<std::size_t>(p - 1)];
    } else {
      trail.clear();
      std::int64_t v = p;
      for (;;) {
        if (auto it = below.find(v); it != below.end()) {
          r = it->second;
          break;
        }
        trail.push_back(v);
        const std::int64_t q = parent_or_self(v);
        if (q == v) {
          r = v;
          break;
        }
        v = q;
      }
      for (std::int64_t t : trail) below.emplace(t, r);
    }
    observed_[static_cast<std::size_t>(i - 1)] = r;
  }
}

ForestWindow sample_forest(const PowerLawPmf& pmf, std::int64_t lo, std::int64_t hi, Seed128 key) {
  if (pmf.kind() != PmfKind::HsTail) throw std::domain_error("sample_forest needs an HsTail pmf");
  if (!(lo < 0 && 0 <= hi)) throw std::invalid_argument("forest window needs lo < 0 <= hi");
  const double bound = forest_truncation_bound(pmf.alpha(), -lo);
  return ForestWindow::keyed(pmf.alpha(), lo, hi, key, bound);
}

ForestWindow sample_forest(const PowerLawPmf& pmf, std::int64_t lo, std::int64_t hi,
                           RandomStream& rng) {
  Seed128 key;
  key.hi = rng.next_u64();
  key.lo = rng.next_u64();
  return sample_forest(pmf, lo, hi, key);
}

}  // namespace pfield
