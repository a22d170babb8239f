#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "pfield/distributions.hpp"
#include "pfield/rng.hpp"

namespace pfield {

/// Labels Y_1..Y_n of the urn together with the running parity of each
/// label's count.
struct UrnPath {
  std::vector<std::uint64_t> labels;
  /// running_parity[i] = (#{j <= i : Y_j = Y_i}) mod 2, 0-based i.
  std::vector<std::uint8_t> running_parity;

  std::size_t size() const { return labels.size(); }
  static UrnPath from_labels(std::vector<std::uint64_t> labels);
};

UrnPath sample_urn(const PowerLawPmf& pmf, std::size_t n, RandomStream& rng);

struct OccupancySummary {
  std::uint64_t n = 0;
  std::uint64_t K_n = 0;
  /// r -> number of labels seen exactly r times.
  std::map<std::uint64_t, std::uint64_t> K_n_r;
  std::uint64_t K_odd = 0;
};

OccupancySummary occupancy(const UrnPath& path);
/// Occupancy of Y_{m+1}..Y_n. Throws std::out_of_range unless
/// 0 <= m < n <= path.size().
OccupancySummary occupancy_increment(const UrnPath& path, std::size_t m, std::size_t n);

struct ExpectedOccupancy {
  double Phi_n = 0.0;   // E K_n
  double EK_odd = 0.0;  // E K~_n
};

/// Exact expectations for a KarlinZipf pmf. Labels are summed one by one
/// while n p_l > 1e-3; the remaining tail is evaluated with the binomial
/// expansion in Hurwitz zeta values, an alternating series whose first
/// omitted term bounds the error.
ExpectedOccupancy expected_occupancy(const PowerLawPmf& pmf, std::uint64_t n);
/// Same, for an explicitly listed finite pmf (test use).
ExpectedOccupancy expected_occupancy(std::span<const double> pmf, std::uint64_t n);

/// Union by size with path compression. find() returns the smallest
/// element of the class, so answers do not depend on union order.
class DisjointSet {
 public:
  explicit DisjointSet(std::size_t n);
  std::size_t find(std::size_t x);
  void unite(std::size_t a, std::size_t b);
  bool same(std::size_t a, std::size_t b) { return find(a) == find(b); }
  std::size_t size() const { return parent_.size(); }

 private:
  std::size_t find_root(std::size_t x);
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::vector<std::size_t> min_;
};

/// Truncated ancestral forest on the vertex window (lo, hi].
///
/// Vertex i is joined to i - J_i when i - J_i > lo; otherwise i is the root
/// of its window component. Every vertex has one edge to a smaller vertex,
/// so the root of i is the last vertex of its ancestral line inside the
/// window, which is also the smallest vertex of its component.
///
/// Sampled windows draw J_v lazily as a keyed hash of v, so only vertices
/// on ancestral lines of 1..hi are ever touched. The law is that of i.i.d.
/// jumps on the full window.
class ForestWindow {
 public:
  /// Explicit jumps for vertices lo+1..hi (jumps.size() == hi - lo).
  static ForestWindow from_jumps(std::int64_t lo, std::int64_t hi, std::vector<std::uint64_t> jumps);
  /// Keyed window: J_v = hs_jump_from_uniform(alpha, hash(key, v)).
  static ForestWindow keyed(double alpha, std::int64_t lo, std::int64_t hi, Seed128 key,
                            double truncation_error_bound);

  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  /// Per-pair bound on the probability that two observed indices share a
  /// component only through vertices at or below lo. NaN for explicit windows.
  double truncation_error_bound() const { return bound_; }

  /// Throws std::out_of_range outside (lo, hi].
  std::uint64_t jump(std::int64_t i) const;
  std::int64_t root(std::int64_t i) const;
  std::vector<std::int64_t> roots_of(std::span<const std::int64_t> indices) const;
  /// Roots of 1..hi, index 0 holds root(1).
  const std::vector<std::int64_t>& observed_roots() const { return observed_; }
  /// Every jump in the window, lo+1..hi. Forces all jumps of a keyed window.
  std::vector<std::uint64_t> jumps() const;

 private:
  ForestWindow() = default;
  std::uint64_t raw_jump(std::int64_t i) const;
  std::int64_t parent_or_self(std::int64_t v) const;
  void resolve_observed();

  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
  double bound_ = 0.0;
  bool keyed_ = false;
  double alpha_ = 0.0;
  Seed128 key_{};
  std::vector<std::uint64_t> explicit_;
  std::vector<std::int64_t> observed_;
};

/// Default truncation depth M = max(1e5, 64 hi).
std::int64_t default_forest_depth(std::int64_t hi);

/// Forest window (lo, hi] for an HsTail pmf; throws std::domain_error for any
/// other kind and std::invalid_argument unless lo < 0 <= hi.
ForestWindow sample_forest(const PowerLawPmf& pmf, std::int64_t lo, std::int64_t hi,
                           RandomStream& rng);
ForestWindow sample_forest(const PowerLawPmf& pmf, std::int64_t lo, std::int64_t hi, Seed128 key);

inline std::vector<std::int64_t> roots_of(const ForestWindow& w, std::span<const std::int64_t> idx) {
  return w.roots_of(idx);
}

}  // namespace pfield
