#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfield/distributions.hpp"
#include "pfield/partition1d.hpp"
#include "pfield/rng.hpp"

namespace pfield {

enum class ModelKind {
  Karlin1D,
  HS1D,
  GeneralizedKarlin1D,
  GeneralizedHS1D,
  Karlin2D,
  HS2D,
  Combined2D,
};

std::string to_string(ModelKind kind);
std::optional<ModelKind> parse_model_kind(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::Karlin1D;
  std::vector<double> alphas;
  MarginalLaw marginal;
  std::vector<std::int64_t> n;
  /// Truncation depth M per HS direction; 0 (or missing) selects
  /// default_forest_depth(n).
  std::vector<std::int64_t> forest_depth;

  std::size_t dims() const;
  bool direction_is_hs(std::size_t dir) const;
  std::int64_t depth(std::size_t dir) const;
  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct CornerGrid {
  std::vector<double> t1;
  std::vector<double> t2;  // empty for 1D models

  void validate(bool two_d) const;
  friend bool operator==(const CornerGrid&, const CornerGrid&) = default;
};

/// floor(n t) for each t.
std::vector<std::int64_t> corner_indices(std::int64_t n, const std::vector<double>& t);

struct FieldSample {
  bool two_d = false;
  std::size_t m1 = 0;
  std::size_t m2 = 1;
  std::vector<std::int64_t> corner1;
  std::vector<std::int64_t> corner2;  // {1} for 1D
  std::vector<double> raw;            // row-major m1 x m2
  std::vector<double> normalized;     // raw / normalization
  double normalization = 1.0;         // Z_H(n), sigma included
  double sigma = 1.0;
  Seed128 seed{};
  /// Largest forest truncation bound over HS directions, 0 if none.
  double truncation_error_bound = 0.0;

  double raw_at(std::size_t a, std::size_t b = 0) const { return raw[a * m2 + b]; }
  double normalized_at(std::size_t a, std::size_t b = 0) const { return normalized[a * m2 + b]; }
};

/// Partition of 1..n in one direction: a dense class id per index, the
/// class key that feeds the spin hash, and the within-class sign.
struct DirectionPartition {
  std::vector<std::uint32_t> cls;
  std::vector<std::uint64_t> class_key;
  std::vector<std::int8_t> sign;

  std::size_t size() const { return cls.size(); }
  std::size_t classes() const { return class_key.size(); }

  /// Alternating rule: sign (-1)^(count+1) within each label.
  static DirectionPartition alternating(const UrnPath& path);
  /// Identical rule over the window components of 1..hi.
  static DirectionPartition identical(const ForestWindow& window);
};

/// +-1 spin of a class pair, from the top bit of a keyed hash.
int pair_spin(Seed128 seed, std::uint64_t key1, std::uint64_t key2);
/// Marginal draw of a 1D class.
double class_value(Seed128 seed, std::uint64_t key, const MarginalLaw& law);

/// S at corners c (entries in [0, n]) for a 1D partition.
std::vector<double> evaluate_1d(const DirectionPartition& p, const std::vector<std::int64_t>& c,
                                Seed128 seed, const MarginalLaw& law);
/// S at corners c1 x c2, row-major. Sums over class pairs instead of cells.
std::vector<double> evaluate_2d(const DirectionPartition& p1, const DirectionPartition& p2,
                                const std::vector<std::int64_t>& c1,
                                const std::vector<std::int64_t>& c2, Seed128 seed);
/// Every X_ij, row-major n1 x n2 (small instances and tests).
std::vector<double> materialize_2d(const DirectionPartition& p1, const DirectionPartition& p2,
                                   Seed128 seed);

/// sigma and Z_H(n) of the model.
struct Normalization {
  double sigma = 1.0;
  double z = 1.0;
};
Normalization normalization(const ModelSpec& spec);

/// Exact finite-n Var(S_n) at the full horizon.
double exact_variance(const ModelSpec& spec);

FieldSample simulate_karlin1d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);
FieldSample simulate_hs1d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);
FieldSample simulate_karlin2d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);
FieldSample simulate_hs2d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);
FieldSample simulate_combined(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);
/// Dispatches on spec.kind.
FieldSample simulate(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed);

/// Rectangle increment between corner indices on the grid extended by the
/// origin: index 0 is the origin, index k is the k-th grid point. 1D
/// samples ignore the second coordinate. Throws std::out_of_range.
double rectangle_sum(const FieldSample& sample, std::array<std::size_t, 2> a,
                     std::array<std::size_t, 2> b);

}  // namespace pfield
