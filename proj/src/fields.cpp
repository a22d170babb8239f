#include "pfield/fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "pfield/renewal.hpp"

namespace pfield {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 7> kKindNames = {{
    {ModelKind::Karlin1D, "Karlin1D"},
    {ModelKind::HS1D, "HS1D"},
    {ModelKind::GeneralizedKarlin1D, "GeneralizedKarlin1D"},
    {ModelKind::GeneralizedHS1D, "GeneralizedHS1D"},
    {ModelKind::Karlin2D, "Karlin2D"},
    {ModelKind::HS2D, "HS2D"},
    {ModelKind::Combined2D, "Combined2D"},
}};

[[noreturn]] void bad(const std::string& field, const std::string& what) {
  throw std::invalid_argument(field + ": " + what);
}

bool is_karlin_1d(ModelKind k) {
  return k == ModelKind::Karlin1D || k == ModelKind::GeneralizedKarlin1D;
}
bool is_hs_1d(ModelKind k) { return k == ModelKind::HS1D || k == ModelKind::GeneralizedHS1D; }

void require_kind(const ModelSpec& spec, bool ok, const char* fn) {
  if (!ok) bad("model.kind", std::string(fn) + " cannot simulate " + to_string(spec.kind));
}

DirectionPartition urn_direction(const ModelSpec& spec, std::size_t dir, Seed128 seed) {
  const PowerLawPmf pmf = make_karlin_pmf(spec.alphas[dir]);
  RandomStream rng(seed, dir + 1);
  const UrnPath path = sample_urn(pmf, static_cast<std::size_t>(spec.n[dir]), rng);
  return DirectionPartition::alternating(path);
}

DirectionPartition forest_direction(const ModelSpec& spec, std::size_t dir, Seed128 seed,
                                    double& bound) {
  const PowerLawPmf pmf = make_hs_pmf(spec.alphas[dir]);
  const ForestWindow w = sample_forest(pmf, -spec.depth(dir), spec.n[dir], split_seed(seed, dir + 1));
  bound = std::max(bound, w.truncation_error_bound());
  return DirectionPartition::identical(w);
}

double karlin_sigma_sq(double alpha) { return std::tgamma(1.0 - alpha) * std::exp2(alpha - 1.0); }

double hs_sum_sq(double alpha) { return renewal_summary(alpha).sum_sq; }

FieldSample finish_sample(const ModelSpec& spec, std::vector<std::int64_t> c1,
                          std::vector<std::int64_t> c2, std::vector<double> raw, Seed128 seed,
                          double bound) {
  FieldSample out;
  out.m1 = c1.size();
  out.m2 = c2.size();
  out.corner1 = std::move(c1);
  out.corner2 = std::move(c2);
  out.raw = std::move(raw);
  const Normalization norm = normalization(spec);
  out.sigma = norm.sigma;
  out.normalization = norm.z;
  out.normalized.resize(out.raw.size());
  for (std::size_t i = 0; i < out.raw.size(); ++i) out.normalized[i] = out.raw[i] / norm.z;
  out.two_d = spec.dims() == 2;
  out.seed = seed;
  out.truncation_error_bound = bound;
  return out;
}

// A[d][a] = sum of signs of class d over indices <= c[a].
std::vector<double> class_corner_sums(const DirectionPartition& p, const std::vector<std::int64_t>& c) {
  const std::size_t m = c.size();
  std::vector<double> A(p.classes() * m, 0.0);
  std::size_t seg = 0;
  const std::size_t limit = c.empty() ? 0 : static_cast<std::size_t>(std::min<std::int64_t>(c.back(), p.size()));
  for (std::size_t i = 0; i < limit; ++i) {
    while (static_cast<std::int64_t>(i) >= c[seg]) ++seg;
    A[p.cls[i] * m + seg] += p.sign[i];
  }
  for (std::size_t d = 0; d < p.classes(); ++d) {
    for (std::size_t a = 1; a < m; ++a) A[d * m + a] += A[d * m + a - 1];
  }
  return A;
}

void check_corners(const std::vector<std::int64_t>& c, std::size_t n) {
  for (std::size_t a = 0; a < c.size(); ++a) {
    if (c[a] < 0 || c[a] > static_cast<std::int64_t>(n) || (a > 0 && c[a] < c[a - 1])) {
      throw std::invalid_argument("corners must be nondecreasing in [0, n]");
    }
  }
}

}  // namespace

std::string to_string(ModelKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return std::string(name);
  }
  return "?";
}

std::optional<ModelKind> parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

std::size_t ModelSpec::dims() const {
  switch (kind) {
    case ModelKind::Karlin2D:
    case ModelKind::HS2D:
    case ModelKind::Combined2D:
      return 2;
    default:
      return 1;
  }
}

bool ModelSpec::direction_is_hs(std::size_t dir) const {
  switch (kind) {
    case ModelKind::HS1D:
    case ModelKind::GeneralizedHS1D:
    case ModelKind::HS2D:
      return true;
    case ModelKind::Combined2D:
      return dir == 0;
    default:
      return false;
  }
}

std::int64_t ModelSpec::depth(std::size_t dir) const {
  if (dir < forest_depth.size() && forest_depth[dir] > 0) return forest_depth[dir];
  return default_forest_depth(n[dir]);
}

void ModelSpec::validate() const {
  const std::size_t d = dims();
  if (alphas.size() != d) bad("model.alphas", "expected " + std::to_string(d) + " value(s)");
  if (n.size() != d) bad("model.n", "expected " + std::to_string(d) + " value(s)");
  for (std::size_t q = 0; q < d; ++q) {
    const std::string idx = "[" + std::to_string(q) + "]";
    const double a = alphas[q];
    if (direction_is_hs(q)) {
      if (!(a > 0.0 && a < 0.5)) bad("model.alphas" + idx, "HS direction needs alpha in (0,1/2)");
    } else if (!(a > 0.0 && a < 1.0)) {
      bad("model.alphas" + idx, "Karlin direction needs alpha in (0,1)");
    }
    if (n[q] < 1) bad("model.n" + idx, "must be >= 1");
  }
  if (forest_depth.size() > d) bad("model.forest_depth", "more entries than directions");
  for (std::size_t q = 0; q < forest_depth.size(); ++q) {
    if (forest_depth[q] < 0) bad("model.forest_depth[" + std::to_string(q) + "]", "must be >= 0");
  }
  const bool generalized = kind == ModelKind::GeneralizedKarlin1D || kind == ModelKind::GeneralizedHS1D;
  if (!generalized && marginal.kind() != MarginalLaw::Kind::RademacherSign) {
    bad("model.marginal", "only the generalized 1D models take a marginal law");
  }
}

void CornerGrid::validate(bool two_d) const {
  auto check = [](const std::vector<double>& t, const char* field) {
    if (t.empty()) bad(field, "must be nonempty");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0 && t[i] <= 1.0)) bad(field, "entries must lie in (0,1]");
      if (i > 0 && !(t[i] > t[i - 1])) bad(field, "entries must be strictly increasing");
    }
  };
  check(t1, "grid.t1");
  if (two_d) {
    check(t2, "grid.t2");
  } else if (!t2.empty()) {
    bad("grid.t2", "must be absent for 1D models");
  }
}

std::vector<std::int64_t> corner_indices(std::int64_t n, const std::vector<double>& t) {
  std::vector<std::int64_t> out;
  out.reserve(t.size());
  for (double x : t) {
    // guards against 0.3 * 10 = 2.9999999999999996
    const auto c = static_cast<std::int64_t>(std::floor(static_cast<double>(n) * x + 1e-9));
    out.push_back(std::clamp<std::int64_t>(c, 0, n));
  }
  return out;
}

DirectionPartition DirectionPartition::alternating(const UrnPath& path) {
  DirectionPartition p;
  p.cls.resize(path.size());
  p.sign.resize(path.size());
  std::unordered_map<std::uint64_t, std::uint32_t> ids;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const auto [it, fresh] = ids.try_emplace(path.labels[i], static_cast<std::uint32_t>(p.class_key.size()));
    if (fresh) p.class_key.push_back(path.labels[i]);
    p.cls[i] = it->second;
    p.sign[i] = path.running_parity[i] ? 1 : -1;
  }
  return p;
}

DirectionPartition DirectionPartition::identical(const ForestWindow& window) {
  DirectionPartition p;
  const auto& roots = window.observed_roots();
  p.cls.resize(roots.size());
  p.sign.assign(roots.size(), 1);
  std::unordered_map<std::int64_t, std::uint32_t> ids;
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const auto [it, fresh] = ids.try_emplace(roots[i], static_cast<std::uint32_t>(p.class_key.size()));
    if (fresh) p.class_key.push_back(std::bit_cast<std::uint64_t>(roots[i]));
    p.cls[i] = it->second;
  }
  return p;
}

int pair_spin(Seed128 seed, std::uint64_t key1, std::uint64_t key2) {
  return (keyed_hash(seed, tag::kSign, key1, key2) >> 63) ? -1 : 1;
}

double class_value(Seed128 seed, std::uint64_t key, const MarginalLaw& law) {
  return law.from_uniform(bits_to_open_unit(keyed_hash(seed, tag::kMarginal, key, 0)));
}

std::vector<double> evaluate_1d(const DirectionPartition& p, const std::vector<std::int64_t>& c,
                                Seed128 seed, const MarginalLaw& law) {
  check_corners(c, p.size());
  const std::size_t m = c.size();
  const std::vector<double> A = class_corner_sums(p, c);
  std::vector<double> S(m, 0.0);
  for (std::size_t d = 0; d < p.classes(); ++d) {
    const double v = class_value(seed, p.class_key[d], law);
    for (std::size_t a = 0; a < m; ++a) S[a] += v * A[d * m + a];
  }
  return S;
}

std::vector<double> evaluate_2d(const DirectionPartition& p1, const DirectionPartition& p2,
                                const std::vector<std::int64_t>& c1,
                                const std::vector<std::int64_t>& c2, Seed128 seed) {
  check_corners(c1, p1.size());
  check_corners(c2, p2.size());
  const std::size_t m1 = c1.size(), m2 = c2.size();
  const std::vector<double> A = class_corner_sums(p1, c1);
  const std::vector<double> B = class_corner_sums(p2, c2);
  std::vector<double> S(m1 * m2, 0.0);
  std::vector<double> T(m2);
  for (std::size_t d1 = 0; d1 < p1.classes(); ++d1) {
    const auto row = A.begin() + static_cast<std::ptrdiff_t>(d1 * m1);
    if (std::all_of(row, row + static_cast<std::ptrdiff_t>(m1), [](double x) { return x == 0.0; })) continue;
    std::fill(T.begin(), T.end(), 0.0);
    for (std::size_t d2 = 0; d2 < p2.classes(); ++d2) {
      const double e = pair_spin(seed, p1.class_key[d1], p2.class_key[d2]);
      for (std::size_t b = 0; b < m2; ++b) T[b] += e * B[d2 * m2 + b];
    }
    for (std::size_t a = 0; a < m1; ++a) {
      const double w = A[d1 * m1 + a];
      if (w == 0.0) continue;
      for (std::size_t b = 0; b < m2; ++b) S[a * m2 + b] += w * T[b];
    }
  }
  return S;
}

std::vector<double> materialize_2d(const DirectionPartition& p1, const DirectionPartition& p2,
                                   Seed128 seed) {
  const std::size_t n1 = p1.size(), n2 = p2.size();
  std::vector<double> X(n1 * n2);
  for (std::size_t i = 0; i < n1; ++i) {
    for (std::size_t j = 0; j < n2; ++j) {
      X[i * n2 + j] = pair_spin(seed, p1.class_key[p1.cls[i]], p2.class_key[p2.cls[j]]) *
                      p1.sign[i] * p2.sign[j];
    }
  }
  return X;
}

Normalization normalization(const ModelSpec& spec) {
  spec.validate();
  Normalization out;
  const auto& a = spec.alphas;
  auto nd = [&](std::size_t q) { return static_cast<double>(spec.n[q]); };
  switch (spec.kind) {
    case ModelKind::Karlin1D:
    case ModelKind::GeneralizedKarlin1D: {
      const PowerLawPmf pmf = make_karlin_pmf(a[0]);
      out.sigma = std::sqrt(karlin_sigma_sq(a[0]) * spec.marginal.variance());
      out.z = out.sigma * std::pow(nd(0), a[0] / 2.0) * std::sqrt(pmf.sv_constant());
      break;
    }
    case ModelKind::HS1D:
    case ModelKind::GeneralizedHS1D:
      out.sigma = std::sqrt(c_alpha(a[0]) / hs_sum_sq(a[0]) * spec.marginal.variance());
      out.z = out.sigma * std::pow(nd(0), a[0] + 0.5);
      break;
    case ModelKind::Karlin2D: {
      const PowerLawPmf p1 = make_karlin_pmf(a[0]), p2 = make_karlin_pmf(a[1]);
      out.sigma = std::sqrt(sigma_sq(TheoremModel::Karlin2D, a[0], a[1]));
      out.z = out.sigma * std::pow(nd(0), a[0] / 2.0) * std::pow(nd(1), a[1] / 2.0) *
              std::sqrt(p1.sv_constant() * p2.sv_constant());
      break;
    }
    case ModelKind::HS2D:
      out.sigma = std::sqrt(sigma_sq(TheoremModel::HS2D, a[0], a[1], hs_sum_sq(a[0]), hs_sum_sq(a[1])));
      out.z = out.sigma * std::pow(nd(0), a[0] + 0.5) * std::pow(nd(1), a[1] + 0.5);
      break;
    case ModelKind::Combined2D: {
      const PowerLawPmf p2 = make_karlin_pmf(a[1]);
      out.sigma = std::sqrt(sigma_sq(TheoremModel::Combined, a[0], a[1], hs_sum_sq(a[0])));
      out.z = out.sigma * std::pow(nd(0), a[0] + 0.5) * std::pow(nd(1), a[1] / 2.0) *
              std::sqrt(p2.sv_constant());
      break;
    }
  }
  return out;
}

double exact_variance(const ModelSpec& spec) {
  spec.validate();
  const auto& a = spec.alphas;
  auto karlin = [&](std::size_t q) {
    return expected_occupancy(make_karlin_pmf(a[q]), static_cast<std::uint64_t>(spec.n[q])).EK_odd;
  };
  auto hs = [&](std::size_t q) { return hs_exact_variance(a[q], spec.n[q]); };
  switch (spec.kind) {
    case ModelKind::Karlin1D:
    case ModelKind::GeneralizedKarlin1D:
      return karlin(0) * spec.marginal.variance();
    case ModelKind::HS1D:
    case ModelKind::GeneralizedHS1D:
      return hs(0) * spec.marginal.variance();
    case ModelKind::Karlin2D:
      return karlin(0) * karlin(1);
    case ModelKind::HS2D:
      return hs(0) * hs(1);
    case ModelKind::Combined2D:
      return hs(0) * karlin(1);
  }
  return 0.0;
}

FieldSample simulate_karlin1d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  require_kind(spec, is_karlin_1d(spec.kind), "simulate_karlin1d");
  spec.validate();
  grid.validate(false);
  const DirectionPartition p = urn_direction(spec, 0, seed);
  auto c = corner_indices(spec.n[0], grid.t1);
  auto S = evaluate_1d(p, c, seed, spec.marginal);
  return finish_sample(spec, std::move(c), {1}, std::move(S), seed, 0.0);
}

FieldSample simulate_hs1d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  require_kind(spec, is_hs_1d(spec.kind), "simulate_hs1d");
  spec.validate();
  grid.validate(false);
  double bound = 0.0;
  const DirectionPartition p = forest_direction(spec, 0, seed, bound);
  auto c = corner_indices(spec.n[0], grid.t1);
  auto S = evaluate_1d(p, c, seed, spec.marginal);
  return finish_sample(spec, std::move(c), {1}, std::move(S), seed, bound);
}

namespace {
FieldSample simulate_2d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  spec.validate();
  grid.validate(true);
  double bound = 0.0;
  const DirectionPartition p1 =
      spec.direction_is_hs(0) ? forest_direction(spec, 0, seed, bound) : urn_direction(spec, 0, seed);
  const DirectionPartition p2 =
      spec.direction_is_hs(1) ? forest_direction(spec, 1, seed, bound) : urn_direction(spec, 1, seed);
  auto c1 = corner_indices(spec.n[0], grid.t1);
  auto c2 = corner_indices(spec.n[1], grid.t2);
  auto S = evaluate_2d(p1, p2, c1, c2, seed);
  return finish_sample(spec, std::move(c1), std::move(c2), std::move(S), seed, bound);
}
}  // namespace

FieldSample simulate_karlin2d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  require_kind(spec, spec.kind == ModelKind::Karlin2D, "simulate_karlin2d");
  return simulate_2d(spec, grid, seed);
}

FieldSample simulate_hs2d(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  require_kind(spec, spec.kind == ModelKind::HS2D, "simulate_hs2d");
  return simulate_2d(spec, grid, seed);
}

FieldSample simulate_combined(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  require_kind(spec, spec.kind == ModelKind::Combined2D, "simulate_combined");
  return simulate_2d(spec, grid, seed);
}

FieldSample simulate(const ModelSpec& spec, const CornerGrid& grid, Seed128 seed) {
  switch (spec.kind) {
    case ModelKind::Karlin1D:
    case ModelKind::GeneralizedKarlin1D:
      return simulate_karlin1d(spec, grid, seed);
    case ModelKind::HS1D:
    case ModelKind::GeneralizedHS1D:
      return simulate_hs1d(spec, grid, seed);
    case ModelKind::Karlin2D:
      return simulate_karlin2d(spec, grid, seed);
    case ModelKind::HS2D:
      return simulate_hs2d(spec, grid, seed);
    case ModelKind::Combined2D:
      return simulate_combined(spec, grid, seed);
  }
  throw std::invalid_argument("model.kind: unknown");
}

double rectangle_sum(const FieldSample& s, std::array<std::size_t, 2> a, std::array<std::size_t, 2> b) {
  const bool two_d = s.two_d;
  if (!two_d) {
    a[1] = 0;
    b[1] = 1;
  }
  if (a[0] > b[0] || a[1] > b[1] || b[0] > s.m1 || b[1] > s.m2) {
    throw std::out_of_range("rectangle corners off the grid");
  }
  auto at = [&](std::size_t i, std::size_t j) -> double {
    if (i == 0 || j == 0) return 0.0;
    return s.raw_at(i - 1, j - 1);
  };
  if (!two_d) return at(b[0], 1) - at(a[0], 1);
  return at(b[0], b[1]) - at(a[0], b[1]) - at(b[0], a[1]) + at(a[0], a[1]);
}

}  // namespace pfield
