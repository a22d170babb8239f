#include "pfield/renewal.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace pfield {

namespace {

// The FFTW planner is not reentrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftBuffers {
  explicit FftBuffers(std::size_t n) : n(n) {
    real = fftw_alloc_real(n);
    spec_a = fftw_alloc_complex(n / 2 + 1);
    spec_b = fftw_alloc_complex(n / 2 + 1);
    std::lock_guard lock(fftw_planner_mutex());
    fwd_a = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec_a, FFTW_ESTIMATE);
    fwd_b = fftw_plan_dft_r2c_1d(static_cast<int>(n), real, spec_b, FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), spec_a, real, FFTW_ESTIMATE);
  }
  ~FftBuffers() {
    {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(fwd_a);
      fftw_destroy_plan(fwd_b);
      fftw_destroy_plan(inv);
    }
    fftw_free(real);
    fftw_free(spec_a);
    fftw_free(spec_b);
  }
  FftBuffers(const FftBuffers&) = delete;
  FftBuffers& operator=(const FftBuffers&) = delete;

  // out[0..m) = (a * b)[0..m), with a, b of length <= m and n >= 2m.
  void multiply(std::span<const double> a, std::span<const double> b, std::span<double> out) {
    std::fill(real, real + n, 0.0);
    std::copy(a.begin(), a.end(), real);
    fftw_execute(fwd_a);
    std::fill(real, real + n, 0.0);
    std::copy(b.begin(), b.end(), real);
    fftw_execute(fwd_b);
    for (std::size_t i = 0; i <= n / 2; ++i) {
      const double re = spec_a[i][0] * spec_b[i][0] - spec_a[i][1] * spec_b[i][1];
      const double im = spec_a[i][0] * spec_b[i][1] + spec_a[i][1] * spec_b[i][0];
      spec_a[i][0] = re;
      spec_a[i][1] = im;
    }
    fftw_execute(inv);
    const double scale = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = real[i] * scale;
  }

  std::size_t n;
  double* real;
  fftw_complex* spec_a;
  fftw_complex* spec_b;
  fftw_plan fwd_a, fwd_b, inv;
};

std::vector<double> hs_probabilities(const PowerLawPmf& pmf, std::size_t kmax) {
  std::vector<double> p(kmax);
  for (std::size_t k = 0; k < kmax; ++k) p[k] = pmf.pmf_at(k + 1);
  return p;
}

}  // namespace

std::vector<double> renewal_direct(std::span<const double> p, std::size_t kmax) {
  std::vector<double> q(kmax + 1, 0.0);
  q[0] = 1.0;
  for (std::size_t k = 1; k <= kmax; ++k) {
    double sum = 0.0, comp = 0.0;
    const std::size_t jmax = std::min(k, p.size());
    for (std::size_t j = 1; j <= jmax; ++j) {
      const double term = p[j - 1] * q[k - j];
      const double t = sum + term;
      comp += (std::abs(sum) >= std::abs(term)) ? (sum - t) + term : (term - t) + sum;
      sum = t;
    }
    q[k] = sum + comp;
  }
  return q;
}

// Q(z) = 1 / (1 - P(z)); Newton iteration g <- g (2 - f g) doubles the
// number of correct coefficients per step.
std::vector<double> renewal_fft(std::span<const double> p, std::size_t kmax) {
  const std::size_t N = kmax + 1;
  std::vector<double> f(N, 0.0);
  f[0] = 1.0;
  for (std::size_t k = 1; k < N && k - 1 < p.size(); ++k) f[k] = -p[k - 1];

  std::vector<double> g{1.0};
  std::vector<double> fg, e;
  std::unique_ptr<FftBuffers> fft;
  std::size_t m = 1;
  while (m < N) {
    const std::size_t m2 = std::min(2 * m, N);
    const std::size_t L = std::bit_ceil(2 * m2);
    if (!fft || fft->n != L) fft = std::make_unique<FftBuffers>(L);
    fg.assign(m2, 0.0);
    fft->multiply(std::span(f).first(m2), g, fg);
    e.assign(m2, 0.0);
    for (std::size_t i = 0; i < m2; ++i) e[i] = -fg[i];
    e[0] += 2.0;
    std::vector<double> next(m2, 0.0);
    fft->multiply(g, e, next);
    g = std::move(next);
    m = m2;
  }
  g.resize(N);
  return g;
}

RenewalSequence RenewalSequence::from_probabilities(std::span<const double> p, std::size_t kmax) {
  if (kmax < 1) throw std::invalid_argument("renewal sequence needs kmax >= 1");
  RenewalSequence rs;
  rs.q_ = kmax <= kDirectRecursionLimit ? renewal_direct(p, kmax) : renewal_fft(p, kmax);
  rs.finish();
  return rs;
}

RenewalSequence RenewalSequence::from_pmf(const PowerLawPmf& pmf, std::size_t kmax) {
  if (pmf.kind() != PmfKind::HsTail) throw std::domain_error("renewal sequence needs an HsTail pmf");
  const auto p = hs_probabilities(pmf, kmax);
  RenewalSequence rs = from_probabilities(p, kmax);
  rs.alpha_ = pmf.alpha();
  return rs;
}

void RenewalSequence::finish() {
  prefix_.assign(q_.size() + 1, 0.0);
  double comp = 0.0;
  for (std::size_t k = 0; k < q_.size(); ++k) {
    const double y = q_[k] - comp;
    const double t = prefix_[k] + y;
    comp = (t - prefix_[k]) - y;
    prefix_[k + 1] = t;
  }
}

RenewalSequence renewal_sequence(const PowerLawPmf& pmf, std::size_t kmax) {
  return RenewalSequence::from_pmf(pmf, kmax);
}

XstarVariance var_xstar(const RenewalSequence& rs) {
  XstarVariance out;
  double comp = 0.0;
  for (double q : rs.q()) {
    const double y = q * q - comp;
    const double t = out.sum_sq + y;
    comp = (t - out.sum_sq) - y;
    out.sum_sq = t;
  }
  const double last = rs.q().back();
  out.tail_increment = last * last;
  out.converged = out.tail_increment < 1e-10;
  out.value = 1.0 / out.sum_sq;
  return out;
}

double WeightProfile::b_at(std::int64_t j) const {
  if (j > n || j < j_min) return 0.0;
  return b[static_cast<std::size_t>(j - j_min)];
}

// With j' = n - j, b_{n,j} = prefix(j'+1) - prefix(max(0, 1-j)).
WeightProfile weights(const RenewalSequence& rs, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("weights need n >= 1");
  const auto kmax = static_cast<std::int64_t>(rs.kmax());
  if (kmax < 16 * n) throw std::invalid_argument("weights need kmax >= 16 n");
  WeightProfile w;
  w.n = n;
  w.j_min = n - kmax + 1;
  w.b.resize(static_cast<std::size_t>(kmax));
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = w.j_min; j <= n; ++j) {
    const auto hi = static_cast<std::size_t>(n - j + 1);
    const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(0, 1 - j));
    const double b = rs.prefix(hi) - rs.prefix(lo);
    w.b[static_cast<std::size_t>(j - w.j_min)] = b;
    const double y = b * b - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  w.b_n_sq = sum;
  return w;
}

double weight_sum_sq(const RenewalSequence& rs, std::int64_t n, std::size_t kmax) {
  if (kmax > rs.kmax() || static_cast<std::int64_t>(kmax) < n) {
    throw std::invalid_argument("weight_sum_sq needs n <= kmax <= rs.kmax()");
  }
  double sum = 0.0, comp = 0.0;
  const std::int64_t j_min = n - static_cast<std::int64_t>(kmax) + 1;
  for (std::int64_t j = j_min; j <= n; ++j) {
    const auto hi = static_cast<std::size_t>(n - j + 1);
    const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(0, 1 - j));
    const double b = rs.prefix(hi) - rs.prefix(lo);
    const double y = b * b - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

double c_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw std::domain_error("c_alpha needs alpha in (0,1/2)");
  const double pi = std::numbers::pi;
  return std::sin(pi * alpha) / (pi * alpha * (2.0 * alpha + 1.0) * std::tgamma(1.0 - 2.0 * alpha));
}

namespace {
double karlin_factor(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("Karlin direction needs alpha in (0,1)");
  return std::tgamma(1.0 - alpha) * std::exp2(alpha - 1.0);
}
}  // namespace

double sigma_sq(TheoremModel model, double alpha1, double alpha2, double sum_sq1, double sum_sq2) {
  switch (model) {
    case TheoremModel::Karlin2D:
      return karlin_factor(alpha1) * karlin_factor(alpha2);
    case TheoremModel::HS2D:
      if (!(sum_sq1 >= 1.0 && sum_sq2 >= 1.0)) throw std::invalid_argument("HS2D needs both renewal sums");
      return c_alpha(alpha1) * c_alpha(alpha2) / (sum_sq1 * sum_sq2);
    case TheoremModel::Combined:
      if (!(sum_sq1 >= 1.0)) throw std::invalid_argument("Combined needs the direction-1 renewal sum");
      return c_alpha(alpha1) * karlin_factor(alpha2) / sum_sq1;
  }
  return 0.0;
}

double p_alpha_weight(double alpha, std::uint64_t r) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("p_alpha needs alpha in (0,1)");
  if (r == 0) throw std::invalid_argument("p_alpha needs r >= 1");
  double w = alpha;
  for (std::uint64_t k = 1; k < r; ++k) {
    const double kk = static_cast<double>(k);
    w *= (kk - alpha) / (kk + 1.0);
  }
  return w;
}

double RenewalSummary::tail_sum_sq(std::size_t M) const {
  double partial = 0.0;
  for (std::size_t k = K; k > M; --k) partial += q[k] * q[k];
  const double g2 = 2.0 * decay_exponent;
  if (!(g2 > 1.0)) return std::numeric_limits<double>::infinity();
  // integral over (max(M,K), inf) of q_K^2 (k/K)^(-2 gamma) dk
  const double from = static_cast<double>(std::max(M, K));
  const double qK = q[K];
  const double Kd = static_cast<double>(K);
  const double beyond = qK * qK * Kd * std::pow(from / Kd, 1.0 - g2) / (g2 - 1.0);
  return (M >= K ? 0.0 : partial) + beyond;
}

const RenewalSummary& renewal_summary(double alpha, std::size_t min_K) {
  static std::mutex mutex;
  static std::map<std::pair<double, std::size_t>, std::unique_ptr<RenewalSummary>> cache;
  const std::size_t K = std::max<std::size_t>(std::size_t{1} << 20, std::bit_ceil(std::max<std::size_t>(min_K, 1)));
  std::lock_guard lock(mutex);
  auto& slot = cache[{alpha, K}];
  if (!slot) {
    const PowerLawPmf pmf = make_hs_pmf(alpha);
    auto s = std::make_unique<RenewalSummary>();
    s->alpha = alpha;
    s->K = K;
    s->q = renewal_fft(hs_probabilities(pmf, K), K);
    double sum = 0.0, comp = 0.0;
    for (double q : s->q) {
      const double y = q * q - comp;
      const double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    s->sum_sq_partial = sum;
    s->decay_exponent = -std::log2(s->q[K] / s->q[K / 2]);
    s->sum_sq = sum + s->tail_sum_sq(K);
    slot = std::move(s);
  }
  return *slot;
}

double forest_truncation_bound(double alpha, std::int64_t depth) {
  if (depth < 1) throw std::invalid_argument("forest depth must be positive");
  const auto M = static_cast<std::size_t>(depth);
  return renewal_summary(alpha, 8 * M).tail_sum_sq(M);
}

double hs_exact_variance(double alpha, std::int64_t n) {
  const RenewalSummary& s = renewal_summary(alpha, 16 * static_cast<std::size_t>(n));
  // Prefix sums over the cached q; b_{n,j} for j in (n-K, n].
  std::vector<double> prefix(s.q.size() + 1, 0.0);
  for (std::size_t k = 0; k < s.q.size(); ++k) prefix[k + 1] = prefix[k] + s.q[k];
  const auto K = static_cast<std::int64_t>(s.K);
  double sum = 0.0, comp = 0.0;
  for (std::int64_t j = n - K + 1; j <= n; ++j) {
    const auto hi = static_cast<std::size_t>(n - j + 1);
    const auto lo = static_cast<std::size_t>(std::max<std::int64_t>(0, 1 - j));
    const double b = prefix[hi] - prefix[lo];
    const double y = b * b - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  // j <= n-K: b_{n,j} is n q_k to first order with k = n-j > K.
  const double nd = static_cast<double>(n);
  sum += nd * nd * s.tail_sum_sq(s.K);
  return sum / s.sum_sq;
}

DoublingDiagnostic weight_doubling_check(double alpha, std::int64_t n, std::size_t kmax) {
  const RenewalSequence rs = renewal_sequence(make_hs_pmf(alpha), 2 * kmax);
  DoublingDiagnostic d;
  d.n = n;
  d.kmax = kmax;
  d.b_sq = weight_sum_sq(rs, n, kmax);
  d.b_sq_doubled = weight_sum_sq(rs, n, 2 * kmax);
  d.relative_change = (d.b_sq_doubled - d.b_sq) / d.b_sq;
  return d;
}

}  // namespace pfield
