#include "pfield/fbs.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace pfield {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<double> gram_1d(double H, const std::vector<double>& t) {
  const std::size_t m = t.size();
  std::vector<double> g(m * m);
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = 0; b < m; ++b) g[a * m + b] = fbm_cov(H, t[a], t[b]);
  }
  return g;
}

}  // namespace

void HurstPair::validate() const {
  if (!(H1 > 0.0 && H1 < 1.0) || !(H2 > 0.0 && H2 < 1.0)) {
    throw std::domain_error("Hurst indices must lie in (0,1)");
  }
}

HurstPair hurst_of(const ModelSpec& spec) {
  const auto& a = spec.alphas;
  auto h = [&](std::size_t q) { return spec.direction_is_hs(q) ? a[q] + 0.5 : a[q] / 2.0; };
  HurstPair H;
  H.H1 = h(0);
  if (spec.dims() == 2) H.H2 = h(1);
  return H;
}

double fbm_cov(double H, double s, double t) {
  if (s < 0.0 || t < 0.0) throw std::domain_error("fbm_cov needs s, t >= 0");
  const double e = 2.0 * H;
  return 0.5 * (std::pow(t, e) + std::pow(s, e) - std::pow(std::abs(t - s), e));
}

double fbs_cov(const HurstPair& H, std::array<double, 2> s, std::array<double, 2> t) {
  return fbm_cov(H.H1, s[0], t[0]) * fbm_cov(H.H2, s[1], t[1]);
}

std::vector<double> limit_gram(const HurstPair& H, const CornerGrid& grid) {
  if (grid.t2.empty()) return gram_1d(H.H1, grid.t1);
  const std::size_t m1 = grid.t1.size(), m2 = grid.t2.size(), m = m1 * m2;
  std::vector<double> g(m * m);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      g[i * m + j] = fbs_cov(H, {grid.t1[i / m2], grid.t2[i % m2]}, {grid.t1[j / m2], grid.t2[j % m2]});
    }
  }
  return g;
}

std::vector<double> cholesky_with_jitter(const std::vector<double>& gram, std::size_t n) {
  const Eigen::Map<const RowMat> G(gram.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (double jitter : {0.0, 1e-14, 1e-13, 1e-12, 1e-11, 1e-10}) {
    RowMat A = G;
    A.diagonal().array() += jitter;
    Eigen::LLT<RowMat> llt(A);
    if (llt.info() == Eigen::Success) {
      RowMat L = llt.matrixL();
      return std::vector<double>(L.data(), L.data() + L.size());
    }
  }
  throw std::runtime_error("covariance factorization failed even with 1e-10 jitter");
}

FbsSampler::FbsSampler(const HurstPair& H, const CornerGrid& grid, Method method) : method_(method) {
  const bool two_d = !grid.t2.empty();
  H.validate();
  grid.validate(two_d);
  m1_ = grid.t1.size();
  m2_ = two_d ? grid.t2.size() : 1;
  if (method_ == Method::Dense) {
    if (m1_ * m2_ > 4096) throw std::invalid_argument("dense factorization limited to 4096 points");
    L_ = cholesky_with_jitter(limit_gram(H, grid), m1_ * m2_);
  } else {
    L1_ = cholesky_with_jitter(gram_1d(H.H1, grid.t1), m1_);
    L2_ = two_d ? cholesky_with_jitter(gram_1d(H.H2, grid.t2), m2_) : std::vector<double>{1.0};
  }
}

std::vector<double> FbsSampler::sample(RandomStream& rng) const {
  const auto m1 = static_cast<Eigen::Index>(m1_), m2 = static_cast<Eigen::Index>(m2_);
  std::vector<double> out(m1_ * m2_);
  if (method_ == Method::Dense) {
    Eigen::VectorXd z(m1 * m2);
    for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
    const Eigen::Map<const RowMat> L(L_.data(), m1 * m2, m1 * m2);
    Eigen::Map<Eigen::VectorXd>(out.data(), m1 * m2) = L.triangularView<Eigen::Lower>() * z;
    return out;
  }
  // L1 Z L2^T has covariance K1 (x) K2.
  RowMat Z(m1, m2);
  for (Eigen::Index i = 0; i < m1; ++i) {
    for (Eigen::Index j = 0; j < m2; ++j) Z(i, j) = rng.normal();
  }
  const Eigen::Map<const RowMat> L1(L1_.data(), m1, m1);
  const Eigen::Map<const RowMat> L2(L2_.data(), m2, m2);
  Eigen::Map<RowMat>(out.data(), m1, m2) = L1 * Z * L2.transpose();
  return out;
}

std::vector<double> sample_fbs(const HurstPair& H, const CornerGrid& grid, RandomStream& rng) {
  return FbsSampler(H, grid).sample(rng);
}

double min_eigenvalue(const std::vector<double>& sym, std::size_t n) {
  const Eigen::Map<const RowMat> A(sym.data(), static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  Eigen::SelfAdjointEigenSolver<RowMat> es(A, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace pfield
