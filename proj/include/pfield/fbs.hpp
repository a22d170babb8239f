#pragma once

#include <array>
#include <vector>

#include "pfield/fields.hpp"
#include "pfield/rng.hpp"

namespace pfield {

struct HurstPair {
  double H1 = 0.5;
  double H2 = 0.5;

  /// Throws std::domain_error unless both lie in (0,1).
  void validate() const;
};

/// Hurst indices of the limit field of a model; H2 is unused for 1D kinds.
HurstPair hurst_of(const ModelSpec& spec);

/// 1/2 (t^2H + s^2H - |t-s|^2H).
double fbm_cov(double H, double s, double t);
double fbs_cov(const HurstPair& H, std::array<double, 2> s, std::array<double, 2> t);

/// Covariance of the limit at the grid points, row-major over (t1[a], t2[b]);
/// a 1D grid (t2 empty) gives the fBm Gram matrix with H1.
std::vector<double> limit_gram(const HurstPair& H, const CornerGrid& grid);

/// Lower Cholesky factor of a symmetric positive semidefinite matrix
/// (row-major, n x n). Adds diagonal jitter up to 1e-10 if needed; throws
/// std::runtime_error if that is not enough.
std::vector<double> cholesky_with_jitter(const std::vector<double>& gram, std::size_t n);

/// Exact Gaussian sampler for the fBs on a grid. The product kernel lets the
/// factor be the Kronecker product of the two 1D factors; the dense factor of
/// the full Gram matrix is kept as an alternative for m1 m2 <= 4096.
class FbsSampler {
 public:
  enum class Method { Tensor, Dense };

  FbsSampler(const HurstPair& H, const CornerGrid& grid, Method method = Method::Tensor);

  std::size_t size() const { return m1_ * m2_; }
  /// Row-major m1 x m2 sample.
  std::vector<double> sample(RandomStream& rng) const;

 private:
  Method method_;
  std::size_t m1_ = 0, m2_ = 1;
  std::vector<double> L1_, L2_, L_;
};

std::vector<double> sample_fbs(const HurstPair& H, const CornerGrid& grid, RandomStream& rng);

/// Smallest eigenvalue of a symmetric row-major matrix.
double min_eigenvalue(const std::vector<double>& sym, std::size_t n);

}  // namespace pfield
