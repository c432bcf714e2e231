#pragma once

#include <cstddef>
#include <vector>

namespace spde {

// Truncated element of H = L^2(0,1): coefficients against the orthonormal
// eigenbasis f_k. The coefficient basis is orthonormal, so the H norm is the
// Euclidean norm of the coefficients.
struct SpectralVector {
  std::vector<double> coeffs;

  SpectralVector() = default;
  explicit SpectralVector(std::size_t n) : coeffs(n, 0.0) {}
  explicit SpectralVector(std::vector<double> c) : coeffs(std::move(c)) {}

  std::size_t n_modes() const { return coeffs.size(); }
  double& operator[](std::size_t k) { return coeffs[k]; }
  double operator[](std::size_t k) const { return coeffs[k]; }

  double norm() const;
  bool all_finite() const;

  static SpectralVector unit_mode(std::size_t n, std::size_t k, double scale = 1.0);
};

// Eigenvalues of -B: strictly positive and non-decreasing. The default
// generator is the Dirichlet Laplacian on (0,1): mu_k = pi^2 (k+1)^2.
class Spectrum {
 public:
  explicit Spectrum(std::vector<double> eigenvalues);
  static Spectrum dirichlet_laplacian(std::size_t n);

  std::size_t size() const { return mu_.size(); }
  double operator[](std::size_t k) const { return mu_[k]; }
  double mu0() const { return mu_.front(); }
  double mu_max() const { return mu_.back(); }
  const std::vector<double>& eigenvalues() const { return mu_; }

 private:
  std::vector<double> mu_;
};

// mu_k = pi^2 (k+1)^2
double dirichlet_eigenvalue(std::size_t k);

// f_k(xi) = sqrt(2) sin((k+1) pi xi); xi must lie in (0,1).
double eigenfunction_at(std::size_t k, double xi);

// Samples at the interior uniform grid xi_j = j/(M+1), j = 1..M.
struct GridFunction {
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(std::size_t m) : values(m, 0.0) {}
  explicit GridFunction(std::vector<double> v) : values(std::move(v)) {}

  std::size_t size() const { return values.size(); }
  double& operator[](std::size_t j) { return values[j]; }
  double operator[](std::size_t j) const { return values[j]; }
};

// e^{tB} y: coefficient k scaled by e^{-mu_k t}.
SpectralVector apply_semigroup(const Spectrum& s, double t, const SpectralVector& y);

// R_tau^j y with R_tau = (I - tau B)^{-1}: coefficient k scaled by (1 + mu_k tau)^{-j}.
SpectralVector apply_resolvent(const Spectrum& s, double tau, const SpectralVector& y,
                               long power = 1);

// (-B)^b y: coefficient k scaled by mu_k^b.
SpectralVector fractional_power_apply(const Spectrum& s, double b, const SpectralVector& y);

// |y|_b = sqrt(sum mu_k^{2b} y_k^2); b = 0 recovers the H norm.
double sobolev_norm(const Spectrum& s, double b, const SpectralVector& y);

// Direct O(N*M) sine transform between coefficients and the interior grid.
// Forward is plain summation; inverse uses the discrete sine orthogonality
// with weight 1/(M+1), which makes inverse(forward(y)) exact when M >= N.
class SineTransformPlan {
 public:
  SineTransformPlan(std::size_t n_modes, std::size_t m_grid);

  std::size_t n_modes() const { return n_; }
  std::size_t grid_size() const { return m_; }

  GridFunction forward(const SpectralVector& y) const;
  SpectralVector inverse(const GridFunction& f) const;

  double grid_point(std::size_t j) const;  // xi_{j+1} = (j+1)/(M+1)

 private:
  std::size_t n_, m_;
  std::vector<double> basis_;  // m_ x n_, basis_[j*n_+k] = sqrt2 sin((k+1) pi xi_j)
};

GridFunction sine_transform(const SpectralVector& y, std::size_t m_grid);
SpectralVector inverse_sine_transform(const GridFunction& f, std::size_t n_modes);

// Exact operator norms of per-mode symbols. The max over the truncated
// spectrum is completed with the analytic supremum over the continuum tail
// x >= mu_{N-1}, so invariant checks cannot pass by truncation alone.

// |(-B)^{1-kappa} R_tau^j|: sup of x^{1-kappa} / (1+x tau)^j.
double resolvent_smoothing_norm(const Spectrum& s, double tau, long j, double kappa);

// |(-B)^sigma e^{tB}|: sup of x^sigma e^{-x t}.
double semigroup_smoothing_norm(const Spectrum& s, double t, double sigma);

// |(-B)^{-beta} (I - R_tau)|: sup of x^{-beta} * x tau / (1 + x tau).
double resolvent_defect_norm(const Spectrum& s, double tau, double beta);

}  // namespace spde
