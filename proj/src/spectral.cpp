#include "spde/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spde/util.hpp"

namespace spde {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;
}  // namespace

double SpectralVector::norm() const {
  KahanSum s;
  for (double c : coeffs) s.add(c * c);
  return std::sqrt(s.value());
}

bool SpectralVector::all_finite() const {
  for (double c : coeffs) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

SpectralVector SpectralVector::unit_mode(std::size_t n, std::size_t k, double scale) {
  if (k >= n) throw std::invalid_argument("unit_mode: mode index out of range");
  SpectralVector y(n);
  y[k] = scale;
  return y;
}

Spectrum::Spectrum(std::vector<double> eigenvalues) : mu_(std::move(eigenvalues)) {
  if (mu_.empty()) throw std::invalid_argument("Spectrum: empty");
  double prev = 0.0;
  for (double m : mu_) {
    if (!(m > 0.0) || !std::isfinite(m)) {
      throw std::invalid_argument("Spectrum: eigenvalues must be positive and finite");
    }
    if (m < prev) throw std::invalid_argument("Spectrum: eigenvalues must be non-decreasing");
    prev = m;
  }
}

Spectrum Spectrum::dirichlet_laplacian(std::size_t n) {
  std::vector<double> mu(n);
  for (std::size_t k = 0; k < n; ++k) mu[k] = dirichlet_eigenvalue(k);
  return Spectrum(std::move(mu));
}

double dirichlet_eigenvalue(std::size_t k) {
  const double kk = static_cast<double>(k + 1);
  return kPi * kPi * kk * kk;
}

double eigenfunction_at(std::size_t k, double xi) {
  if (!(xi > 0.0 && xi < 1.0)) {
    throw std::domain_error("eigenfunction_at: xi must lie in (0,1)");
  }
  return kSqrt2 * std::sin(static_cast<double>(k + 1) * kPi * xi);
}

SpectralVector apply_semigroup(const Spectrum& s, double t, const SpectralVector& y) {
  if (t < 0.0) throw std::domain_error("apply_semigroup: t must be >= 0");
  SpectralVector out(y.n_modes());
  for (std::size_t k = 0; k < y.n_modes(); ++k) {
    out[k] = std::exp(-s[k] * t) * y[k];
  }
  return out;
}

SpectralVector apply_resolvent(const Spectrum& s, double tau, const SpectralVector& y,
                               long power) {
  if (!(tau > 0.0)) throw std::domain_error("apply_resolvent: tau must be > 0");
  if (power < 1) throw std::domain_error("apply_resolvent: power must be >= 1");
  SpectralVector out(y.n_modes());
  for (std::size_t k = 0; k < y.n_modes(); ++k) {
    out[k] = y[k] / std::pow(1.0 + s[k] * tau, static_cast<double>(power));
  }
  return out;
}

SpectralVector fractional_power_apply(const Spectrum& s, double b, const SpectralVector& y) {
  SpectralVector out(y.n_modes());
  for (std::size_t k = 0; k < y.n_modes(); ++k) {
    out[k] = std::pow(s[k], b) * y[k];
  }
  return out;
}

double sobolev_norm(const Spectrum& s, double b, const SpectralVector& y) {
  KahanSum sum;
  for (std::size_t k = 0; k < y.n_modes(); ++k) {
    sum.add(std::pow(s[k], 2.0 * b) * y[k] * y[k]);
  }
  return std::sqrt(sum.value());
}

SineTransformPlan::SineTransformPlan(std::size_t n_modes, std::size_t m_grid)
    : n_(n_modes), m_(m_grid), basis_(n_modes * m_grid) {
  if (n_modes == 0) throw std::invalid_argument("SineTransformPlan: n_modes == 0");
  if (m_grid < n_modes) {
    throw std::invalid_argument("SineTransformPlan: grid size M must satisfy M >= N");
  }
  for (std::size_t j = 0; j < m_; ++j) {
    const double xi = static_cast<double>(j + 1) / static_cast<double>(m_ + 1);
    for (std::size_t k = 0; k < n_; ++k) {
      basis_[j * n_ + k] = kSqrt2 * std::sin(static_cast<double>(k + 1) * kPi * xi);
    }
  }
}

double SineTransformPlan::grid_point(std::size_t j) const {
  return static_cast<double>(j + 1) / static_cast<double>(m_ + 1);
}

GridFunction SineTransformPlan::forward(const SpectralVector& y) const {
  if (y.n_modes() != n_) throw std::invalid_argument("forward: mode count mismatch");
  GridFunction f(m_);
  for (std::size_t j = 0; j < m_; ++j) {
    const double* row = &basis_[j * n_];
    double acc = 0.0;
    for (std::size_t k = 0; k < n_; ++k) acc += row[k] * y[k];
    f[j] = acc;
  }
  return f;
}

SpectralVector SineTransformPlan::inverse(const GridFunction& f) const {
  if (f.size() != m_) throw std::invalid_argument("inverse: grid size mismatch");
  SpectralVector y(n_);
  for (std::size_t j = 0; j < m_; ++j) {
    const double* row = &basis_[j * n_];
    const double fj = f[j];
    for (std::size_t k = 0; k < n_; ++k) y[k] += row[k] * fj;
  }
  const double w = 1.0 / static_cast<double>(m_ + 1);
  for (std::size_t k = 0; k < n_; ++k) y[k] *= w;
  return y;
}

GridFunction sine_transform(const SpectralVector& y, std::size_t m_grid) {
  return SineTransformPlan(y.n_modes(), m_grid).forward(y);
}

SpectralVector inverse_sine_transform(const GridFunction& f, std::size_t n_modes) {
  return SineTransformPlan(n_modes, f.size()).inverse(f);
}

double resolvent_smoothing_norm(const Spectrum& s, double tau, long j, double kappa) {
  if (!(tau > 0.0)) throw std::domain_error("resolvent_smoothing_norm: tau must be > 0");
  if (j < 1) throw std::domain_error("resolvent_smoothing_norm: j must be >= 1");
  const auto symbol = [&](double x) {
    return std::pow(x, 1.0 - kappa) / std::pow(1.0 + x * tau, static_cast<double>(j));
  };
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) best = std::max(best, symbol(s[k]));
  // Continuum tail over x >= mu_{N-1}. The symbol peaks at
  // x* = (1-kappa) / (tau (j - 1 + kappa)) and decays beyond, except for
  // j = 1, kappa = 0 where it increases to the supremum 1/tau.
  const double denom = static_cast<double>(j) - 1.0 + kappa;
  double tail;
  if (denom <= 0.0) {
    tail = 1.0 / tau;
  } else {
    const double xstar = (1.0 - kappa) / (tau * denom);
    tail = symbol(std::max(xstar, s.mu_max()));
  }
  return std::max(best, tail);
}

double semigroup_smoothing_norm(const Spectrum& s, double t, double sigma) {
  if (!(t > 0.0)) throw std::domain_error("semigroup_smoothing_norm: t must be > 0");
  const auto symbol = [&](double x) { return std::pow(x, sigma) * std::exp(-x * t); };
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) best = std::max(best, symbol(s[k]));
  const double xstar = sigma / t;  // peak of the continuum symbol
  const double tail = symbol(std::max(xstar, s.mu_max()));
  return std::max(best, tail);
}

double resolvent_defect_norm(const Spectrum& s, double tau, double beta) {
  if (!(tau > 0.0)) throw std::domain_error("resolvent_defect_norm: tau must be > 0");
  if (beta < 0.0 || beta > 1.0) {
    throw std::domain_error("resolvent_defect_norm: beta must lie in [0,1]");
  }
  const auto symbol = [&](double x) {
    return std::pow(x, -beta) * (x * tau) / (1.0 + x * tau);
  };
  double best = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) best = std::max(best, symbol(s[k]));
  // In scaled form the symbol is tau^beta h(u), u = x tau, with
  // h(u) = u^{1-beta}/(1+u) peaking at u = (1-beta)/beta; for beta = 0 the
  // supremum 1 is approached as u -> infinity.
  double tail;
  if (beta == 0.0) {
    tail = 1.0;
  } else {
    const double ustar = (1.0 - beta) / beta;
    const double u = std::max(ustar, s.mu_max() * tau);
    tail = std::pow(tau, beta) * std::pow(u, 1.0 - beta) / (1.0 + u);
  }
  return std::max(best, tail);
}

}  // namespace spde
