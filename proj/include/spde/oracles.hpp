#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

// Product of independent per-mode Gaussians: the closed-form laws of the
// linear (G = 0) equation and scheme.
struct GaussianLaw {
  std::vector<double> mean;
  std::vector<double> variance;

  std::size_t n_modes() const { return mean.size(); }
};

// Law of Y(t) for G = 0: mean_k = e^{-mu_k t} y0_k,
// var_k = (1 - e^{-2 mu_k t}) / (2 mu_k).
GaussianLaw continuous_law(const Spectrum& s, const SpectralVector& y0, double t);

// Law of Y_m for G = 0: mean_k = (1 + mu_k tau)^{-m} y0_k,
// var_k = (1 - (1 + mu_k tau)^{-2m}) / (2 mu_k + mu_k^2 tau).
GaussianLaw scheme_law(const Spectrum& s, const SpectralVector& y0, double tau, long m);

GaussianLaw continuous_stationary_law(const Spectrum& s);
GaussianLaw scheme_stationary_law(const Spectrum& s, double tau);

// Bounded C^2 test functionals of a single mode.
class TestFunctional {
 public:
  enum class Kind { cos_mode, exp_neg_sq, bounded_poly, constant };

  static TestFunctional cos_of_mode(std::size_t j);
  static TestFunctional exp_neg_sq(std::size_t j, double a);
  static TestFunctional bounded_poly(std::size_t j);
  static TestFunctional constant();
  static TestFunctional from_name(const std::string& kind, std::size_t mode, double a);

  double operator()(const SpectralVector& y) const;
  double value_at(double x) const;

  Kind kind() const { return kind_; }
  std::size_t mode() const { return mode_; }
  double param() const { return a_; }

 private:
  TestFunctional(Kind kind, std::size_t mode, double a) : kind_(kind), mode_(mode), a_(a) {}
  Kind kind_;
  std::size_t mode_;
  double a_;
};

// E[phi(Y)] under the law. cos and exp_neg_sq use closed Gaussian formulas;
// bounded_poly uses adaptive quadrature to 1e-10 absolute.
double expectation_of(const TestFunctional& phi, const GaussianLaw& law);

// Stationary continuous expectation minus stationary scheme expectation; the
// exact linear-case invariant-measure gap, O(tau).
double invariant_measure_gap(const TestFunctional& phi, const Spectrum& s, double tau);

}  // namespace spde
