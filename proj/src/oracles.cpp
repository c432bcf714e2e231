#include "spde/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "spde/util.hpp"

namespace spde {

GaussianLaw continuous_law(const Spectrum& s, const SpectralVector& y0, double t) {
  if (t < 0.0) throw std::domain_error("continuous_law: t must be >= 0");
  if (y0.n_modes() != s.size()) throw std::invalid_argument("continuous_law: size mismatch");
  GaussianLaw law;
  law.mean.resize(s.size());
  law.variance.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    law.mean[k] = std::exp(-s[k] * t) * y0[k];
    law.variance[k] = -std::expm1(-2.0 * s[k] * t) / (2.0 * s[k]);
  }
  return law;
}

GaussianLaw scheme_law(const Spectrum& s, const SpectralVector& y0, double tau, long m) {
  if (!(tau > 0.0)) throw std::domain_error("scheme_law: tau must be > 0");
  if (m < 0) throw std::domain_error("scheme_law: m must be >= 0");
  if (y0.n_modes() != s.size()) throw std::invalid_argument("scheme_law: size mismatch");
  GaussianLaw law;
  law.mean.resize(s.size());
  law.variance.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double q = 1.0 / (1.0 + s[k] * tau);
    const double qm = std::pow(q, static_cast<double>(m));
    law.mean[k] = qm * y0[k];
    law.variance[k] = (1.0 - qm * qm) / (2.0 * s[k] + s[k] * s[k] * tau);
  }
  return law;
}

GaussianLaw continuous_stationary_law(const Spectrum& s) {
  GaussianLaw law;
  law.mean.assign(s.size(), 0.0);
  law.variance.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) law.variance[k] = 1.0 / (2.0 * s[k]);
  return law;
}

GaussianLaw scheme_stationary_law(const Spectrum& s, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("scheme_stationary_law: tau must be > 0");
  GaussianLaw law;
  law.mean.assign(s.size(), 0.0);
  law.variance.resize(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) {
    law.variance[k] = 1.0 / (2.0 * s[k] + s[k] * s[k] * tau);
  }
  return law;
}

TestFunctional TestFunctional::cos_of_mode(std::size_t j) {
  return TestFunctional(Kind::cos_mode, j, 0.0);
}
TestFunctional TestFunctional::exp_neg_sq(std::size_t j, double a) {
  if (!(a > 0.0)) throw std::invalid_argument("exp_neg_sq: a must be > 0");
  return TestFunctional(Kind::exp_neg_sq, j, a);
}
TestFunctional TestFunctional::bounded_poly(std::size_t j) {
  return TestFunctional(Kind::bounded_poly, j, 0.0);
}
TestFunctional TestFunctional::constant() {
  return TestFunctional(Kind::constant, 0, 0.0);
}

TestFunctional TestFunctional::from_name(const std::string& kind, std::size_t mode, double a) {
  if (kind == "cos_mode") return cos_of_mode(mode);
  if (kind == "exp_neg_sq") return exp_neg_sq(mode, a);
  if (kind == "bounded_poly") return bounded_poly(mode);
  if (kind == "constant") return constant();
  throw std::invalid_argument("unknown test functional '" + kind + "'");
}

double TestFunctional::value_at(double x) const {
  switch (kind_) {
    case Kind::cos_mode:
      return std::cos(x);
    case Kind::exp_neg_sq:
      return std::exp(-a_ * x * x);
    case Kind::bounded_poly:
      return x * x / (1.0 + x * x);
    case Kind::constant:
      return 1.0;
  }
  return 0.0;
}

double TestFunctional::operator()(const SpectralVector& y) const {
  if (kind_ == Kind::constant) return 1.0;
  if (mode_ >= y.n_modes()) throw std::invalid_argument("TestFunctional: mode out of range");
  return value_at(y[mode_]);
}

double expectation_of(const TestFunctional& phi, const GaussianLaw& law) {
  if (phi.kind() == TestFunctional::Kind::constant) return 1.0;
  if (phi.mode() >= law.n_modes()) {
    throw std::invalid_argument("expectation_of: mode out of range");
  }
  const double mean = law.mean[phi.mode()];
  const double var = law.variance[phi.mode()];
  if (var == 0.0) return phi.value_at(mean);
  switch (phi.kind()) {
    case TestFunctional::Kind::cos_mode:
      // characteristic function of a Gaussian
      return std::exp(-var / 2.0) * std::cos(mean);
    case TestFunctional::Kind::exp_neg_sq: {
      // closed Gaussian integral
      const double a = phi.param();
      const double d = 1.0 + 2.0 * a * var;
      return std::exp(-a * mean * mean / d) / std::sqrt(d);
    }
    case TestFunctional::Kind::bounded_poly: {
      const double sd = std::sqrt(var);
      const double lo = mean - 12.0 * sd, hi = mean + 12.0 * sd;
      const double norm = 1.0 / (sd * std::sqrt(2.0 * 3.14159265358979323846));
      const auto f = [&](double x) {
        const double z = (x - mean) / sd;
        return phi.value_at(x) * norm * std::exp(-0.5 * z * z);
      };
      return adaptive_simpson(f, lo, hi, 1e-10);
    }
    default:
      return 1.0;
  }
}

double invariant_measure_gap(const TestFunctional& phi, const Spectrum& s, double tau) {
  return expectation_of(phi, continuous_stationary_law(s)) -
         expectation_of(phi, scheme_stationary_law(s, tau));
}

}  // namespace spde
