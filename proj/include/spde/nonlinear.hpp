#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

// Pointwise nonlinearity g(xi, u) with its declared bounds. The derivative
// metadata (second_derivative_bound, eta) is carried for documentation; only
// the sup bound and the Lipschitz constant are used computationally.
struct NemytskiiSpec {
  std::string name;
  std::function<double(double, double)> g;
  double g_bound = 0.0;
  double lipschitz = 0.0;
  double second_derivative_bound = 0.0;
  double eta = 0.0;
  bool bounded = true;  // false only for linear_unsafe (oracle tests)

  bool is_zero() const { return name == "zero"; }
};

NemytskiiSpec zero_nonlinearity();
NemytskiiSpec scaled_arctan(double a, double b);       // g = a atan(b u), L = a b
NemytskiiSpec shifted_sine(double a);                  // g = a sin(u + xi), L = a
NemytskiiSpec linear_unsafe(double lambda);            // g = lambda u; unbounded
NemytskiiSpec make_nonlinearity(const std::string& name, const std::vector<double>& params);

// P_N of the grid-evaluated composition: transform y to the grid, apply g
// pointwise, project back onto the first N modes. Requires the dealiasing
// margin M >= 2N.
SpectralVector apply_nemytskii(const NemytskiiSpec& spec, const SpectralVector& y,
                               const SineTransformPlan& plan);

struct DissipativityReport {
  double c_certificate = 0.0;   // mu0 / 2
  double C_certificate = 0.0;   // g_bound^2 / (2 mu0)
  double max_violation = 0.0;   // max of <By+G(y),y> + c|y|^2 - C over samples
  bool certified = false;
};

// Checks the certificate c = mu0/2, C = g_bound^2/(2 mu0) on random y in a
// ball of the given radius. max_violation <= 0 certifies <By+G(y),y> <= -c|y|^2 + C
// on the sample.
DissipativityReport dissipativity_margin(const NemytskiiSpec& spec, const Spectrum& s,
                                         const SineTransformPlan& plan, int sample_count,
                                         double radius, std::uint64_t seed);

// Max over random pairs of |G(y)-G(z)| / |y-z|.
double lipschitz_probe(const NemytskiiSpec& spec, const SineTransformPlan& plan, int pairs,
                       std::uint64_t seed);

}  // namespace spde
