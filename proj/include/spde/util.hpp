#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

// Compensated (Kahan) accumulator. Mode-wise sums span many orders of
// magnitude, so plain summation is not good enough for the oracle paths.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double kahan_sum(std::span<const double> xs) {
  KahanSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

// FNV-1a over bytes, used for config hashes in CSV metadata.
inline std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

// Two-sided 97.5% Student-t quantile (Cornish-Fisher in 1/df), good to
// ~1e-3 for df >= 8, exact enough for batch-means intervals.
inline double student_t_975(int df) {
  if (df < 1) throw std::invalid_argument("student_t_975: df < 1");
  const double z = 1.959963984540054;
  const double d = static_cast<double>(df);
  const double z3 = z * z * z;
  const double z5 = z3 * z * z;
  return z + (z3 + z) / (4.0 * d) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * d * d);
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double residual = 0.0;  // weighted RMS residual
};

// Weighted least squares y ~ intercept + slope * x. Empty weights means
// unweighted. slope_stderr comes from the weighted normal equations,
// rescaled by the residual variance when there are > 2 points.
inline LineFit fit_line(std::span<const double> x, std::span<const double> y,
                        std::span<const double> w = {}) {
  const std::size_t n = x.size();
  if (n != y.size() || (!w.empty() && w.size() != n)) {
    throw std::invalid_argument("fit_line: size mismatch");
  }
  if (n < 2) throw std::invalid_argument("fit_line: need at least 2 points");
  double sw = 0, swx = 0, swy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sw += wi;
    swx += wi * x[i];
    swy += wi * y[i];
  }
  const double xbar = swx / sw, ybar = swy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    sxx += wi * (x[i] - xbar) * (x[i] - xbar);
    sxy += wi * (x[i] - xbar) * (y[i] - ybar);
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  double ss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w.empty() ? 1.0 : w[i];
    const double r = y[i] - fit.intercept - fit.slope * x[i];
    ss += wi * r * r;
  }
  fit.residual = std::sqrt(ss / sw);
  if (n > 2) {
    fit.slope_stderr = std::sqrt(ss / (static_cast<double>(n) - 2.0) / sxx);
  } else {
    fit.slope_stderr = 0.0;
  }
  return fit;
}

// Adaptive Simpson quadrature with absolute tolerance.
namespace detail {
inline double simpson(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}
template <class F>
double adapt(const F& f, double a, double m, double b, double fa, double fm,
             double fb, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, a, m);
  const double right = simpson(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adapt(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adapt(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

template <class F>
double adaptive_simpson(const F& f, double a, double b, double tol = 1e-10) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = detail::simpson(fa, fm, fb, a, b);
  return detail::adapt(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace spde
