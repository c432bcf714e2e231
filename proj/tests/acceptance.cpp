// End-to-end acceptance checks. Each check prints exactly one PASS/FAIL line;
// the exit status is the number of failures. The weak-order check is the
// expensive one (about an hour single-threaded at the full sample count).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "spde/estimators.hpp"
#include "spde/util.hpp"

using namespace spde;

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
  std::printf("[%d] %-28s %s  (%s)\n", index, name.c_str(), pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

// [1] linear model: ergodic averages vs the exact stationary oracle across
// tau = 2^-3 .. 2^-8; the gap must match the closed form within the
// batch-means interval at every tau, and scale with order 1.0 +/- 0.15.
//
// The window grows like 1/tau^3 on the fine end: the exact gap shrinks like
// tau while the time-average standard error shrinks like sqrt(tau * window),
// so a flat window leaves the smallest-tau point (gap 4.7e-4, standard error
// 5.6e-4 at 2e5 steps) statistically empty and the fitted slope is noise.
// The scaling pins the relative gap error near 5% at every point.
void check_invariant_gap() {
  const std::size_t n = 64;
  const ModelSpec model(Spectrum::dirichlet_laplacian(n), zero_nonlinearity(), 2 * n,
                        SpectralVector(n));
  const TestFunctional phi = TestFunctional::cos_of_mode(0);
  const double oracle = expectation_of(phi, continuous_stationary_law(model.spectrum()));

  std::vector<double> taus, gaps, halves;
  bool ci_ok = true;
  double worst = 0.0;
  for (int lev = 3; lev <= 8; ++lev) {
    const double tau = std::pow(2.0, -lev);
    const long window =
        std::max(200000L, static_cast<long>(std::llround(7.2 / (tau * tau * tau))));
    const ErgodicReport er = ergodic_average(model, phi, tau, 4000, window, 101);
    const double gap = oracle - er.average;
    const double exact = invariant_measure_gap(phi, model.spectrum(), tau);
    const double miss = std::abs(gap - exact);
    worst = std::max(worst, miss / std::max(er.ci_half, 1e-300));
    if (miss > er.ci_half) ci_ok = false;
    taus.push_back(tau);
    gaps.push_back(std::abs(gap));
    halves.push_back(er.ci_half);
  }
  std::vector<bool> excluded;
  const LineFit fit = fit_loglog(taus, gaps, halves, &excluded, /*use_weights=*/false);
  const bool slope_ok = std::abs(fit.slope - 1.0) <= 0.15;
  report(1, "invariant_gap_linear", ci_ok && slope_ok,
         "slope=" + fmt(fit.slope) + " worst_gap_miss=" + fmt(worst) + " ci_half");
}

// [2] nonlinear finite-time weak order with common random numbers: slope of
// the fitted error must be at least 0.4, and doubling the reference
// refinement must not move the estimate beyond the joint interval.
void check_weak_order() {
  const ModelSpec model = ModelSpec::make_default(64);
  const TestFunctional phi = TestFunctional::cos_of_mode(0);
  std::vector<double> taus;
  for (int lev = 4; lev <= 9; ++lev) taus.push_back(std::pow(2.0, -lev));
  const long n_samples = 10000;
  const WeakErrorReport rep = order_sweep(model, phi, taus, 1.0, 16, n_samples, 202);

  const double tau_mid = std::pow(2.0, -6);
  const WeakErrorPoint a = weak_error(model, phi, tau_mid, 64, 16, n_samples, 202);
  const WeakErrorPoint b = weak_error(model, phi, tau_mid, 64, 32, n_samples, 202);
  const bool refine_ok = std::abs(a.estimate - b.estimate) <=
                         2.0 * (a.std_error + b.std_error);
  const bool slope_ok = rep.fit.slope >= 0.4;
  report(2, "weak_order_nonlinear", slope_ok && refine_ok,
         "slope=" + fmt(rep.fit.slope) + " refine_shift=" +
             fmt(std::abs(a.estimate - b.estimate)) + " vs " +
             fmt(2.0 * (a.std_error + b.std_error)));
}

// [3] shared-noise contraction: the per-step distance ratio never exceeds
// (1 + L_G tau)/(1 + mu0 tau) + 1e-12 over 1e4 steps.
void check_contraction() {
  const std::size_t n = 64;
  const ModelSpec model = ModelSpec::make_default(n);
  const SpectralVector y1 = SpectralVector::unit_mode(n, 0, 2.0);
  SpectralVector y2(n);
  for (std::size_t k = 0; k < n; ++k) y2[k] = (k % 2 == 0) ? -1.0 : 0.5;
  bool ok = true;
  std::string detail;
  for (double tau : {0.01, 0.1}) {
    const ContractionReport r = contraction_probe(model, tau, y1, y2, 10000, 303);
    ok = ok && (r.violations == 0) && (r.max_ratio <= r.bound + 1e-12);
    detail += "tau=" + fmt(tau) + ":max_ratio=" + fmt(r.max_ratio) + "<=bound=" +
              fmt(r.bound) + " ";
  }
  report(3, "contraction_bound", ok, detail);
}

// [4] uniform second-moment bound: E|Y_m|^2 at m = 1e2, 1e3, 1e4 shows no
// upward trend and stays below 2 tr[(2 mu)^-1] + 2 g_bound^2 / mu0^2.
void check_moment_bound() {
  const ModelSpec model = ModelSpec::make_default(64);
  const MomentReport rep =
      moment_bound_probe(model, 0.0625, 2, {100, 1000, 10000}, 1000, 404);
  bool under = true;
  double max_est = 0.0;
  for (const MomentPoint& p : rep.points) {
    max_est = std::max(max_est, p.estimate);
    if (p.estimate > rep.bound) under = false;
  }
  const bool no_trend = rep.trend_slope <= 2.0 * rep.trend_slope_stderr;
  report(4, "moment_bound_uniform", under && no_trend,
         "max=" + fmt(max_est) + " bound=" + fmt(rep.bound) + " trend=" +
             fmt(rep.trend_slope) + "+/-" + fmt(rep.trend_slope_stderr));
}

// [5] operator inequality suite: smoothing and defect norms against their
// closed-form bounds, all within one second of wall time.
void check_operator_inequalities() {
  const auto t0 = std::chrono::steady_clock::now();
  const Spectrum s = Spectrum::dirichlet_laplacian(64);
  const double mu0 = s.mu0();
  int bad = 0;

  for (double sigma : {0.25, 0.5, 1.0}) {
    for (int i = 0; i < 25; ++i) {
      const double t = std::pow(10.0, -4.0 + 4.0 * i / 24.0);
      const double bound = std::pow(2.0 * sigma / std::exp(1.0), sigma) *
                           std::pow(t, -sigma) * std::exp(-mu0 * t / 2.0);
      if (semigroup_smoothing_norm(s, t, sigma) > bound * (1.0 + 1e-12)) ++bad;
    }
  }
  for (double tau : {1e-3, 1e-2, 1e-1, 1.0}) {
    for (long j = 1; j <= 1000; ++j) {
      for (double kappa : {0.0, 0.25, 0.5, 1.0}) {
        const double bound =
            std::pow(j * tau, kappa - 1.0) / std::pow(1.0 + mu0 * tau, j * kappa);
        if (resolvent_smoothing_norm(s, tau, j, kappa) > bound * (1.0 + 1e-12)) ++bad;
      }
    }
    for (int bi = 0; bi <= 10; ++bi) {
      const double beta = bi / 10.0;
      if (resolvent_defect_norm(s, tau, beta) > std::pow(tau, beta) * (1.0 + 1e-12)) ++bad;
    }
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(5, "operator_inequalities", bad == 0 && elapsed < 1.0,
         "violations=" + std::to_string(bad) + " elapsed=" + fmt(elapsed) + "s");
}

// [6] linear scheme law: Monte Carlo mean and variance of modes 0, 1, 2, 7
// match the closed form within 4 standard errors on a 10-point time grid.
void check_scheme_law() {
  const std::size_t n = 64;
  SpectralVector y0(n);
  y0[0] = 1.0;
  y0[1] = -0.5;
  y0[2] = 0.25;
  y0[7] = 0.8;
  const ModelSpec model(Spectrum::dirichlet_laplacian(n), zero_nonlinearity(), 2 * n, y0);
  SchemeParams params;
  params.tau = 0.03125;
  params.m = 40;
  params.refinement_r = 1;
  params.master_seed = 505;

  const std::vector<std::size_t> modes = {0, 1, 2, 7};
  const long n_samples = 4000;
  const int n_checkpoints = 10;
  // sums[checkpoint][mode], sumsq likewise
  std::vector<std::vector<KahanSum>> sums(n_checkpoints, std::vector<KahanSum>(modes.size()));
  std::vector<std::vector<KahanSum>> sumsqs(n_checkpoints,
                                            std::vector<KahanSum>(modes.size()));
  for (long i = 0; i < n_samples; ++i) {
    run_coarse(model, params, static_cast<std::uint64_t>(i),
               [&](long step, const SpectralVector& y) {
                 if (step % 4 != 0) return;
                 const int c = static_cast<int>(step / 4) - 1;
                 for (std::size_t j = 0; j < modes.size(); ++j) {
                   sums[c][j].add(y[modes[j]]);
                   sumsqs[c][j].add(y[modes[j]] * y[modes[j]]);
                 }
               });
  }

  bool ok = true;
  double worst = 0.0;
  for (int c = 0; c < n_checkpoints; ++c) {
    const long m = 4L * (c + 1);
    const GaussianLaw law = scheme_law(model.spectrum(), y0, params.tau, m);
    for (std::size_t j = 0; j < modes.size(); ++j) {
      const std::size_t k = modes[j];
      const double mean = sums[c][j].value() / n_samples;
      const double var = sumsqs[c][j].value() / n_samples - mean * mean;
      const double se_mean = std::sqrt(law.variance[k] / n_samples);
      const double se_var = law.variance[k] * std::sqrt(2.0 / n_samples);
      worst = std::max(worst, std::abs(mean - law.mean[k]) / se_mean);
      worst = std::max(worst, std::abs(var - law.variance[k]) / se_var);
      if (std::abs(mean - law.mean[k]) > 4.0 * se_mean) ok = false;
      if (std::abs(var - law.variance[k]) > 4.0 * se_var) ok = false;
    }
  }
  report(6, "scheme_law_linear_mc", ok, "worst_z=" + fmt(worst) + " (limit 4)");
}

// [7] the committed artifact regenerates byte for byte.
void check_golden_artifact() {
  const std::string golden_dir = std::string(SPDE_SOURCE_DIR) + "/tests/golden";
  const std::string cmd = std::string(SPDE_CLI_PATH) + " moments --config " + golden_dir +
                          "/golden_config.json --out acceptance_golden.csv >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  bool ok = status != -1 && WEXITSTATUS(status) == 0;
  std::string detail = "exit=" + std::to_string(status == -1 ? -1 : WEXITSTATUS(status));
  if (ok) {
    const auto slurp = [](const std::string& path) {
      std::ifstream in(path, std::ios::binary);
      std::ostringstream ss;
      ss << in.rdbuf();
      return in ? ss.str() : std::string("<unreadable " + path + ">");
    };
    const std::string fresh = slurp("acceptance_golden.csv");
    const std::string expected = slurp(golden_dir + "/expected_moments.csv");
    ok = !fresh.empty() && fresh == expected;
    detail += ok ? " bytes_equal" : " bytes_differ";
  }
  report(7, "golden_artifact", ok, detail);
}

}  // namespace

int main() {
  check_operator_inequalities();  // [5]
  check_golden_artifact();        // [7]
  check_contraction();            // [3]
  check_scheme_law();             // [6]
  check_invariant_gap();          // [1]
  check_moment_bound();           // [4]
  check_weak_order();             // [2]
  std::printf("%s: %d failure(s)\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures;
}
