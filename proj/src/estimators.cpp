#include "spde/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace spde {

namespace {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs f(sample_index) for every index in [0, n) on a worker pool. Results
// must be written into per-index slots by the caller; the first exception is
// rethrown after all workers join.
template <class F>
void parallel_for_samples(long n, int workers, const F& f) {
  workers = std::min<long>(resolve_workers(workers), std::max<long>(n, 1));
  if (workers <= 1) {
    for (long i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  std::mutex err_mutex;
  std::exception_ptr first_error;
  const long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long lo = static_cast<long>(w) * chunk;
    const long hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (long i = lo; i < hi; ++i) f(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

struct MeanStderr {
  double mean;
  double std_error;
};

// Accumulation in ascending sample order, independent of completion order.
MeanStderr ordered_mean_stderr(const std::vector<double>& xs) {
  const long n = static_cast<long>(xs.size());
  KahanSum sum;
  for (double x : xs) sum.add(x);
  const double mean = sum.value() / static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  KahanSum ss;
  for (double x : xs) ss.add((x - mean) * (x - mean));
  const double var = ss.value() / static_cast<double>(n - 1);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

// Streaming batch-means accumulator: O(batches) memory, so windows of 1e8
// steps are fine. Values past batch_size * batches are ignored.
class BatchMeans {
 public:
  BatchMeans(long window, int batches) : batches_(batches), sums_(batches) {
    if (batches < 20) throw std::invalid_argument("batch means: need at least 20 batches");
    batch_size_ = window / batches;
    if (batch_size_ < 1) throw std::invalid_argument("batch means: window too short");
    used_ = batch_size_ * batches;
  }

  void add(double x) {
    if (count_ >= used_) return;
    sums_[count_ / batch_size_].add(x);
    ++count_;
  }

  ErgodicReport report(long burn_in, long window) const {
    KahanSum total;
    for (const KahanSum& s : sums_) total.add(s.value());
    const double avg = total.value() / static_cast<double>(used_);
    KahanSum ss;
    for (const KahanSum& s : sums_) {
      const double mb = s.value() / static_cast<double>(batch_size_);
      ss.add((mb - avg) * (mb - avg));
    }
    const double batch_var = ss.value() / static_cast<double>(batches_ - 1);
    const double half = student_t_975(batches_ - 1) * std::sqrt(batch_var / batches_);
    ErgodicReport rep;
    rep.burn_in = burn_in;
    rep.window = window;
    rep.batches = batches_;
    rep.average = avg;
    rep.ci_half = half;
    rep.ci_low = avg - half;
    rep.ci_high = avg + half;
    return rep;
  }

 private:
  int batches_;
  long batch_size_ = 0;
  long used_ = 0;
  long count_ = 0;
  std::vector<KahanSum> sums_;
};

}  // namespace

WeakErrorPoint weak_error(const ModelSpec& model, const TestFunctional& phi, double tau,
                          long m, int refinement_r, long n_samples, std::uint64_t seed,
                          const EstimatorOptions& options) {
  if (n_samples < 2) throw std::invalid_argument("weak_error: n_samples must be >= 2");
  SchemeParams params;
  params.tau = tau;
  params.m = m;
  params.refinement_r = refinement_r;
  params.master_seed = seed;
  params.validate();

  std::vector<double> diffs(n_samples);
  parallel_for_samples(n_samples, options.workers, [&](long i) {
    const auto sid = static_cast<std::uint64_t>(i);
    double coarse_phi, fine_phi;
    if (options.independent_noise) {
      const SpectralVector coarse = run_coarse(model, params, sid);
      const SpectralVector fine = run_reference(model, params,
                                                sid + static_cast<std::uint64_t>(n_samples),
                                                options.reference_mode);
      coarse_phi = phi(coarse);
      fine_phi = phi(fine);
    } else if (options.reference_mode == ReferenceMode::exact_law) {
      const SpectralVector coarse = run_coarse(model, params, sid);
      const SpectralVector fine = run_reference(model, params, sid, ReferenceMode::exact_law);
      coarse_phi = phi(coarse);
      fine_phi = phi(fine);
    } else {
      const auto [coarse, fine] = run_coupled_pair(model, params, sid);
      coarse_phi = phi(coarse);
      fine_phi = phi(fine);
    }
    diffs[i] = fine_phi - coarse_phi;
  });

  const MeanStderr ms = ordered_mean_stderr(diffs);
  WeakErrorPoint point;
  point.tau = tau;
  point.m = m;
  point.estimate = ms.mean;
  point.std_error = ms.std_error;
  point.n_samples = n_samples;
  point.excluded = std::abs(point.estimate) <= 2.0 * point.std_error;
  return point;
}

LineFit fit_loglog(const std::vector<double>& taus, const std::vector<double>& errors,
                   const std::vector<double>& std_errors, std::vector<bool>* excluded_mask,
                   bool use_weights) {
  if (taus.size() != errors.size() || taus.size() != std_errors.size()) {
    throw std::invalid_argument("fit_loglog: size mismatch");
  }
  std::vector<double> x, y, w;
  if (excluded_mask) excluded_mask->assign(taus.size(), false);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const double e = std::abs(errors[i]);
    if (e <= 2.0 * std_errors[i] || e == 0.0) {
      if (excluded_mask) (*excluded_mask)[i] = true;
      continue;
    }
    x.push_back(std::log(taus[i]));
    y.push_back(std::log(e));
    if (use_weights && std_errors[i] > 0.0) {
      w.push_back(1.0 / (std_errors[i] * std_errors[i]));
    } else {
      w.push_back(1.0);
    }
  }
  if (x.size() < 2) throw std::runtime_error("fit_loglog: fewer than 2 usable points");
  return fit_line(x, y, w);
}

WeakErrorReport order_sweep(const ModelSpec& model, const TestFunctional& phi,
                            const std::vector<double>& tau_grid, double T, int refinement_r,
                            long n_samples, std::uint64_t seed,
                            const EstimatorOptions& options) {
  if (tau_grid.size() < 4) throw std::invalid_argument("order_sweep: need >= 4 tau points");
  for (std::size_t i = 1; i < tau_grid.size(); ++i) {
    if (!(tau_grid[i] < tau_grid[i - 1])) {
      throw std::invalid_argument("order_sweep: tau grid must be strictly decreasing");
    }
  }
  WeakErrorReport report;
  std::vector<double> taus, errs, ses;
  for (double tau : tau_grid) {
    const double md = T / tau;
    const long m = std::lround(md);
    if (std::abs(md - static_cast<double>(m)) > 1e-9 || m < 1) {
      throw std::invalid_argument("order_sweep: every tau must divide T");
    }
    WeakErrorPoint p = weak_error(model, phi, tau, m, refinement_r, n_samples, seed, options);
    taus.push_back(p.tau);
    errs.push_back(std::abs(p.estimate));
    ses.push_back(p.std_error);
    report.points.push_back(p);
  }
  std::vector<bool> excluded;
  report.fit = fit_loglog(taus, errs, ses, &excluded);
  for (std::size_t i = 0; i < excluded.size(); ++i) report.points[i].excluded = excluded[i];
  return report;
}

ErgodicReport ergodic_average(const ModelSpec& model, const TestFunctional& phi, double tau,
                              long burn_in, long window, std::uint64_t seed, int batches,
                              int refinement_r) {
  if (window < 20L * batches) {
    throw std::invalid_argument("ergodic_average: window must cover >= 20 steps per batch");
  }
  SchemeParams params;
  params.tau = tau;
  params.m = burn_in + window;
  params.refinement_r = refinement_r;
  params.master_seed = seed;
  BatchMeans acc(window, batches);
  run_coarse(model, params, 0, [&](long step, const SpectralVector& y) {
    if (step > burn_in) acc.add(phi(y));
  });
  return acc.report(burn_in, window);
}

ErgodicReport ergodic_average_reference(const ModelSpec& model, const TestFunctional& phi,
                                        double h, long burn_in, long window,
                                        std::uint64_t seed, int batches) {
  if (window < 20L * batches) {
    throw std::invalid_argument("ergodic_average_reference: window too short");
  }
  SchemeParams params;
  params.tau = h;
  params.m = burn_in + window;
  params.refinement_r = 1;
  params.master_seed = seed;
  BatchMeans acc(window, batches);
  run_reference(model, params, 0, ReferenceMode::coupled,
                [&](long step, const SpectralVector& y) {
                  if (step > burn_in) acc.add(phi(y));
                });
  return acc.report(burn_in, window);
}

InvariantGapReport invariant_gap_sweep(const ModelSpec& model, const TestFunctional& phi,
                                       const std::vector<double>& tau_grid, long burn_in,
                                       long window, std::uint64_t seed, int batches) {
  if (tau_grid.empty()) throw std::invalid_argument("invariant_gap_sweep: empty tau grid");
  InvariantGapReport report;
  double oracle = 0.0;
  if (model.nonlinearity().is_zero()) {
    oracle = expectation_of(phi, continuous_stationary_law(model.spectrum()));
  } else {
    report.used_proxy = true;
    report.proxy_step = *std::min_element(tau_grid.begin(), tau_grid.end()) / 16.0;
    const ErgodicReport proxy = ergodic_average_reference(
        model, phi, report.proxy_step, burn_in, window, seed + 1, batches);
    const ErgodicReport proxy_half = ergodic_average_reference(
        model, phi, report.proxy_step / 2.0, burn_in, window, seed + 2, batches);
    oracle = proxy.average;
    report.proxy_bias_estimate = std::abs(proxy.average - proxy_half.average);
  }

  std::vector<double> taus, gaps, ses;
  for (double tau : tau_grid) {
    const ErgodicReport er = ergodic_average(model, phi, tau, burn_in, window, seed, batches);
    InvariantGapPoint p;
    p.tau = tau;
    p.average = er.average;
    p.ci_half = er.ci_half;
    p.oracle = oracle;
    p.gap = oracle - er.average;
    p.flagged = er.ci_half > std::abs(p.gap);
    report.points.push_back(p);
    taus.push_back(tau);
    gaps.push_back(std::abs(p.gap));
    // batch-means half-width back to one standard error for the exclusion rule
    ses.push_back(er.ci_half / student_t_975(batches - 1));
  }
  std::vector<bool> excluded;
  // Unweighted fit: 1/stderr^2 weights concentrate the fit on the largest
  // tau, where mu0*tau is O(1) and the gap curve is below its asymptotic
  // slope; the acceptance tolerance is calibrated to the asymptotic order.
  report.fit = fit_loglog(taus, gaps, ses, &excluded, /*use_weights=*/false);
  return report;
}

MomentReport moment_bound_probe(const ModelSpec& model, double tau, int p,
                                const std::vector<long>& checkpoints, long n_samples,
                                std::uint64_t seed, const EstimatorOptions& options) {
  if (p != 2 && p != 4) throw std::invalid_argument("moment_bound_probe: p must be 2 or 4");
  if (checkpoints.empty()) throw std::invalid_argument("moment_bound_probe: no checkpoints");
  const long max_m = *std::max_element(checkpoints.begin(), checkpoints.end());
  SchemeParams params;
  params.tau = tau;
  params.m = max_m;
  params.refinement_r = 1;
  params.master_seed = seed;

  const std::size_t nc = checkpoints.size();
  std::vector<std::vector<double>> values(nc, std::vector<double>(n_samples));
  parallel_for_samples(n_samples, options.workers, [&](long i) {
    run_coarse(model, params, static_cast<std::uint64_t>(i),
               [&](long step, const SpectralVector& y) {
                 for (std::size_t c = 0; c < nc; ++c) {
                   if (checkpoints[c] == step) {
                     const double n2 = y.norm();
                     values[c][i] = (p == 2) ? n2 * n2 : n2 * n2 * n2 * n2;
                   }
                 }
               });
  });

  MomentReport report;
  for (std::size_t c = 0; c < nc; ++c) {
    const MeanStderr ms = ordered_mean_stderr(values[c]);
    report.points.push_back({checkpoints[c], ms.mean, ms.std_error});
  }
  // trend over the stationary regime m >= 100, weights from known variances
  double sw = 0, swx = 0, swy = 0;
  std::vector<std::size_t> used;
  for (std::size_t c = 0; c < nc; ++c) {
    if (checkpoints[c] < 100 || report.points[c].std_error <= 0.0) continue;
    used.push_back(c);
    const double w = 1.0 / (report.points[c].std_error * report.points[c].std_error);
    sw += w;
    swx += w * std::log(static_cast<double>(checkpoints[c]));
    swy += w * report.points[c].estimate;
  }
  if (used.size() >= 2) {
    const double xbar = swx / sw, ybar = swy / sw;
    double sxx = 0, sxy = 0;
    for (std::size_t c : used) {
      const double w = 1.0 / (report.points[c].std_error * report.points[c].std_error);
      const double dx = std::log(static_cast<double>(checkpoints[c])) - xbar;
      sxx += w * dx * dx;
      sxy += w * dx * (report.points[c].estimate - ybar);
    }
    report.trend_slope = sxy / sxx;
    report.trend_slope_stderr = std::sqrt(1.0 / sxx);
  }
  // Documented bound: E|Y|^2 <= 2 E|w|^2 + 2 |Z|^2 with w the linear noise
  // chain (stationary trace sum 1/(2 mu_k)) and |Z| <= g_bound / mu0.
  KahanSum trace;
  for (std::size_t k = 0; k < model.n_modes(); ++k) {
    trace.add(1.0 / (2.0 * model.spectrum()[k]));
  }
  const double gb = model.nonlinearity().bounded ? model.nonlinearity().g_bound : 0.0;
  const double mu0 = model.spectrum().mu0();
  report.bound = 2.0 * trace.value() + 2.0 * gb * gb / (mu0 * mu0);
  if (p == 4) report.bound = 3.0 * report.bound * report.bound;  // Gaussian-style 4th moment scale
  return report;
}

ContractionReport contraction_probe(const ModelSpec& model, double tau,
                                    const SpectralVector& y1, const SpectralVector& y2,
                                    long steps, std::uint64_t seed) {
  const double lg = model.nonlinearity().lipschitz;
  const double mu0 = model.spectrum().mu0();
  if (!(lg < mu0)) {
    throw std::invalid_argument(
        "contraction_probe: requires strict dissipativity L_G < mu0");
  }
  NoiseStream stream(seed, 0);
  SpectralVector a = y1, b = y2;
  ContractionReport report;
  report.steps = steps;
  report.bound = (1.0 + lg * tau) / (1.0 + mu0 * tau);
  double max_ratio = 0.0;
  for (long k = 0; k < steps; ++k) {
    const SpectralVector w = stream.wiener_increment(model.n_modes(), tau);
    const SpectralVector a2 = semi_implicit_step(model, a, tau, w);
    const SpectralVector b2 = semi_implicit_step(model, b, tau, w);
    KahanSum before, after;
    for (std::size_t i = 0; i < a.n_modes(); ++i) {
      before.add((a[i] - b[i]) * (a[i] - b[i]));
      after.add((a2[i] - b2[i]) * (a2[i] - b2[i]));
    }
    // below distance ~1e-10 the absolute rounding error of the drift
    // (~1e-17 on O(1) states) dominates the quotient, so stop measuring:
    // the pair has contracted to numerical zero
    if (before.value() > 1e-20) {
      const double ratio = std::sqrt(after.value() / before.value());
      max_ratio = std::max(max_ratio, ratio);
      if (ratio > report.bound + 1e-12) ++report.violations;
    }
    a = a2;
    b = b2;
  }
  report.max_ratio = max_ratio;
  KahanSum fin;
  for (std::size_t i = 0; i < a.n_modes(); ++i) fin.add((a[i] - b[i]) * (a[i] - b[i]));
  report.final_distance = std::sqrt(fin.value());
  return report;
}

}  // namespace spde
