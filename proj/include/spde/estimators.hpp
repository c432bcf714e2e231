#pragma once

#include <cstdint>
#include <vector>

#include "spde/integrators.hpp"
#include "spde/oracles.hpp"
#include "spde/util.hpp"

namespace spde {

struct EstimatorOptions {
  int workers = 0;  // 0 = hardware concurrency
  ReferenceMode reference_mode = ReferenceMode::coupled;
  // Diagnostic: drive the reference with an unrelated stream instead of the
  // shared path, to measure what common random numbers buy.
  bool independent_noise = false;
};

struct WeakErrorPoint {
  double tau = 0.0;
  long m = 0;
  double estimate = 0.0;   // mean of phi(fine) - phi(coarse)
  double std_error = 0.0;
  long n_samples = 0;
  bool excluded = false;   // |estimate| indistinguishable from 0 at 2 sigma
};

struct WeakErrorReport {
  std::vector<WeakErrorPoint> points;
  LineFit fit;  // slope of log|error| vs log tau, weights 1/std_error^2
};

WeakErrorPoint weak_error(const ModelSpec& model, const TestFunctional& phi, double tau,
                          long m, int refinement_r, long n_samples, std::uint64_t seed,
                          const EstimatorOptions& options = {});

// weak_error per tau with m = T/tau (each tau must divide T), then a weighted
// log-log slope fit over the non-excluded points.
WeakErrorReport order_sweep(const ModelSpec& model, const TestFunctional& phi,
                            const std::vector<double>& tau_grid, double T, int refinement_r,
                            long n_samples, std::uint64_t seed,
                            const EstimatorOptions& options = {});

struct ErgodicReport {
  long burn_in = 0;
  long window = 0;
  int batches = 0;
  double average = 0.0;
  double ci_half = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Time average of phi along one scheme trajectory, batch-means CI.
ErgodicReport ergodic_average(const ModelSpec& model, const TestFunctional& phi, double tau,
                              long burn_in, long window, std::uint64_t seed, int batches = 32,
                              int refinement_r = 1);

// Same, along the exponential-Euler reference chain at step h (the proxy for
// the continuous invariant measure when no oracle exists).
ErgodicReport ergodic_average_reference(const ModelSpec& model, const TestFunctional& phi,
                                        double h, long burn_in, long window,
                                        std::uint64_t seed, int batches = 32);

struct InvariantGapPoint {
  double tau = 0.0;
  double average = 0.0;
  double ci_half = 0.0;
  double oracle = 0.0;  // continuous stationary expectation (exact or proxy)
  double gap = 0.0;     // oracle - average
  bool flagged = false; // CI exceeds the measured gap
};

struct InvariantGapReport {
  std::vector<InvariantGapPoint> points;
  LineFit fit;  // unweighted log-log slope of |gap| vs tau
  bool used_proxy = false;
  double proxy_step = 0.0;
  double proxy_bias_estimate = 0.0;  // |proxy(h) - proxy(h/2)|
};

// Per tau: ergodic average and its gap against the continuous stationary
// expectation. Exact oracle for G = 0; otherwise a reference-solver proxy at
// h = min(tau_grid)/16 with a halved-step consistency check.
InvariantGapReport invariant_gap_sweep(const ModelSpec& model, const TestFunctional& phi,
                                       const std::vector<double>& tau_grid, long burn_in,
                                       long window, std::uint64_t seed, int batches = 32);

struct MomentPoint {
  long m = 0;
  double estimate = 0.0;  // E|Y_m|^p
  double std_error = 0.0;
};

struct MomentReport {
  std::vector<MomentPoint> points;
  double trend_slope = 0.0;         // vs log m, over checkpoints with m >= 100
  double trend_slope_stderr = 0.0;
  double bound = 0.0;               // 2 tr[(2 mu)^-1] + 2 g_bound^2 / mu0^2 (p = 2)
};

MomentReport moment_bound_probe(const ModelSpec& model, double tau, int p,
                                const std::vector<long>& checkpoints, long n_samples,
                                std::uint64_t seed, const EstimatorOptions& options = {});

struct ContractionReport {
  double max_ratio = 0.0;
  double final_distance = 0.0;
  double bound = 0.0;  // (1 + L_G tau) / (1 + mu0 tau)
  long steps = 0;
  long violations = 0;  // steps where the ratio exceeded bound + 1e-12
};

// Shared-noise pair from y1, y2; requires strict dissipativity L_G < mu0.
ContractionReport contraction_probe(const ModelSpec& model, double tau,
                                    const SpectralVector& y1, const SpectralVector& y2,
                                    long steps, std::uint64_t seed);

// Weighted log-log fit of |error| vs tau; points with error < 2 std_error are
// excluded (marked in `excluded_mask`). Weights are 1/std_error^2; pass
// use_weights = false for an unweighted fit.
LineFit fit_loglog(const std::vector<double>& taus, const std::vector<double>& errors,
                   const std::vector<double>& std_errors, std::vector<bool>* excluded_mask,
                   bool use_weights = true);

}  // namespace spde
