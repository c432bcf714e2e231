#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>

#include "spde/noise.hpp"
#include "spde/nonlinear.hpp"
#include "spde/spectral.hpp"

namespace spde {

// The problem instance: spectrum, nonlinearity, truncation and collocation
// sizes, initial condition. Immutable after construction.
class ModelSpec {
 public:
  ModelSpec(Spectrum spectrum, NemytskiiSpec nonlinearity, std::size_t grid_points,
            SpectralVector initial_condition);

  static ModelSpec make_default(std::size_t n_modes = 64);

  const Spectrum& spectrum() const { return spectrum_; }
  const NemytskiiSpec& nonlinearity() const { return nonlinearity_; }
  const SineTransformPlan& plan() const { return *plan_; }
  std::size_t n_modes() const { return spectrum_.size(); }
  std::size_t grid_points() const { return plan_->grid_size(); }
  const SpectralVector& initial_condition() const { return initial_condition_; }

  // G_N(y); the zero nonlinearity short-circuits the transforms.
  SpectralVector drift(const SpectralVector& y) const;

 private:
  Spectrum spectrum_;
  NemytskiiSpec nonlinearity_;
  std::shared_ptr<const SineTransformPlan> plan_;
  SpectralVector initial_condition_;
};

struct SchemeParams {
  double tau = 0.0;
  long m = 0;
  int refinement_r = 16;
  std::uint64_t master_seed = 0;
  double tau_ceiling = 1.0;

  void validate() const;
  double horizon() const { return tau * static_cast<double>(m); }
  double fine_step() const { return tau / refinement_r; }
};

struct IntegrationError : std::runtime_error {
  IntegrationError(const std::string& what, long step_index)
      : std::runtime_error(what), step(step_index) {}
  long step;
};

// One step of Y_{k+1} = R_tau(Y_k + tau G(Y_k) + w), with w the raw Brownian
// increment over the step (per-mode Normal(0, tau) draws).
SpectralVector semi_implicit_step(const ModelSpec& model, const SpectralVector& y, double tau,
                                  const SpectralVector& increment);

enum class ReferenceMode {
  coupled,    // left-endpoint noise e^{hB} dW from the shared fine increments
  exact_law,  // exact per-mode convolution draws; uncoupled from the coarse path
};

using StepObserver = std::function<void(long step, const SpectralVector& y)>;

// m semi-implicit steps. Coarse increments are row sums of the fine
// increment blocks, so a coarse run and a reference run with the same
// (seed, stream) consume the same underlying path.
SpectralVector run_coarse(const ModelSpec& model, const SchemeParams& params,
                          std::uint64_t stream_id, const StepObserver& observer = {});

// Exponential-Euler reference on the fine grid h = tau / r:
//   y <- e^{hB}(y + h G(y)) + noise
// with noise = e^{hB} * (fine increment) in coupled mode, or the exact
// convolution draw in exact_law mode.
SpectralVector run_reference(const ModelSpec& model, const SchemeParams& params,
                             std::uint64_t stream_id,
                             ReferenceMode mode = ReferenceMode::coupled,
                             const StepObserver& observer = {});

// The unit of one Monte Carlo sample: both trajectories driven by the same
// increment blocks. Returns (coarse, fine).
std::pair<SpectralVector, SpectralVector> run_coupled_pair(const ModelSpec& model,
                                                           const SchemeParams& params,
                                                           std::uint64_t stream_id);

}  // namespace spde
