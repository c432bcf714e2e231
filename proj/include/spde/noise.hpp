#pragma once

#include <cstdint>

#include "spde/spectral.hpp"

namespace spde {

// Counter-based Gaussian draws: Philox4x32-10 keyed by (master_seed,
// stream_id), counter (step, mode pair, purpose), mapped through Box-Muller.
// Every draw is a pure function of its coordinates, so trajectories replay
// bit-for-bit and distinct streams share no state.
//
// Box-Muller is the fixed sampling scheme; both outputs of a block are used,
// for the even and odd mode of a pair. Never mix in another scheme.
namespace rng_purpose {
inline constexpr std::uint32_t kWiener = 0;
inline constexpr std::uint32_t kConvolution = 1;
inline constexpr std::uint32_t kProbe = 2;  // sampling in diagnostics
}  // namespace rng_purpose

// Standard normal draw at coordinates (seed, stream, step, mode, purpose).
double standard_gaussian(std::uint64_t master_seed, std::uint64_t stream_id,
                         std::uint64_t step, std::uint32_t mode, std::uint32_t purpose);

// One trajectory's noise source. Owned by exactly one trajectory; the step
// counter is the only mutable state.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : master_seed_(master_seed), stream_id_(stream_id) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t step() const { return step_; }
  void reset() { step_ = 0; }

  // N iid Normal(0, dt) coefficients for the current step; advances the counter.
  SpectralVector wiener_increment(std::size_t n_modes, double dt);

  // Standard normal vector under the probe purpose; advances the counter.
  SpectralVector standard_vector(std::size_t n_modes);

  // Exact one-step draw of the stochastic convolution noise: mode k is
  // Normal(0, (1 - e^{-2 mu_k tau}) / (2 mu_k)). Advances the counter.
  SpectralVector convolution_noise(const Spectrum& s, double tau);

 private:
  SpectralVector gaussian_block(std::size_t n_modes, std::uint32_t purpose);

  std::uint64_t master_seed_;
  std::uint64_t stream_id_;
  std::uint64_t step_ = 0;
};

// Fine Wiener increments for one coarse step: n_modes x r draws, each
// Normal(0, dt_fine), stored row-major per mode.
struct IncrementBlock {
  std::vector<double> fine;
  std::size_t n_modes = 0;
  std::size_t refinement = 0;
  double dt_fine = 0.0;

  double at(std::size_t mode, std::size_t sub) const {
    return fine[mode * refinement + sub];
  }
};

// r successive wiener_increment draws packed into a block.
IncrementBlock sample_increment_block(NoiseStream& stream, std::size_t n_modes,
                                      std::size_t refinement, double dt_fine);

// Per-mode row sums: the coarse increment is the exact sum of its fine parts.
SpectralVector coarse_from_fine(const IncrementBlock& block);

// z -> e^{tau B} z + eta with eta the exact convolution draw; the chain
// started at 0 has the law of W^B(m tau) exactly.
SpectralVector stochastic_convolution_exact_step(const Spectrum& s, const SpectralVector& z,
                                                 double tau, NoiseStream& stream);

}  // namespace spde
