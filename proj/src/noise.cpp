#include "spde/noise.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "spde/util.hpp"

namespace spde {

namespace {

struct Block4 {
  std::uint32_t v[4];
};

inline void philox_round(std::uint32_t c[4], const std::uint32_t k[2]) {
  constexpr std::uint64_t kMul0 = 0xD2511F53ULL;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57ULL;
  const std::uint64_t p0 = kMul0 * c[0];
  const std::uint64_t p1 = kMul1 * c[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  c[0] = hi1 ^ c[1] ^ k[0];
  c[1] = lo1;
  c[2] = hi0 ^ c[3] ^ k[1];
  c[3] = lo0;
}

inline Block4 philox10(std::uint64_t key, std::uint32_t c0, std::uint32_t c1,
                       std::uint32_t c2, std::uint32_t c3) {
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  std::uint32_t c[4] = {c0, c1, c2, c3};
  std::uint32_t k[2] = {static_cast<std::uint32_t>(key),
                        static_cast<std::uint32_t>(key >> 32)};
  for (int r = 0; r < 10; ++r) {
    philox_round(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return Block4{{c[0], c[1], c[2], c[3]}};
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in (0,1): never 0, so log() below is safe.
inline double uniform01(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return (static_cast<double>(bits >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

struct GaussPair {
  double z0, z1;
};

inline GaussPair gauss_pair(std::uint64_t master_seed, std::uint64_t stream_id,
                            std::uint64_t step, std::uint32_t pair, std::uint32_t purpose) {
  const std::uint64_t key = master_seed ^ splitmix64(stream_id);
  const Block4 b = philox10(key, static_cast<std::uint32_t>(step),
                            static_cast<std::uint32_t>(step >> 32), pair, purpose);
  const double u1 = uniform01(b.v[0], b.v[1]);
  const double u2 = uniform01(b.v[2], b.v[3]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return GaussPair{r * std::cos(theta), r * std::sin(theta)};
}

}  // namespace

double standard_gaussian(std::uint64_t master_seed, std::uint64_t stream_id,
                         std::uint64_t step, std::uint32_t mode, std::uint32_t purpose) {
  const GaussPair g = gauss_pair(master_seed, stream_id, step, mode / 2, purpose);
  return (mode % 2 == 0) ? g.z0 : g.z1;
}

SpectralVector NoiseStream::gaussian_block(std::size_t n_modes, std::uint32_t purpose) {
  SpectralVector out(n_modes);
  for (std::size_t p = 0; 2 * p < n_modes; ++p) {
    const GaussPair g = gauss_pair(master_seed_, stream_id_, step_,
                                   static_cast<std::uint32_t>(p), purpose);
    out[2 * p] = g.z0;
    if (2 * p + 1 < n_modes) out[2 * p + 1] = g.z1;
  }
  ++step_;
  return out;
}

SpectralVector NoiseStream::wiener_increment(std::size_t n_modes, double dt) {
  if (!(dt > 0.0)) throw std::domain_error("wiener_increment: dt must be > 0");
  SpectralVector out = gaussian_block(n_modes, rng_purpose::kWiener);
  const double s = std::sqrt(dt);
  for (double& c : out.coeffs) c *= s;
  return out;
}

SpectralVector NoiseStream::standard_vector(std::size_t n_modes) {
  return gaussian_block(n_modes, rng_purpose::kProbe);
}

SpectralVector NoiseStream::convolution_noise(const Spectrum& s, double tau) {
  if (!(tau > 0.0)) throw std::domain_error("convolution_noise: tau must be > 0");
  SpectralVector out = gaussian_block(s.size(), rng_purpose::kConvolution);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double var = (1.0 - std::exp(-2.0 * s[k] * tau)) / (2.0 * s[k]);
    out[k] *= std::sqrt(var);
  }
  return out;
}

IncrementBlock sample_increment_block(NoiseStream& stream, std::size_t n_modes,
                                      std::size_t refinement, double dt_fine) {
  if (refinement == 0) throw std::domain_error("sample_increment_block: refinement == 0");
  IncrementBlock block;
  block.n_modes = n_modes;
  block.refinement = refinement;
  block.dt_fine = dt_fine;
  block.fine.resize(n_modes * refinement);
  for (std::size_t sub = 0; sub < refinement; ++sub) {
    const SpectralVector w = stream.wiener_increment(n_modes, dt_fine);
    for (std::size_t k = 0; k < n_modes; ++k) {
      block.fine[k * refinement + sub] = w[k];
    }
  }
  return block;
}

SpectralVector coarse_from_fine(const IncrementBlock& block) {
  SpectralVector out(block.n_modes);
  for (std::size_t k = 0; k < block.n_modes; ++k) {
    KahanSum acc;
    for (std::size_t sub = 0; sub < block.refinement; ++sub) {
      acc.add(block.fine[k * block.refinement + sub]);
    }
    out[k] = acc.value();
  }
  return out;
}

SpectralVector stochastic_convolution_exact_step(const Spectrum& s, const SpectralVector& z,
                                                 double tau, NoiseStream& stream) {
  if (!(tau > 0.0)) {
    throw std::domain_error("stochastic_convolution_exact_step: tau must be > 0");
  }
  const SpectralVector eta = stream.convolution_noise(s, tau);
  SpectralVector out(z.n_modes());
  for (std::size_t k = 0; k < z.n_modes(); ++k) {
    out[k] = std::exp(-s[k] * tau) * z[k] + eta[k];
  }
  return out;
}

}  // namespace spde
