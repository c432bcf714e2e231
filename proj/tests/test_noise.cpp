#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "spde/noise.hpp"
#include "spde/util.hpp"

using namespace spde;

TEST_CASE("standard gaussian is a pure function of its coordinates") {
  const double a = standard_gaussian(42, 7, 100, 3, rng_purpose::kWiener);
  const double b = standard_gaussian(42, 7, 100, 3, rng_purpose::kWiener);
  CHECK(a == b);
  CHECK(std::isfinite(a));
  // distinct coordinates give distinct draws
  CHECK(a != standard_gaussian(42, 7, 100, 3, rng_purpose::kConvolution));
  CHECK(a != standard_gaussian(42, 7, 101, 3, rng_purpose::kWiener));
  CHECK(a != standard_gaussian(42, 8, 100, 3, rng_purpose::kWiener));
  CHECK(a != standard_gaussian(43, 7, 100, 3, rng_purpose::kWiener));
}

TEST_CASE("stream replay is bit exact") {
  NoiseStream s1(123, 5);
  NoiseStream s2(123, 5);
  const SpectralVector a = s1.wiener_increment(16, 0.25);
  const SpectralVector b = s2.wiener_increment(16, 0.25);
  CHECK(a.coeffs == b.coeffs);
  // the step counter advances, so the next draw differs
  const SpectralVector c = s1.wiener_increment(16, 0.25);
  CHECK(a.coeffs != c.coeffs);
  // reset replays from the start
  s1.reset();
  CHECK(s1.wiener_increment(16, 0.25).coeffs == a.coeffs);
  CHECK_THROWS(s1.wiener_increment(16, 0.0));
  CHECK_THROWS(s1.wiener_increment(16, -1.0));
}

TEST_CASE("disjoint streams give different draws") {
  NoiseStream s1(123, 5);
  NoiseStream s2(123, 6);
  CHECK(s1.wiener_increment(16, 0.25).coeffs != s2.wiener_increment(16, 0.25).coeffs);
}

TEST_CASE("moments of wiener increments") {
  // 1e6 standard draws: mean within 4/sqrt(n), variance within 1%
  const std::size_t n_modes = 8;
  const long n_draws = 125000;  // x 8 modes = 1e6 scalars
  const double dt = 0.25;
  NoiseStream stream(2024, 0);
  KahanSum sum, sumsq, max_run;
  double running_max = 0.0;
  long count = 0;
  for (long i = 0; i < n_draws; ++i) {
    const SpectralVector w = stream.wiener_increment(n_modes, dt);
    for (std::size_t k = 0; k < n_modes; ++k) {
      sum.add(w[k]);
      sumsq.add(w[k] * w[k]);
      running_max = std::max(running_max, std::abs(w[k]));
      ++count;
    }
  }
  const double mean = sum.value() / count;
  const double var = sumsq.value() / count - mean * mean;
  CHECK(std::abs(mean) < 4.0 * std::sqrt(dt / count));
  CHECK(var == doctest::Approx(dt).epsilon(0.01));
  // tails are Gaussian: max of 1e6 draws stays comfortably below 7 sigma
  CHECK(running_max < 7.0 * std::sqrt(dt));
  CHECK(running_max > 3.0 * std::sqrt(dt));
}

TEST_CASE("increment blocks aggregate exactly") {
  NoiseStream stream(99, 3);
  const std::size_t n = 8, r = 16;
  const double h = 1.0 / 64.0;
  const IncrementBlock block = sample_increment_block(stream, n, r, h);
  CHECK(block.n_modes == n);
  CHECK(block.refinement == r);
  CHECK(block.fine.size() == n * r);

  const SpectralVector coarse = coarse_from_fine(block);
  for (std::size_t k = 0; k < n; ++k) {
    KahanSum s;
    for (std::size_t j = 0; j < r; ++j) s.add(block.at(k, j));
    CHECK(coarse[k] == s.value());
  }

  // block sampling consumes the stream the same way as r plain draws
  NoiseStream replay(99, 3);
  for (std::size_t j = 0; j < r; ++j) {
    const SpectralVector w = replay.wiener_increment(n, h);
    for (std::size_t k = 0; k < n; ++k) CHECK(w[k] == block.at(k, j));
  }
}

TEST_CASE("coarse increments have variance r * dt_fine") {
  const std::size_t n = 4, r = 8;
  const double h = 1.0 / 128.0;
  NoiseStream stream(7, 11);
  KahanSum sumsq;
  const long n_blocks = 20000;
  for (long i = 0; i < n_blocks; ++i) {
    const SpectralVector c = coarse_from_fine(sample_increment_block(stream, n, r, h));
    for (std::size_t k = 0; k < n; ++k) sumsq.add(c[k] * c[k]);
  }
  const double var = sumsq.value() / (n_blocks * n);
  CHECK(var == doctest::Approx(r * h).epsilon(0.02));
}

TEST_CASE("exact stochastic convolution law") {
  const Spectrum s = Spectrum::dirichlet_laplacian(16);
  const double tau = 0.05;

  SUBCASE("one-step variance matches the closed form") {
    const long n_samples = 10000;
    std::vector<KahanSum> sumsq(16);
    for (long i = 0; i < n_samples; ++i) {
      NoiseStream stream(31, static_cast<std::uint64_t>(i));
      const SpectralVector eta = stream.convolution_noise(s, tau);
      for (std::size_t k = 0; k < 16; ++k) sumsq[k].add(eta[k] * eta[k]);
    }
    for (std::size_t k = 0; k <= 8; ++k) {
      const double expected = -std::expm1(-2.0 * s[k] * tau) / (2.0 * s[k]);
      CHECK(sumsq[k].value() / n_samples == doctest::Approx(expected).epsilon(0.05));
    }
  }

  SUBCASE("the chain from zero reaches the stationary variance") {
    // after m steps Var_k = (1 - e^{-2 mu_k m tau}) / (2 mu_k); with
    // m tau = 2 the factor is 1 to machine precision for every mode
    const long m = 40;
    const long n_samples = 10000;
    std::vector<KahanSum> sumsq(16);
    for (long i = 0; i < n_samples; ++i) {
      NoiseStream stream(77, static_cast<std::uint64_t>(i));
      SpectralVector z(16);
      for (long j = 0; j < m; ++j) z = stochastic_convolution_exact_step(s, z, tau, stream);
      for (std::size_t k = 0; k < 16; ++k) sumsq[k].add(z[k] * z[k]);
    }
    for (std::size_t k = 0; k <= 8; ++k) {
      CHECK(sumsq[k].value() / n_samples ==
            doctest::Approx(1.0 / (2.0 * s[k])).epsilon(0.05));
    }
  }
}

TEST_CASE("purposes are independent coordinates") {
  NoiseStream a(5, 1);
  NoiseStream b(5, 1);
  const SpectralVector w = a.wiener_increment(8, 1.0);
  const SpectralVector v = b.standard_vector(8);
  // same step index, different purpose: unrelated values
  CHECK(w.coeffs != v.coeffs);
}
