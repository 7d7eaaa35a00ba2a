#pragma once

#include <complex>
#include <cstdint>
#include <random>

#include "metaduct/transfer_matrix.hpp"
#include "metaduct/types.hpp"

namespace testsupport {

using metaduct::cplx;

// Seeded draws for property tests. Each test owns its generator so runs are
// reproducible and independent of test order.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  double log_uniform(double a, double b) { return std::exp(uniform(std::log(a), std::log(b))); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }

  cplx complex_in_box(double half_width) { return {uniform(-half_width, half_width), uniform(-half_width, half_width)}; }

  // Nonzero complex with modulus in [lo, hi] and uniform phase.
  cplx complex_polar(double lo, double hi) {
    return std::polar(log_uniform(lo, hi), uniform(-metaduct::kPi, metaduct::kPi));
  }

  // Plausible tube: r2 in [25, 100] mm, r1/r2 in [0.3, 0.9], t in [2, 20] mm.
  metaduct::DuctGeometry geometry() {
    metaduct::DuctGeometry g;
    g.r2 = uniform(0.025, 0.1);
    g.r1 = g.r2 * uniform(0.3, 0.9);
    g.t = uniform(0.002, 0.02);
    return g;
  }

  // Passive effective fluid under e^{+i omega t}: kappa = kappa_r (1 + i tan d)
  // gives n = n_r / sqrt(1 + i tan d) and z = z_r sqrt(1 + i tan d).
  static cplx lossy_index(double n_r, double tan_d) { return n_r / std::sqrt(cplx(1.0, tan_d)); }
  static cplx lossy_impedance(double z_r, double tan_d) { return z_r * std::sqrt(cplx(1.0, tan_d)); }

  // (T, R) of a random passive symmetric layer at frequency f.
  metaduct::ScatteringData layer_tr(const metaduct::MediumProperties& medium, double f) {
    const double t = uniform(0.002, 0.05);
    const double tan_d = uniform(0.0, 0.2);
    const cplx n = lossy_index(uniform(0.5, 8.0), tan_d);
    const cplx zeta = lossy_impedance(medium.alpha() * log_uniform(0.2, 20.0), tan_d);
    const auto m = metaduct::TransferMatrix::layer(n, zeta, medium.wavenumber(f), t);
    const auto tr = metaduct::tr_from_transfer_matrix(m, medium);
    return {f, tr.T, tr.R};
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

}  // namespace testsupport
