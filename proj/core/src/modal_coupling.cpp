#include "metaduct/modal_coupling.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <string>

#include "metaduct/errors.hpp"

namespace metaduct {

ModalBasis::ModalBasis(const DuctGeometry& geometry, int modes) : geometry_(geometry) {
  geometry_.validate();
  if (modes < 1) throw ValidationError("modal truncation must be >= 1");
  roots_ = specfun::shared_j1_roots(modes);
  k_.resize(static_cast<std::size_t>(modes));
  wall_.resize(static_cast<std::size_t>(modes));
  for (int n = 0; n < modes; ++n) {
    const double x = roots_->roots[static_cast<std::size_t>(n)];
    k_[static_cast<std::size_t>(n)] = x / geometry_.r2;
    wall_[static_cast<std::size_t>(n)] = specfun::bessel_j0(x);
  }
}

double ModalBasis::first_cutoff_hz(const MediumProperties& medium) const {
  if (size() < 2) return std::numeric_limits<double>::infinity();
  return wavenumber(1) * medium.c0 / (2.0 * kPi);
}

cplx ModalBasis::axial_wavenumber(int n, double k0, EvanescentBranch branch) const {
  const double kn = wavenumber(n);
  const double d = k0 * k0 - kn * kn;
  if (d >= 0.0) return {std::sqrt(d), 0.0};
  const double kappa = std::sqrt(-d);
  return branch == EvanescentBranch::Decaying ? cplx{0.0, -kappa} : cplx{0.0, kappa};
}

ModalBasis duct_wavenumbers(const DuctGeometry& geometry, int modes) {
  return ModalBasis(geometry, modes);
}

double eigenmode(int n, double r, const ModalBasis& basis) {
  if (n < 0 || n >= basis.size()) throw ValidationError("eigenmode: mode index outside basis");
  const double r2 = basis.geometry().r2;
  if (!(r >= 0.0) || r > r2) throw ValidationError("eigenmode: radius outside the duct");
  if (n == 0) return 1.0;
  return specfun::bessel_j0(basis.wavenumber(n) * r) / basis.wall_value(n);
}

double radial_integral(double k, double a, double b) {
  if (k == 0.0) return 0.5 * (b * b - a * a);
  return (b * specfun::bessel_j1(k * b) - a * specfun::bessel_j1(k * a)) / k;
}

CouplingCoefficients coupling_coefficients(const ModalBasis& basis, const MediumProperties& medium,
                                           double f, const CouplingOptions& options) {
  medium.validate();
  if (!(f > 0.0)) throw ValidationError("coupling_coefficients: frequency must be positive");
  const int modes = std::min(options.modes, basis.size());
  if (modes < 1) throw ValidationError("coupling_coefficients: need at least one mode");

  const DuctGeometry& g = basis.geometry();
  const double r1 = g.r1;
  const double r2 = g.r2;
  const double omega = 2.0 * kPi * f;
  const double k0 = medium.wavenumber(f);

  // Per-mode contributions to the three distinct double integrals:
  // disk-disk, disk-annulus (= annulus-disk), annulus-annulus.
  std::vector<std::array<cplx, 3>> terms(static_cast<std::size_t>(modes));
  for (int n = 0; n < modes; ++n) {
    const double kn = basis.wavenumber(n);
    const double norm = basis.wall_value(n);  // 1 for n = 0
    const double disk = radial_integral(kn, 0.0, r1) / norm;
    const double ring = radial_integral(kn, r1, r2) / norm;
    const cplx green = 1.0 / (-kI * kPi * r2 * r2 * basis.axial_wavenumber(n, k0, options.branch));
    terms[static_cast<std::size_t>(n)] = {green * disk * disk, green * disk * ring,
                                          green * ring * ring};
  }

  // Smallest terms first.
  auto partial = [&](int upto) {
    std::array<cplx, 3> s{};
    for (int n = upto - 1; n >= 0; --n) {
      for (int c = 0; c < 3; ++c) s[static_cast<std::size_t>(c)] += terms[static_cast<std::size_t>(n)][static_cast<std::size_t>(c)];
    }
    return s;
  };

  const double d1 = r1 * r1;
  const double d3 = r2 * r2 - r1 * r1;
  const cplx pre = 4.0 * kI * medium.rho0 * omega;

  auto assemble = [&](const std::array<cplx, 3>& s) {
    CouplingCoefficients c;
    c.A = pre / (d1 * d1) * s[0];
    c.B = pre / (d1 * d3) * s[1];
    c.C = pre / (d1 * d3) * s[1];
    c.D = pre / (d3 * d3) * s[2];
    c.E = -pre / (d1 * d1) * s[0];
    c.F = -pre / (d1 * d3) * s[1];
    c.G = -pre / (d1 * d3) * s[1];
    c.H = -pre / (d3 * d3) * s[2];
    return c;
  };

  CouplingCoefficients result = assemble(partial(modes));
  result.frequency = f;
  result.modes = modes;
  result.above_cutoff = modes >= 2 ? k0 > basis.wavenumber(1) : false;

  if (modes >= 2) {
    const CouplingCoefficients half = assemble(partial(modes / 2));
    const std::array<std::pair<cplx, cplx>, 8> pairs{{{result.A, half.A},
                                                     {result.B, half.B},
                                                     {result.C, half.C},
                                                     {result.D, half.D},
                                                     {result.E, half.E},
                                                     {result.F, half.F},
                                                     {result.G, half.G},
                                                     {result.H, half.H}}};
    double worst = 0.0;
    for (const auto& [full, coarse] : pairs) {
      worst = std::max(worst, std::abs(full - coarse) / std::abs(full));
    }
    result.relative_change = worst;
  }

  if (options.check_convergence && result.relative_change > options.tolerance) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "modal sum not converged at f = %.17g Hz: relative change %.3e with %d modes", f,
                  result.relative_change, modes);
    throw ConvergenceError(msg, f);
  }
  return result;
}

CouplingCoefficients coupling_coefficients(const DuctGeometry& geometry,
                                           const MediumProperties& medium, double f, int modes) {
  CouplingOptions options;
  options.modes = modes;
  return coupling_coefficients(ModalBasis(geometry, modes), medium, f, options);
}

}  // namespace metaduct
