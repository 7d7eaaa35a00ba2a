#pragma once

#include <memory>
#include <vector>

#include "metaduct/specfun.hpp"
#include "metaduct/types.hpp"

namespace metaduct {

// Sign of the axial wavenumber of cut-off modes. Under the e^{+i omega t}
// convention used throughout, fields that decay away from an interface need
// beta_n = -i sqrt(k_n^2 - k0^2). The opposite sign exists only so the choice
// can be checked against the FDFD oracle.
enum class EvanescentBranch { Decaying, Growing };

// Radial eigen-wavenumbers of a rigid circular duct, k_n = x_n / r2 with x_n
// the roots of J1 (x_0 = 0 is the plane wave). Immutable once built.
class ModalBasis {
 public:
  ModalBasis(const DuctGeometry& geometry, int modes);

  [[nodiscard]] const DuctGeometry& geometry() const { return geometry_; }
  [[nodiscard]] int size() const { return static_cast<int>(k_.size()); }
  [[nodiscard]] double root(int n) const { return roots_->roots[static_cast<std::size_t>(n)]; }
  [[nodiscard]] double wavenumber(int n) const { return k_[static_cast<std::size_t>(n)]; }
  // J0(x_n), the eigenmode normalization at the wall.
  [[nodiscard]] double wall_value(int n) const { return wall_[static_cast<std::size_t>(n)]; }

  // First non-planar cutoff x_1 c0 / (2 pi r2); +inf for a plane-wave-only basis.
  [[nodiscard]] double first_cutoff_hz(const MediumProperties& medium) const;

  // beta_n = sqrt(k0^2 - k_n^2); real positive when propagating.
  [[nodiscard]] cplx axial_wavenumber(int n, double k0,
                                      EvanescentBranch branch = EvanescentBranch::Decaying) const;

 private:
  DuctGeometry geometry_;
  std::shared_ptr<const specfun::BesselRootTable> roots_;
  std::vector<double> k_;
  std::vector<double> wall_;
};

ModalBasis duct_wavenumbers(const DuctGeometry& geometry, int modes);

// phi_n(r) = J0(k_n r) / J0(k_n r2), so phi_0 = 1 and phi_n(r2) = 1.
// Throws ValidationError for r outside [0, r2] or n outside the basis.
double eigenmode(int n, double r, const ModalBasis& basis);

// Integral of J0(k r) r dr over [a, b]: [r J1(k r) / k] for k > 0 and
// (b^2 - a^2) / 2 for k = 0.
double radial_integral(double k, double a, double b);

// Interface radiation impedances (Pa s/m^3) linking averaged pressure to
// volume velocity on the sample disk (1) and the gap annulus (2). A-D act on
// the upstream face, E-H on the downstream face.
struct CouplingCoefficients {
  cplx A, B, C, D, E, F, G, H;
  double frequency = 0.0;
  int modes = 0;
  // max over the eight coefficients of |c_N - c_{N/2}| / |c_N|
  double relative_change = 0.0;
  bool above_cutoff = false;
};

struct CouplingOptions {
  int modes = 4096;
  double tolerance = 1e-7;
  bool check_convergence = true;
  EvanescentBranch branch = EvanescentBranch::Decaying;
};

// Modal sums of the interface Green's function integrated over source and
// receiver regions, with the 4 i rho0 omega prefactor and area normalizations.
// Throws ConvergenceError when relative_change exceeds options.tolerance.
CouplingCoefficients coupling_coefficients(const ModalBasis& basis, const MediumProperties& medium,
                                           double f, const CouplingOptions& options);

CouplingCoefficients coupling_coefficients(const DuctGeometry& geometry,
                                           const MediumProperties& medium, double f, int modes);

}  // namespace metaduct
