#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "metaduct/errors.hpp"

namespace metaduct {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr cplx kI{0.0, 1.0};

// Background fluid in the duct.
struct MediumProperties {
  double rho0 = 1.21;   // kg/m^3
  double c0 = 343.0;    // m/s

  // Characteristic impedance rho0*c0 (Pa s/m).
  [[nodiscard]] double alpha() const { return rho0 * c0; }
  [[nodiscard]] double wavenumber(double f_hz) const { return 2.0 * kPi * f_hz / c0; }

  void validate() const;
};

// Circular duct of radius r2 holding a coaxial sample disk of radius r1 and
// thickness t. The annulus r1 < r < r2 over the sample thickness is air.
struct DuctGeometry {
  double r1 = 0.0;  // m
  double r2 = 0.0;  // m
  double t = 0.0;   // m

  [[nodiscard]] double sample_area() const { return kPi * r1 * r1; }
  [[nodiscard]] double duct_area() const { return kPi * r2 * r2; }
  // Computed from (r2-r1)(r2+r1) so that S1 + S3 reproduces S2 to rounding.
  [[nodiscard]] double gap_area() const { return kPi * (r2 - r1) * (r2 + r1); }

  void validate() const;
};

// One measured frequency point.
struct ScatteringData {
  double f = 0.0;  // Hz
  cplx T;          // P_T / P_I, referenced to x = t
  cplx R;          // P_R / P_I, referenced to x = 0

  void validate() const;
};

inline void MediumProperties::validate() const {
  if (!(rho0 > 0.0) || !std::isfinite(rho0)) throw ValidationError("medium.rho0 must be positive");
  if (!(c0 > 0.0) || !std::isfinite(c0)) throw ValidationError("medium.c0 must be positive");
}

inline void DuctGeometry::validate() const {
  if (!std::isfinite(r1) || !std::isfinite(r2) || !std::isfinite(t))
    throw ValidationError("geometry values must be finite");
  if (!(r1 > 0.0)) throw ValidationError("geometry.r1 must be positive");
  if (!(r1 < r2))
    throw ValidationError("geometry.r1 must be smaller than geometry.r2 (use the full-fill retrieval when r1 == r2)");
  if (!(t > 0.0)) throw ValidationError("geometry.t must be positive");
}

inline void ScatteringData::validate() const {
  if (!(f > 0.0) || !std::isfinite(f)) throw ValidationError("frequency must be positive and finite");
  if (!std::isfinite(T.real()) || !std::isfinite(T.imag()) || !std::isfinite(R.real()) ||
      !std::isfinite(R.imag()))
    throw ValidationError("T and R must be finite at f = " + std::to_string(f) + " Hz");
}

}  // namespace metaduct
