#pragma once

#include <cstddef>
#include <memory>
#include <vector>

namespace metaduct::specfun {

// Regions of the J0/J1 evaluation: power series below kSeriesLimit, Miller
// backward recurrence up to kAsymptoticLimit, Hankel asymptotic expansion above.
// Both crossovers are continuous to ~1e-16 (see tests/unit/test_specfun.cpp).
inline constexpr double kSeriesLimit = 4.0;
inline constexpr double kAsymptoticLimit = 18.0;

// Cylindrical Bessel function of the first kind, order 0. Even in x.
// Throws std::domain_error for non-finite x.
double bessel_j0(double x);

// Cylindrical Bessel function of the first kind, order 1. Odd in x.
double bessel_j1(double x);

// Roots of J1 with x0 = 0 prepended for the plane-wave mode. Since J0' = -J1
// these are the rigid-wall radial eigenvalues of a circular duct.
struct BesselRootTable {
  std::vector<double> roots;

  [[nodiscard]] std::size_t count() const { return roots.size(); }
  [[nodiscard]] double operator[](std::size_t n) const { return roots[n]; }
};

// x0 = 0 followed by the first count-1 positive roots of J1, each bracketed
// around (n + 1/4)pi, bisected, then polished with one Newton step.
// Throws std::invalid_argument for count < 1.
BesselRootTable j1_roots(int count);

// Same table, shared across callers. Computed once per process and extended
// when a larger count is requested; safe to call concurrently.
std::shared_ptr<const BesselRootTable> shared_j1_roots(int count);

}  // namespace metaduct::specfun
