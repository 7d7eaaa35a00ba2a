#include "metaduct/specfun.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace metaduct::specfun {
namespace {

using real = long double;

constexpr real kPiL = std::numbers::pi_v<long double>;

void check_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw std::domain_error(std::string(name) + ": argument must be finite");
  }
}

// sum_k (-q)^k / (k! (k+order)!) with q = x^2/4, order 0 or 1.
real series(real x, int order) {
  const real q = x * x / 4;
  real term = order == 0 ? real{1} : x / 2;
  real sum = term;
  for (int k = 1; k < 60; ++k) {
    term *= -q / (static_cast<real>(k) * static_cast<real>(k + order));
    sum += term;
    if (std::fabs(term) < 1e-22L * std::fabs(sum)) break;
  }
  return sum;
}

struct Pair {
  real j0;
  real j1;
};

// Miller's algorithm normalized with 1 = J0 + 2 sum J_2k.
Pair miller(real x) {
  const int start = 2 * (static_cast<int>(x) / 2) + 44;
  real next = 0;       // J_{k+1}
  real cur = 1e-40L;   // J_k, arbitrary scale
  real norm = (start % 2 == 0) ? 2 * cur : real{0};
  real j0 = 0;
  real j1 = 0;
  for (int k = start; k >= 1; --k) {
    const real prev = (2 * static_cast<real>(k) / x) * cur - next;
    next = cur;
    cur = prev;
    const int order = k - 1;
    if (order == 1) j1 = cur;
    if (order == 0) {
      j0 = cur;
      norm += cur;
    } else if (order % 2 == 0) {
      norm += 2 * cur;
    }
  }
  return {j0 / norm, j1 / norm};
}

// Hankel expansion J_nu = sqrt(2/(pi x)) (P cos chi - Q sin chi), nu in {0, 1}.
real hankel(real x, int order) {
  const real mu = 4.0L * order * order;
  real p = 1;
  real q = 0;
  real term = 1;
  real last = 1e300L;
  for (int k = 1; k < 80; ++k) {
    const real odd = 2.0L * k - 1;
    term *= (mu - odd * odd) / (static_cast<real>(k) * 8 * x);
    if (std::fabs(term) > last) break;  // series started diverging
    last = std::fabs(term);
    // k odd feeds Q with signs +,-,+...; k even feeds P with signs -,+,-...
    if (k % 2 == 1) {
      q += ((k / 2) % 2 == 0) ? term : -term;
    } else {
      p += ((k / 2) % 2 == 1) ? -term : term;
    }
    if (last < 1e-24L) break;
  }
  const real c = std::cos(x);
  const real s = std::sin(x);
  const real inv_sqrt2 = 1 / std::sqrt(real{2});
  real cos_chi;
  real sin_chi;
  if (order == 0) {  // chi = x - pi/4
    cos_chi = (c + s) * inv_sqrt2;
    sin_chi = (s - c) * inv_sqrt2;
  } else {  // chi = x - 3pi/4
    cos_chi = (s - c) * inv_sqrt2;
    sin_chi = -(s + c) * inv_sqrt2;
  }
  return std::sqrt(2 / (kPiL * x)) * (p * cos_chi - q * sin_chi);
}

real eval(real ax, int order) {
  if (ax <= kSeriesLimit) return series(ax, order);
  if (ax < kAsymptoticLimit) {
    const Pair both = miller(ax);
    return order == 0 ? both.j0 : both.j1;
  }
  return hankel(ax, order);
}

}  // namespace

double bessel_j0(double x) {
  check_finite(x, "bessel_j0");
  return static_cast<double>(eval(std::fabs(static_cast<real>(x)), 0));
}

double bessel_j1(double x) {
  check_finite(x, "bessel_j1");
  const double v = static_cast<double>(eval(std::fabs(static_cast<real>(x)), 1));
  return x < 0 ? -v : v;
}

BesselRootTable j1_roots(int count) {
  if (count < 1) throw std::invalid_argument("j1_roots: count must be >= 1");
  BesselRootTable table;
  table.roots.reserve(static_cast<std::size_t>(count));
  table.roots.push_back(0.0);
  for (int n = 1; n < count; ++n) {
    const double guess = (n + 0.25) * std::numbers::pi;
    double lo = guess - 1.0;
    double hi = guess + 0.5;
    double flo = bessel_j1(lo);
    if (flo * bessel_j1(hi) > 0.0) {
      throw std::runtime_error("j1_roots: bracket lost at n = " + std::to_string(n));
    }
    for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = bessel_j1(mid);
      if (fm == 0.0) {
        lo = hi = mid;
        break;
      }
      if ((fm < 0.0) == (flo < 0.0)) {
        lo = mid;
        flo = fm;
      } else {
        hi = mid;
      }
    }
    double x = 0.5 * (lo + hi);
    // J1'(x) = J0(x) - J1(x)/x
    const double f = bessel_j1(x);
    const double df = bessel_j0(x) - f / x;
    if (df != 0.0) {
      const double polished = x - f / df;
      if (std::fabs(bessel_j1(polished)) <= std::fabs(f)) x = polished;
    }
    table.roots.push_back(x);
  }
  return table;
}

std::shared_ptr<const BesselRootTable> shared_j1_roots(int count) {
  static std::mutex mutex;
  static std::shared_ptr<const BesselRootTable> cache;
  if (count < 1) throw std::invalid_argument("shared_j1_roots: count must be >= 1");
  std::lock_guard lock(mutex);
  if (!cache || cache->count() < static_cast<std::size_t>(count)) {
    cache = std::make_shared<const BesselRootTable>(j1_roots(count));
  }
  return cache;
}

}  // namespace metaduct::specfun
