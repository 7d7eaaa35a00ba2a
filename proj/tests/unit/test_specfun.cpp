#include <doctest.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "generators.hpp"
#include "metaduct/specfun.hpp"

using namespace metaduct;
using namespace metaduct::specfun;

namespace {

struct Ref {
  double x, j0, j1;
};

// 40-digit mpmath values at the given double arguments.
const Ref kRef[] = {
    {0.0, 1.0, 0.0},
    {1e-3, 0.999999750000015625, 0.000499999937500002614575},
    {0.1, 0.997501562066040032004, 0.0499375260362420003215},
    {0.5, 0.938469807240812904228, 0.242268457674873886384},
    {1.0, 0.76519768655796655145, 0.44005058574493351596},
    {2.0, 0.223890779141235668052, 0.576724807756873387202},
    {2.4048255577, -2.19464561362184970371e-12, 0.519147497288554187388},
    {3.0, -0.260051954901933437624, 0.339058958525936458926},
    {3.8317059702, -0.402759395702552972096, 3.02573176103322837982e-12},
    {4.0, -0.397149809863847372287, -0.0660433280235491361432},
    {4.5, -0.320542508985121424355, -0.231060431923370634008},
    {5.0, -0.177596771314338304347, -0.327579137591465222038},
    {6.0, 0.150645257250996931662, -0.276683858127565608173},
    {7.0, 0.30007927051955559665, -0.00468282348234583269911},
    {8.0, 0.171650807137553906091, 0.234636346853914624381},
    {10.0, -0.245935764451348335198, 0.0434727461688614366697},
    {12.0, 0.0476893107968335366238, -0.223447104490627612368},
    {15.0, -0.0142244728267807732339, 0.205104038613522761147},
    {17.5, -0.103110398228685922173, -0.163419969425754905892},
    {20.0, 0.167024664340583154727, 0.066833124175850045579},
    {25.0, 0.0962667832759581161735, -0.125350249580289904652},
    {30.0, -0.086367983581040211336, -0.11875106261662293652},
    {40.0, 0.00736689058423728955353, 0.126038318037584999206},
    {50.0, 0.0558123276692518150048, -0.0975118281251751376615},
    {75.0, 0.0346439138050970561374, -0.085139995044829103941},
    {100.0, 0.0199858503042231224242, -0.0771453520141121580327},
    {150.0, -0.000774090375394291246946, -0.0651451636577273603046},
    {200.0, -0.0154374399305650915919, -0.0543045381823782227107},
    {250.0, -0.0260533734252042336644, -0.0432690384103307495108},
    {300.0, -0.0332985548763056680075, -0.031887431377499950314},
    {400.0, -0.0388251815307839557138, -0.00922205842858635125424},
    {499.5, -0.0249013169343011345243, 0.0255570692267795804831},
    {500.0, -0.0341005568807319982651, 0.0104726134703722928445},
};

// First 20 positive roots of J1 (mpmath besseljzero).
const double kRoots[] = {
    3.83170597020751231561, 7.01558666981561875354, 10.1734681350627220772, 13.3236919363142230324,
    16.4706300508776328126, 19.6158585104682420211, 22.7600843805927718981, 25.9036720876183826255,
    29.0468285349168550666, 32.1896799109744036266, 35.3323075500838651026, 38.4747662347716151121,
    41.6170942128144508859, 44.7593189976528217328, 47.9014608871854471213, 51.0435351835715094687,
    54.1855536410613205316, 57.3275254379010107451, 60.4694578453474915593, 63.6113566984812326310,
};

// Relative error is meaningless at zeros; compare against the local envelope.
double envelope(double x, double value) {
  const double env = x > 0.0 ? std::min(1.0, std::sqrt(2.0 / (kPi * x))) : 1.0;
  return std::max(std::abs(value), env);
}

}  // namespace

TEST_CASE("bessel values match high-precision references") {
  for (const auto& r : kRef) {
    CAPTURE(r.x);
    CHECK(std::abs(bessel_j0(r.x) - r.j0) <= 1e-14 * envelope(r.x, r.j0));
    CHECK(std::abs(bessel_j1(r.x) - r.j1) <= 1e-14 * envelope(r.x, r.j1));
  }
}

TEST_CASE("bessel documented examples") {
  CHECK(bessel_j0(0.0) == 1.0);
  CHECK(bessel_j1(0.0) == 0.0);
  CHECK(bessel_j0(3.8317059702) == doctest::Approx(-0.4027593957).epsilon(1e-9));
  CHECK(std::abs(bessel_j0(2.4048255577)) < 1e-10);
  CHECK(std::abs(bessel_j1(3.8317059702)) < 1e-10);
  CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857).epsilon(1e-9));
}

TEST_CASE("bessel parity and domain") {
  testsupport::Gen gen(11);
  for (int i = 0; i < 200; ++i) {
    const double x = gen.uniform(0.0, 300.0);
    CHECK(bessel_j0(-x) == bessel_j0(x));
    CHECK(bessel_j1(-x) == -bessel_j1(x));
  }
  CHECK_THROWS_AS(bessel_j0(std::numeric_limits<double>::quiet_NaN()), std::domain_error);
  CHECK_THROWS_AS(bessel_j1(std::numeric_limits<double>::infinity()), std::domain_error);
}

// libstdc++'s cyl_bessel_j is only good to ~3e-12 of the envelope above
// x ~ 300 (checked against mpmath), so this is a coarse independent check;
// the tight one is the reference table above.
TEST_CASE("bessel agrees with the standard library special functions") {
  testsupport::Gen gen(12);
  for (int i = 0; i < 500; ++i) {
    const double x = gen.uniform(0.0, 500.0);
    CAPTURE(x);
    const double j0 = std::cyl_bessel_j(0.0, x);
    const double j1 = std::cyl_bessel_j(1.0, x);
    CHECK(std::abs(bessel_j0(x) - j0) <= 1e-11 * envelope(x, j0));
    CHECK(std::abs(bessel_j1(x) - j1) <= 1e-11 * envelope(x, j1));
  }
}

TEST_CASE("bessel derivative identities by central differences") {
  testsupport::Gen gen(13);
  const double h = 1e-5;
  for (int i = 0; i < 200; ++i) {
    const double x = gen.uniform(0.5, 200.0);
    CAPTURE(x);
    const double d0 = (bessel_j0(x + h) - bessel_j0(x - h)) / (2.0 * h);
    const double d1 = (bessel_j1(x + h) - bessel_j1(x - h)) / (2.0 * h);
    CHECK(std::abs(d0 + bessel_j1(x)) < 1e-9);
    CHECK(std::abs(d1 - (bessel_j0(x) - bessel_j1(x) / x)) < 1e-9);
  }
}

TEST_CASE("bessel is continuous across the evaluation crossovers") {
  for (double xc : {kSeriesLimit, kAsymptoticLimit}) {
    CAPTURE(xc);
    const double below = std::nextafter(xc, 0.0);
    const double above = std::nextafter(xc, 100.0);
    // Neighbouring doubles: any jump beyond slope * spacing is a seam.
    const double h = above - below;
    const double d0 = -bessel_j1(xc);
    const double d1 = bessel_j0(xc) - bessel_j1(xc) / xc;
    CHECK(std::abs(bessel_j0(above) - bessel_j0(below) - d0 * h) < 2e-16);
    CHECK(std::abs(bessel_j1(above) - bessel_j1(below) - d1 * h) < 2e-16);
    CHECK(std::abs(bessel_j0(xc) - std::cyl_bessel_j(0.0, xc)) < 1e-15);
    CHECK(std::abs(bessel_j1(xc) - std::cyl_bessel_j(1.0, xc)) < 1e-15);
  }
}

TEST_CASE("j1 roots match references") {
  const auto table = j1_roots(21);
  REQUIRE(table.count() == 21);
  CHECK(table[0] == 0.0);
  for (int n = 1; n <= 20; ++n) {
    CAPTURE(n);
    CHECK(std::abs(table[n] - kRoots[n - 1]) <= 1e-14 * kRoots[n - 1]);
    CHECK(std::abs(bessel_j1(table[n])) < 1e-12);
  }
}

TEST_CASE("j1 roots documented examples") {
  const auto one = j1_roots(1);
  REQUIRE(one.count() == 1);
  CHECK(one[0] == 0.0);
  const auto two = j1_roots(2);
  REQUIRE(two.count() == 2);
  CHECK(two[1] == doctest::Approx(3.8317059702).epsilon(1e-10));
  const auto four = j1_roots(4);
  REQUIRE(four.count() == 4);
  CHECK(four[2] == doctest::Approx(7.0155866698).epsilon(1e-10));
  CHECK(four[3] == doctest::Approx(10.1734681351).epsilon(1e-10));
  CHECK_THROWS_AS(j1_roots(0), std::invalid_argument);
}

TEST_CASE("j1 roots: ordering, asymptotic spacing and residuals for a large table") {
  const auto table = j1_roots(4096);
  for (std::size_t n = 1; n < table.count(); ++n) {
    CAPTURE(n);
    REQUIRE(table[n] > table[n - 1]);
    // McMahon: x_n ~ (n + 1/4) pi - 3 / (8 (n + 1/4) pi)
    const double beta = (static_cast<double>(n) + 0.25) * kPi;
    CHECK(std::abs(table[n] - (beta - 3.0 / (8.0 * beta))) < 0.02 / static_cast<double>(n));
    // |J1'| ~ envelope near a root, so this bounds the root error to a few ulp.
    const double ulp = std::nextafter(table[n], 1e300) - table[n];
    CHECK(std::abs(bessel_j1(table[n])) <= envelope(table[n], 0.0) * (4.0 * ulp + 1e-15));
  }
}

TEST_CASE("shared root table is consistent across threads and growth") {
  std::vector<std::shared_ptr<const BesselRootTable>> got(8);
  std::vector<std::thread> pool;
  for (int k = 0; k < 8; ++k) {
    pool.emplace_back([k, &got] { got[k] = shared_j1_roots(100 + 300 * k); });
  }
  for (auto& t : pool) t.join();
  const auto ref = j1_roots(2200);
  for (int k = 0; k < 8; ++k) {
    REQUIRE(got[k]->count() >= static_cast<std::size_t>(100 + 300 * k));
    for (std::size_t n = 0; n < static_cast<std::size_t>(100 + 300 * k); ++n) REQUIRE((*got[k])[n] == ref[n]);
  }
}
