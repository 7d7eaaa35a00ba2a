#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "metaduct/errors.hpp"
#include "metaduct/transfer_matrix.hpp"

using namespace metaduct;

namespace {

const MediumProperties kAir{};

// Direct evaluation of the forward relations, written out independently.
TransmissionReflection forward(const TransferMatrix& m, double a) {
  const cplx den = m.m11 + m.m12 / a + a * m.m21 + m.m22;
  return {2.0 / den, (m.m11 + m.m12 / a - a * m.m21 - m.m22) / den};
}

double mdiff(const TransferMatrix& x, const TransferMatrix& y, double a) {
  return std::max({std::abs(x.m11 - y.m11), std::abs(x.m12 - y.m12) / a, std::abs(x.m21 - y.m21) * a,
                   std::abs(x.m22 - y.m22)});
}

double mscale(const TransferMatrix& x, double a) {
  return std::max({std::abs(x.m11), std::abs(x.m12) / a, std::abs(x.m21) * a, std::abs(x.m22), 1.0});
}

}  // namespace

TEST_CASE("transparent sample gives the identity") {
  const auto m = transfer_matrix_from_tr({500.0, 1.0, 0.0}, kAir);
  CHECK(std::abs(m.m11 - 1.0) < 1e-15);
  CHECK(std::abs(m.m22 - 1.0) < 1e-15);
  CHECK(std::abs(m.m12) < 1e-15 * kAir.alpha());
  CHECK(std::abs(m.m21) < 1e-15 / kAir.alpha());
}

TEST_CASE("matched phase-only sample") {
  const double th = 0.7;
  const double a = kAir.alpha();
  const auto m = transfer_matrix_from_tr({500.0, std::exp(-kI * th), 0.0}, kAir);
  CHECK(std::abs(m.m11 - std::cos(th)) < 1e-14);
  CHECK(std::abs(m.m22 - std::cos(th)) < 1e-14);
  CHECK(std::abs(m.m12 - kI * a * std::sin(th)) < 1e-14 * a);
  CHECK(std::abs(m.m21 - kI / a * std::sin(th)) < 1e-14 / a);
  const auto tr = forward(m, a);
  CHECK(std::abs(tr.T - std::exp(-kI * th)) < 1e-14);
  CHECK(std::abs(tr.R) < 1e-14);
}

TEST_CASE("random symmetric unimodular matrices survive the round trip") {
  testsupport::Gen gen(31);
  const double a = kAir.alpha();
  int checked = 0;
  for (int i = 0; i < 200; ++i) {
    TransferMatrix m;
    m.m11 = m.m22 = gen.complex_in_box(3.0);
    m.m12 = a * gen.complex_polar(0.1, 10.0);
    m.m21 = (m.m11 * m.m22 - 1.0) / m.m12;
    const cplx den = m.m11 + m.m12 / a + a * m.m21 + m.m22;
    if (std::abs(den) < 1e-3) continue;
    const auto tr = tr_from_transfer_matrix(m, kAir);
    const auto back = transfer_matrix_from_tr({1000.0, tr.T, tr.R}, kAir);
    CHECK(mdiff(back, m, a) <= 1e-12 * mscale(m, a));
    ++checked;
  }
  CHECK(checked > 150);
}

TEST_CASE("recovered matrix reproduces T and R and keeps both constraints") {
  testsupport::Gen gen(32);
  const double a = kAir.alpha();
  for (int i = 0; i < 100; ++i) {
    const cplx T = gen.complex_polar(1e-2, 1.0);
    const cplx R = gen.complex_polar(1e-3, 1.0);
    const auto m = transfer_matrix_from_tr({800.0, T, R}, kAir);
    const double s = mscale(m, a);
    CAPTURE(T);
    CAPTURE(R);
    CHECK(std::abs(m.m11 - m.m22) <= 1e-10 * s);
    CHECK(std::abs(m.det() - 1.0) <= 1e-10 * s * s);
    const auto tr = forward(m, a);
    CHECK(std::abs(tr.T - T) <= 1e-12 * s * std::abs(T) + 1e-12 * std::abs(T));
    CHECK(std::abs(tr.R - R) <= 1e-12 * s * std::abs(T) + 1e-12);
  }
}

TEST_CASE("forward relations: documented examples") {
  const double a = kAir.alpha();
  const auto id = tr_from_transfer_matrix(TransferMatrix{}, kAir);
  CHECK(id.T == cplx(1.0, 0.0));
  CHECK(id.R == cplx(0.0, 0.0));

  const double k0 = kAir.wavenumber(1234.0);
  const auto slab = tr_from_transfer_matrix(TransferMatrix::layer(1.0, a, k0, 0.013), kAir);
  CHECK(std::abs(std::abs(slab.T) - 1.0) < 1e-14);
  CHECK(std::abs(slab.R) < 1e-14);
  CHECK(std::abs(slab.T - std::exp(-kI * k0 * 0.013)) < 1e-14);

  // Quarter-wave: den = 0 + i + i + 0 = 2i, T = 2/(2i) = -i, R = (i - i)/(2i) = 0.
  TransferMatrix q;
  q.m11 = q.m22 = 0.0;
  q.m12 = kI * a;
  q.m21 = kI / a;
  const auto qw = tr_from_transfer_matrix(q, kAir);
  CHECK(std::abs(qw.T - cplx(0.0, -1.0)) < 1e-15);
  CHECK(std::abs(qw.R) < 1e-15);
}

TEST_CASE("layer matrix is symmetric and unimodular") {
  testsupport::Gen gen(33);
  for (int i = 0; i < 50; ++i) {
    const double tan_d = gen.uniform(0.0, 0.3);
    const cplx n = testsupport::Gen::lossy_index(gen.uniform(0.5, 10.0), tan_d);
    const cplx z = testsupport::Gen::lossy_impedance(kAir.alpha() * gen.log_uniform(0.1, 10.0), tan_d);
    const auto m = TransferMatrix::layer(n, z, kAir.wavenumber(gen.uniform(100.0, 3000.0)), gen.uniform(0.001, 0.05));
    CHECK(m.m11 == m.m22);
    CHECK(std::abs(m.det() - 1.0) < 1e-12 * std::norm(m.m11));
  }
}

TEST_CASE("passive layer is passive") {
  testsupport::Gen gen(34);
  for (int i = 0; i < 50; ++i) {
    const auto d = gen.layer_tr(kAir, gen.uniform(100.0, 3000.0));
    CHECK(std::norm(d.T) + std::norm(d.R) <= 1.0 + 1e-12);
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(transfer_matrix_from_tr({500.0, 0.0, 0.3}, kAir), SingularMeasurementError);
  CHECK_THROWS_AS(transfer_matrix_from_tr({500.0, {NAN, 0.0}, 0.3}, kAir), ValidationError);
  TransferMatrix dead;
  dead.m11 = dead.m22 = 0.0;
  dead.m12 = kI * kAir.alpha();
  dead.m21 = -kI / kAir.alpha();
  CHECK_THROWS_AS(tr_from_transfer_matrix(dead, kAir), DegenerateSampleError);
}
