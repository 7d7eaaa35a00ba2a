#include "metaduct/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "metaduct/errors.hpp"

namespace metaduct {
namespace {

constexpr double kDegenerateTol = 1e-9;

std::string hz(double f) { return std::to_string(f) + " Hz"; }

// sign in {+1,-1} for the arccos term when no continuity reference exists:
// +1, unless the phase is purely imaginary (evanescent band), where the sign
// is picked so the index is passive (Im(n) <= 0 under e^{+i omega t}).
int seed_sign(cplx acos_value) {
  if (std::abs(acos_value.real()) > 1e-12 * std::max(1.0, std::abs(acos_value))) return 1;
  return acos_value.imag() <= 0.0 ? 1 : -1;
}

cplx principal_sqrt_passive(cplx v) {
  cplx s = std::sqrt(v);
  if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0)) s = -s;
  return s;
}

struct PointResult {
  bool valid = false;
  cplx acos_value;
  cplx z1;
  double k0 = 0.0;
  double condition = 0.0;
  double residual = 0.0;
  double coupling_change = 0.0;
  bool above_cutoff = false;
};

}  // namespace

GapProperties GapProperties::of(const DuctGeometry& geometry, const MediumProperties& medium) {
  geometry.validate();
  return {1.0, medium.alpha() / geometry.gap_area()};
}

LinearSystem assemble_system(const TransferMatrix& m, const DuctGeometry& geometry,
                             const MediumProperties& medium, const GapProperties& gap,
                             const CouplingCoefficients& c, double f, SignConvention signs) {
  geometry.validate();
  medium.validate();
  if (!(f > 0.0)) throw ValidationError("assemble_system: frequency must be positive");
  if (c.frequency != 0.0 && std::abs(c.frequency - f) > 1e-9 * f) {
    throw ValidationError("assemble_system: coupling coefficients were computed at " + hz(c.frequency) +
                          ", system requested at " + hz(f));
  }
  const double s1 = geometry.sample_area();
  const double s2 = geometry.duct_area();
  const double s3 = geometry.gap_area();
  const double phase = medium.wavenumber(f) * gap.n2 * geometry.t;
  const double cs = std::cos(phase);
  const double sn = std::sin(phase);
  const double z2 = gap.z2;
  const bool printed = signs == SignConvention::Printed;
  const double m11_sign = printed ? -1.0 : 1.0;

  LinearSystem sys;
  auto& q = sys.Q;
  q[0] = {-s1 / s2, -s3 / s2, m11_sign * m.m11 * s1 / s2, m11_sign * m.m11 * s3 / s2,
          0.0, 0.0, m.m12 / s2, m.m12 / s2};
  q[1] = {0.0, 0.0, m.m21 * s1 / s2, m.m21 * s3 / s2, -1.0 / s2, -1.0 / s2, m.m22 / s2, m.m22 / s2};
  q[2] = {1.0, 0.0, 0.0, 0.0, -c.A, -c.B, 0.0, 0.0};
  q[3] = {0.0, 1.0, 0.0, 0.0, -c.C, -c.D, 0.0, 0.0};
  q[4] = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -c.E, -c.F};
  q[5] = {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -c.G, -c.H};
  if (printed) {
    q[6] = {0.0, 1.0, 0.0, -cs, 0.0, 0.0, 0.0, kI * z2 * sn};
    q[7] = {0.0, 0.0, 0.0, kI / z2 * sn, 0.0, 1.0, 0.0, cs};
  } else {
    q[6] = {0.0, 1.0, 0.0, -cs, 0.0, 0.0, 0.0, -kI * z2 * sn};
    q[7] = {0.0, 0.0, 0.0, -kI / z2 * sn, 0.0, 1.0, 0.0, -cs};
  }
  sys.Y = {0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0};
  return sys;
}

SolvedFields solve_fields(const Matrix8& Q, const Vector8& Y, std::optional<double> f,
                          double max_condition) {
  // Rows and columns mix pascals and volume velocities; equilibrate so the
  // factorization and the reported condition number are unit-free.
  std::array<double, 8> rs{};
  std::array<double, 8> cs{};
  Matrix8 a = Q;
  for (std::size_t i = 0; i < 8; ++i) {
    double big = 0.0;
    for (std::size_t j = 0; j < 8; ++j) big = std::max(big, std::abs(a[i][j]));
    rs[i] = big > 0.0 ? 1.0 / big : 1.0;
    for (std::size_t j = 0; j < 8; ++j) a[i][j] *= rs[i];
  }
  for (std::size_t j = 0; j < 8; ++j) {
    double big = 0.0;
    for (std::size_t i = 0; i < 8; ++i) big = std::max(big, std::abs(a[i][j]));
    cs[j] = big > 0.0 ? 1.0 / big : 1.0;
    for (std::size_t i = 0; i < 8; ++i) a[i][j] *= cs[j];
  }

  DenseLu<8> lu;
  const std::string where = f ? " at f = " + hz(*f) : std::string{};
  if (!lu.factor(a)) {
    throw IllConditionedError("singular 8x8 system" + where,
                              std::numeric_limits<double>::infinity(), f);
  }
  const double condition = norm1(a) * norm1(lu.inverse());
  if (!std::isfinite(condition) || condition > max_condition) {
    throw IllConditionedError("ill-conditioned 8x8 system" + where + " (cond = " +
                                  std::to_string(condition) + ")",
                              condition, f);
  }
  Vector8 b{};
  for (std::size_t i = 0; i < 8; ++i) b[i] = rs[i] * Y[i];
  Vector8 w = lu.solve(b);
  for (std::size_t j = 0; j < 8; ++j) w[j] *= cs[j];
  Vector8 r = multiply(Q, w);
  for (std::size_t i = 0; i < 8; ++i) r[i] -= Y[i];
  const double ynorm = norm2(Y);
  return {FieldState::from_vector(w), condition, ynorm > 0.0 ? norm2(r) / ynorm : norm2(r)};
}

std::optional<cplx> impedance_from_fields(const FieldState& w) {
  const cplx den = w.u1_0 * w.u1_0 - w.u1_t * w.u1_t;
  const double scale = std::norm(w.u1_0) + std::norm(w.u1_t);
  if (!(scale > 0.0) || std::abs(den) <= kDegenerateTol * scale) return std::nullopt;
  const cplx num = w.p1_0 * w.p1_0 - w.p1_t * w.p1_t;
  return principal_sqrt_passive(num / den);
}

std::optional<cplx> index_cosine(const FieldState& w) {
  const cplx den = w.p1_0 * w.u1_t + w.p1_t * w.u1_0;
  const double scale = std::abs(w.p1_0 * w.u1_t) + std::abs(w.p1_t * w.u1_0);
  if (!(scale > 0.0) || std::abs(den) <= kDegenerateTol * scale) return std::nullopt;
  return (w.p1_0 * w.u1_0 + w.p1_t * w.u1_t) / den;
}

std::optional<cplx> index_from_fields(const FieldState& w, double k0, double t, int m, int sign) {
  if (!(k0 > 0.0) || !(t > 0.0)) throw ValidationError("index_from_fields: k0 and t must be positive");
  if (sign != 1 && sign != -1) throw ValidationError("index_from_fields: sign must be +1 or -1");
  const auto ratio = index_cosine(w);
  if (!ratio) return std::nullopt;
  return (static_cast<double>(sign) * std::acos(*ratio) + 2.0 * kPi * m) / (k0 * t);
}

std::vector<RetrievedProperties> retrieve_sweep(std::span<const ScatteringData> data,
                                                const DuctGeometry& geometry,
                                                const MediumProperties& medium,
                                                const RetrievalConfig& config) {
  geometry.validate();
  medium.validate();
  if (data.empty()) throw ValidationError("retrieve_sweep: empty sweep");
  for (std::size_t i = 0; i < data.size(); ++i) {
    data[i].validate();
    if (i > 0 && !(data[i].f > data[i - 1].f)) {
      throw ValidationError("retrieve_sweep: frequencies must be strictly increasing (row " +
                            std::to_string(i + 1) + ", f = " + hz(data[i].f) + ")");
    }
  }

  const ModalBasis basis(geometry, config.coupling.modes);
  const double cutoff = basis.first_cutoff_hz(medium);
  if (!config.allow_above_cutoff) {
    for (const auto& d : data) {
      if (d.f >= cutoff) {
        throw ValidationError("frequency " + hz(d.f) + " is above the first duct cutoff " + hz(cutoff) +
                              " (pass --allow-above-cutoff to override)");
      }
    }
  }

  const GapProperties gap = GapProperties::of(geometry, medium);
  const double t = geometry.t;
  std::vector<PointResult> points(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const ScatteringData& d = data[i];
    PointResult& p = points[i];
    p.k0 = medium.wavenumber(d.f);
    p.above_cutoff = d.f >= cutoff;
    const TransferMatrix m = transfer_matrix_from_tr(d, medium);
    const CouplingCoefficients coup = coupling_coefficients(basis, medium, d.f, config.coupling);
    p.coupling_change = coup.relative_change;
    const LinearSystem sys = assemble_system(m, geometry, medium, gap, coup, d.f, config.signs);
    SolvedFields solved;
    try {
      solved = solve_fields(sys.Q, sys.Y, d.f, config.max_condition);
    } catch (const IllConditionedError& e) {
      p.condition = e.condition();
      continue;
    }
    p.condition = solved.condition;
    p.residual = solved.residual;
    const auto z = impedance_from_fields(solved.fields);
    const auto ratio = index_cosine(solved.fields);
    if (!z || !ratio) continue;
    p.z1 = *z;
    p.acos_value = std::acos(*ratio);
    p.valid = std::isfinite(std::abs(p.z1)) && std::isfinite(std::abs(p.acos_value));
  }

  std::vector<RetrievedProperties> out(data.size());
  std::optional<std::size_t> last_valid;
  std::size_t valid_count = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const PointResult& p = points[i];
    RetrievedProperties& r = out[i];
    r.f = data[i].f;
    r.condition = p.condition;
    r.residual = p.residual;
    r.coupling_change = p.coupling_change;
    if (p.above_cutoff) r.flags |= kFlagAboveCutoff;
    if (!p.valid) {
      r.flags |= kFlagDegenerate;
      continue;
    }
    ++valid_count;
    const double kt = p.k0 * t;
    r.z1 = p.z1;
    if (!last_valid || !config.unwrap) {
      r.m = config.branch_seed;
      r.sign = seed_sign(p.acos_value);
      r.n1 = (static_cast<double>(r.sign) * p.acos_value + 2.0 * kPi * r.m) / kt;
    } else {
      const cplx target = out[*last_valid].n1 * kt;
      double best = std::numeric_limits<double>::infinity();
      for (int sign : {1, -1}) {
        const cplx base = static_cast<double>(sign) * p.acos_value;
        const int m = static_cast<int>(std::lround((target - base).real() / (2.0 * kPi)));
        const cplx n = (base + 2.0 * kPi * m) / kt;
        const double dist = std::abs(n - out[*last_valid].n1);
        if (dist < best) {
          best = dist;
          r.n1 = n;
          r.m = m;
          r.sign = sign;
        }
      }
    }
    last_valid = i;
  }

  if (valid_count == 0) {
    throw NumericalError("retrieve_sweep: every frequency is degenerate (first at " + hz(data.front().f) + ")",
                         data.front().f);
  }
  if (data.size() == 1) out.front().flags |= kFlagUnwrapUndetermined;

  // Fill degenerate points from the nearest valid neighbours.
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!out[i].has(kFlagDegenerate)) continue;
    std::optional<std::size_t> lo;
    std::optional<std::size_t> hi;
    for (std::size_t j = i; j-- > 0;) {
      if (!out[j].has(kFlagDegenerate)) {
        lo = j;
        break;
      }
    }
    for (std::size_t j = i + 1; j < out.size(); ++j) {
      if (!out[j].has(kFlagDegenerate)) {
        hi = j;
        break;
      }
    }
    RetrievedProperties& r = out[i];
    if (lo && hi) {
      const double w = (r.f - out[*lo].f) / (out[*hi].f - out[*lo].f);
      r.n1 = (1.0 - w) * out[*lo].n1 + w * out[*hi].n1;
      r.z1 = (1.0 - w) * out[*lo].z1 + w * out[*hi].z1;
      r.m = out[*lo].m;
      r.sign = out[*lo].sign;
    } else {
      const RetrievedProperties& src = lo ? out[*lo] : out[*hi];
      r.n1 = src.n1;
      r.z1 = src.z1;
      r.m = src.m;
      r.sign = src.sign;
    }
    r.flags |= kFlagInterpolated;
  }
  return out;
}

RetrievedProperties classic_retrieve(const ScatteringData& data, double t,
                                     const MediumProperties& medium, int m) {
  medium.validate();
  if (!(t > 0.0)) throw ValidationError("classic_retrieve: thickness must be positive");
  const TransferMatrix tm = transfer_matrix_from_tr(data, medium);
  const double kt = medium.wavenumber(data.f) * t;
  const cplx a = std::acos(tm.m11);
  RetrievedProperties r;
  r.f = data.f;
  r.m = m;
  r.sign = seed_sign(a);
  r.n1 = (static_cast<double>(r.sign) * a + 2.0 * kPi * m) / kt;
  if (tm.m21 == cplx{0.0}) {
    r.flags |= kFlagDegenerate;
    r.z1 = cplx{medium.alpha()};
  } else {
    r.z1 = principal_sqrt_passive(tm.m12 / tm.m21);
  }
  return r;
}

TransmissionReflection forward_averaged(cplx n1, cplx z1, const DuctGeometry& geometry,
                                        const MediumProperties& medium, const GapProperties& gap,
                                        const CouplingCoefficients& c, double f) {
  geometry.validate();
  medium.validate();
  if (!(f > 0.0)) throw ValidationError("forward_averaged: frequency must be positive");
  if (z1 == cplx{0.0}) throw ValidationError("forward_averaged: z1 must be nonzero");
  const double k0 = medium.wavenumber(f);
  const double t = geometry.t;
  const cplx ph1 = k0 * n1 * t;
  const cplx c1 = std::cos(ph1);
  const cplx s1 = std::sin(ph1);
  const double ph2 = k0 * gap.n2 * t;
  const double c2 = std::cos(ph2);
  const double s2 = std::sin(ph2);
  const double z2 = gap.z2;

  Matrix8 q{};
  q[0] = {1.0, 0.0, -c1, 0.0, 0.0, 0.0, -kI * z1 * s1, 0.0};
  q[1] = {0.0, 0.0, -kI / z1 * s1, 0.0, 1.0, 0.0, -c1, 0.0};
  q[2] = {1.0, 0.0, 0.0, 0.0, -c.A, -c.B, 0.0, 0.0};
  q[3] = {0.0, 1.0, 0.0, 0.0, -c.C, -c.D, 0.0, 0.0};
  q[4] = {0.0, 0.0, 1.0, 0.0, 0.0, 0.0, -c.E, -c.F};
  q[5] = {0.0, 0.0, 0.0, 1.0, 0.0, 0.0, -c.G, -c.H};
  q[6] = {0.0, 1.0, 0.0, -c2, 0.0, 0.0, 0.0, -kI * z2 * s2};
  q[7] = {0.0, 0.0, 0.0, -kI / z2 * s2, 0.0, 1.0, 0.0, -c2};
  const Vector8 y{0.0, 0.0, 2.0, 2.0, 0.0, 0.0, 0.0, 0.0};

  const SolvedFields solved = solve_fields(q, y, f);
  const FieldState& w = solved.fields;
  const double alpha = medium.alpha();
  const double s_duct = geometry.duct_area();
  return {alpha * (w.u1_t + w.u2_t) / s_duct, 1.0 - alpha * (w.u1_0 + w.u2_0) / s_duct};
}

}  // namespace metaduct
