#include "metaduct/transfer_matrix.hpp"

#include <string>

#include "metaduct/errors.hpp"

namespace metaduct {

TransferMatrix TransferMatrix::layer(cplx n, cplx zeta, double k0, double t) {
  const cplx phase = k0 * n * t;
  const cplx c = std::cos(phase);
  const cplx s = std::sin(phase);
  return {c, kI * zeta * s, kI * s / zeta, c};
}

TransferMatrix transfer_matrix_from_tr(const ScatteringData& data, const MediumProperties& medium) {
  data.validate();
  const cplx T = data.T;
  const cplx R = data.R;
  if (T == cplx{0.0}) {
    throw SingularMeasurementError("T = 0 at f = " + std::to_string(data.f) + " Hz", data.f);
  }
  // With u = m12/alpha and v = alpha m21, the forward formulas read
  // 1 + R = T (m11 + u), 1 - R = T (m11 + v); det = 1 then fixes m11.
  const double alpha = medium.alpha();
  const cplx diag = (1.0 - R * R + T * T) / (2.0 * T);
  const cplx u = (1.0 + R) / T - diag;
  const cplx v = (1.0 - R) / T - diag;
  TransferMatrix m{diag, alpha * u, v / alpha, diag};
  if (!std::isfinite(std::abs(m.m11)) || !std::isfinite(std::abs(m.m12)) ||
      !std::isfinite(std::abs(m.m21))) {
    throw SingularMeasurementError("transfer matrix overflow at f = " + std::to_string(data.f) + " Hz",
                                   data.f);
  }
  return m;
}

TransmissionReflection tr_from_transfer_matrix(const TransferMatrix& m, const MediumProperties& medium) {
  const double alpha = medium.alpha();
  const cplx den = m.m11 + m.m12 / alpha + alpha * m.m21 + m.m22;
  if (den == cplx{0.0}) throw DegenerateSampleError("T/R denominator vanishes");
  return {2.0 / den, (m.m11 + m.m12 / alpha - alpha * m.m21 - m.m22) / den};
}

}  // namespace metaduct
