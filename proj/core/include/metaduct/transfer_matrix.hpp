#pragma once

#include "metaduct/types.hpp"

namespace metaduct {

// [P(0); u(0)] = M [P(t); u(t)] with P the area-averaged pressure and u the
// mean particle velocity. m11, m22 dimensionless; m12 in Pa s/m; m21 in m/(Pa s).
struct TransferMatrix {
  cplx m11{1.0};
  cplx m12{0.0};
  cplx m21{0.0};
  cplx m22{1.0};

  [[nodiscard]] cplx det() const { return m11 * m22 - m12 * m21; }

  // Homogeneous layer of index n, specific impedance zeta, thickness t.
  static TransferMatrix layer(cplx n, cplx zeta, double k0, double t);
};

struct TransmissionReflection {
  cplx T;
  cplx R;
};

// Symmetric reciprocal matrix (m11 = m22, det = 1) reproducing the measured
// T and R. Throws SingularMeasurementError when T == 0.
TransferMatrix transfer_matrix_from_tr(const ScatteringData& data, const MediumProperties& medium);

// T = 2 / (m11 + m12/alpha + alpha m21 + m22), R likewise.
// Throws DegenerateSampleError for a vanishing denominator.
TransmissionReflection tr_from_transfer_matrix(const TransferMatrix& m, const MediumProperties& medium);

}  // namespace metaduct
