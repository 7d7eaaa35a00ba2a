#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "metaduct/dense_lu.hpp"
#include "metaduct/modal_coupling.hpp"
#include "metaduct/transfer_matrix.hpp"
#include "metaduct/types.hpp"

namespace metaduct {

using Matrix8 = CMatrix<8>;
using Vector8 = CVector<8>;

// Which signs to use in rows 1, 7 and 8 of the 8x8 system.
//   Corrected: P(0) = M11 P(t) + M12 u(t) and the e^{+i omega t} layer relation
//              in the gap; these close the forward/inverse loop exactly.
//   Printed:   legacy pattern with M11 negated in row 1 and the gap layer
//              written for the opposite time convention. Kept for A/B runs;
//              it does not round-trip.
enum class SignConvention { Corrected, Printed };

// The annular air gap: n2 = 1, z2 = rho0 c0 / S3.
struct GapProperties {
  double n2 = 1.0;
  double z2 = 0.0;  // Pa s/m^3

  static GapProperties of(const DuctGeometry& geometry, const MediumProperties& medium);
};

// Averaged pressures (Pa) and volume velocities (m^3/s) on the sample (1)
// and gap (2) faces at x = 0 and x = t. Vector order matches the unknowns
// of the 8x8 system.
struct FieldState {
  cplx p1_0, p2_0, p1_t, p2_t;
  cplx u1_0, u2_0, u1_t, u2_t;

  [[nodiscard]] Vector8 to_vector() const { return {p1_0, p2_0, p1_t, p2_t, u1_0, u2_0, u1_t, u2_t}; }
  static FieldState from_vector(const Vector8& w) {
    return {w[0], w[1], w[2], w[3], w[4], w[5], w[6], w[7]};
  }
  [[nodiscard]] FieldState scaled(cplx s) const {
    return {s * p1_0, s * p2_0, s * p1_t, s * p2_t, s * u1_0, s * u2_0, s * u1_t, s * u2_t};
  }
};

struct LinearSystem {
  Matrix8 Q{};
  Vector8 Y{};
};

LinearSystem assemble_system(const TransferMatrix& m, const DuctGeometry& geometry,
                             const MediumProperties& medium, const GapProperties& gap,
                             const CouplingCoefficients& coupling, double f,
                             SignConvention signs = SignConvention::Corrected);

struct SolvedFields {
  FieldState fields;
  double condition = 0.0;  // 1-norm condition number of the row/column equilibrated Q
  double residual = 0.0;   // |Q W - Y| / |Y|
};

inline constexpr double kMaxCondition = 1e12;

// Dense LU with partial pivoting after row and column equilibration. Throws IllConditionedError (carrying f when
// given) for a singular Q or a condition number above max_condition.
SolvedFields solve_fields(const Matrix8& Q, const Vector8& Y, std::optional<double> f = std::nullopt,
                          double max_condition = kMaxCondition);

// z1 = sqrt((P1(0)^2 - P1(t)^2) / (U1(0)^2 - U1(t)^2)) on the Re(z1) >= 0
// branch (Im(z1) >= 0 when Re(z1) == 0). Empty when the denominator vanishes
// (half-wave resonance of the sample).
std::optional<cplx> impedance_from_fields(const FieldState& w);

// The arccos argument (P1(0)U1(0) + P1(t)U1(t)) / (P1(0)U1(t) + P1(t)U1(0)),
// i.e. cos(k0 n1 t). Empty when the denominator vanishes.
std::optional<cplx> index_cosine(const FieldState& w);

// n1 = (sign * acos(ratio) + 2 pi m) / (k0 t), principal complex arccos.
std::optional<cplx> index_from_fields(const FieldState& w, double k0, double t, int m, int sign);

// Bits in RetrievedProperties::flags.
enum RetrievalFlag : unsigned {
  kFlagDegenerate = 1u << 0,         // closed forms singular or system ill-conditioned here
  kFlagInterpolated = 1u << 1,       // values filled from neighbouring frequencies
  kFlagAboveCutoff = 1u << 2,        // higher duct modes propagate
  kFlagUnwrapUndetermined = 1u << 3, // single-point sweep: branch is the seed guess
};

struct RetrievedProperties {
  double f = 0.0;
  cplx n1;
  cplx z1;        // Pa s/m^3 (gap pipeline) or Pa s/m (full-fill baseline)
  int m = 0;      // arccos branch
  int sign = 1;   // sign in front of arccos
  double condition = 0.0;
  double residual = 0.0;
  double coupling_change = 0.0;
  unsigned flags = 0;

  [[nodiscard]] bool has(RetrievalFlag flag) const { return (flags & flag) != 0; }
};

struct RetrievalConfig {
  CouplingOptions coupling;
  int branch_seed = 0;  // m at the lowest frequency, taken with sign +1
  bool unwrap = true;   // false: every frequency uses the seed branch
  bool allow_above_cutoff = false;
  SignConvention signs = SignConvention::Corrected;
  double max_condition = kMaxCondition;
};

// Per-frequency retrieval followed by branch unwrapping: seed (m, +1) at the
// lowest frequency, then at each next frequency the (m, sign) closest to the
// previous index. Degenerate points are linearly interpolated and flagged.
std::vector<RetrievedProperties> retrieve_sweep(std::span<const ScatteringData> data,
                                                const DuctGeometry& geometry,
                                                const MediumProperties& medium,
                                                const RetrievalConfig& config = {});

// Full-fill baseline (sample fills the tube): n = (sign acos(M11) + 2 pi m)/(k0 t),
// zeta = sqrt(M12 / M21) as a specific impedance in Pa s/m.
RetrievedProperties classic_retrieve(const ScatteringData& data, double t,
                                     const MediumProperties& medium, int m = 0);

// Forward closure of the averaged model: replaces rows 1-2 of the retrieval
// system with a layer relation for the sample and reads T, R off the total
// volume velocities. Throws IllConditionedError for a singular system.
TransmissionReflection forward_averaged(cplx n1, cplx z1, const DuctGeometry& geometry,
                                        const MediumProperties& medium, const GapProperties& gap,
                                        const CouplingCoefficients& coupling, double f);

}  // namespace metaduct
