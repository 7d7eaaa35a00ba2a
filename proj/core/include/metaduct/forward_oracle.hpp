#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <vector>

#include "metaduct/types.hpp"

// Axisymmetric finite-volume Helmholtz solver for the impedance tube. It is
// deliberately independent of the modal-coupling and retrieval code: it only
// shares the plain data types.
namespace metaduct::fdfd {

// Homogeneous fluid standing in for the sample.
struct MaterialSpec {
  cplx density{1.21};        // kg/m^3
  cplx bulk_modulus{1.21 * 343.0 * 343.0};  // Pa

  // Effective fluid with index n1 and acoustic impedance z1 (Pa s/m^3)
  // over cross-section area: rho = z1 S n1 / c0, kappa = z1 S c0 / n1.
  static MaterialSpec from_index_impedance(cplx n1, cplx z1, double area, const MediumProperties& medium);
  static MaterialSpec air(const MediumProperties& medium);

  void validate() const;
};

enum class Termination { Modal, Pml };

struct SceneOptions {
  int radial_cells = 70;               // minimum; raised until r1 sits on a face
  double radial_fit_tolerance = 5e-3;  // allowed relative misfit of r1
  double cells_per_wavelength = 20.0;  // in the sample, at the highest frequency
  int min_thickness_cells = 16;
  int thickness_cells = 0;             // > 0 overrides the automatic count
  double axial_cell = 0.0;             // > 0 fixes dx (m); t must be a whole number of cells
  Termination termination = Termination::Modal;
  int pml_cells = 20;
  double pml_strength = 1.0;           // sigma_max dx / c0
  double mic_offset = 0.0;             // mic 2 and mic 3 distance from the sample; 0 -> r2
  double mic_spacing = 0.0;            // mic 1 to mic 2; 0 -> r2 / 2
  int source_gap_cells = 4;            // source plane behind mic 1
  int end_cells = 4;                   // air cells between outermost feature and termination
  bool sleeve = true;                  // rigid zero-thickness sleeve at r1 over the sample
  bool full_fill = false;              // sample fills the whole cross-section
  bool excite_downstream = false;      // mirror source and mics
  std::size_t max_cells = 4'000'000;

  void validate() const;
};

// Finished grid layout. Cell (i, j) covers x in [(i - i0) dx, (i - i0 + 1) dx],
// r in [j dr, (j + 1) dr]; the sample occupies cells i0 <= i < i0 + nt.
struct SimGrid {
  DuctGeometry geometry;
  SceneOptions options;
  int nx = 0;
  int nr = 0;
  int i0 = 0;
  int nt = 0;
  int jr1 = 0;  // sample cells are j < jr1
  double dx = 0.0;
  double dr = 0.0;
  std::array<int, 3> mic_cell{};
  int source_cell = 0;
  int direction = 1;  // +1 when the incident wave travels towards +x

  [[nodiscard]] double x_center(int i) const { return (i - i0 + 0.5) * dx; }
  [[nodiscard]] double r_center(int j) const { return (j + 0.5) * dr; }
  [[nodiscard]] std::size_t unknowns() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(nr);
  }
};

// Lays out the grid for a sweep up to f_max with a sample index of modulus
// up to max_index. Throws ValidationError for impossible layouts.
SimGrid build_scene(const DuctGeometry& geometry, const MediumProperties& medium, double f_max,
                    double max_index, const SceneOptions& options = {});

// Lowest non-planar cutoff of the discretized air duct.
double discrete_cutoff_hz(const SimGrid& grid, const MediumProperties& medium);

// Plane-wave wavenumber of the discretized air duct, acos(1 - (k0 dx)^2 / 2) / dx.
double discrete_wavenumber(const SimGrid& grid, const MediumProperties& medium, double f);

// Raw virtual-microphone readings (area-averaged pressure at cell-centre planes).
struct PortRecord {
  double f = 0.0;
  double axial_wavenumber = 0.0;  // wavenumber used to separate the waves
  std::array<double, 3> mic_x{};  // mic 1, mic 2 upstream; mic 3 downstream
  std::array<cplx, 3> pressure{};
  double incident_face_x = 0.0;
  double exit_face_x = 0.0;
  int direction = 1;
  bool above_cutoff = false;
};

struct FieldSnapshot {
  SimGrid grid;
  std::vector<cplx> pressure;  // row-major, index i * nr + j
};

struct HarmonicSolution {
  PortRecord ports;
  double residual = 0.0;  // |A p - b| / |b|
  std::optional<FieldSnapshot> field;
};

inline constexpr double kMaxOracleResidual = 1e-9;

// Solves one frequency. Throws ValidationError for an unusable microphone
// spacing and NumericalError when the sparse solve fails or its residual
// exceeds kMaxOracleResidual.
HarmonicSolution solve_harmonic(const SimGrid& grid, const MediumProperties& medium,
                                const MaterialSpec& sample, double f, bool keep_field = false);

// Two-microphone wave separation: T referenced to the exit face, R to the
// incident face.
ScatteringData scattering_from_ports(const PortRecord& ports);

// x, r, Re p, Im p per cell.
void write_field_csv(std::ostream& out, const FieldSnapshot& field);

}  // namespace metaduct::fdfd
