#include "metaduct/forward_oracle.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <limits>
#include <ostream>
#include <string>

#include "metaduct/errors.hpp"

namespace metaduct::fdfd {
namespace {

using SpMat = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int>;

std::string hz(double f) { return std::to_string(f) + " Hz"; }

bool finite(cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

int nearest_cell(double x, double dx) { return static_cast<int>(std::lround(x / dx - 0.5)); }

int pml_cells(const SceneOptions& o) { return o.termination == Termination::Pml ? o.pml_cells : 0; }

// Radial stiffness of one cross-section of air (rigid wall, regular axis),
// symmetrized with the cell weights w_j = r_j dr: B = W^-1/2 K W^-1/2.
struct RadialModes {
  Eigen::VectorXd mu;       // ascending, 1/m^2
  Eigen::MatrixXd psi;      // orthonormal columns
  Eigen::VectorXd weights;  // r_j dr
};

RadialModes radial_modes(const SimGrid& g) {
  const int nr = g.nr;
  Eigen::VectorXd w(nr);
  for (int j = 0; j < nr; ++j) w[j] = g.r_center(j) * g.dr;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(nr, nr);
  for (int j = 0; j + 1 < nr; ++j) {
    const double c = (j + 1) * g.dr / g.dr;
    k(j, j) += c;
    k(j + 1, j + 1) += c;
    k(j, j + 1) -= c;
    k(j + 1, j) -= c;
  }
  const Eigen::VectorXd wis = w.cwiseSqrt().cwiseInverse();
  const Eigen::MatrixXd b = wis.asDiagonal() * k * wis.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b);
  if (es.info() != Eigen::Success) throw NumericalError("radial eigenproblem failed");
  RadialModes out{es.eigenvalues().cwiseMax(0.0), es.eigenvectors(), w};
  // The plane mode is known exactly; do not leave it to the eigensolver.
  out.mu[0] = 0.0;
  Eigen::VectorXd plane = w.cwiseSqrt();
  plane /= plane.norm();
  if (out.psi.col(0).dot(plane) < 0.0) plane = -plane;
  out.psi.col(0) = plane;
  return out;
}

using ldc = std::complex<long double>;

// lambda - 1 for the outgoing per-mode multiplier q_{i+1} = lambda q_i, where
// lambda + 1/lambda = 2 - 4 s and s = dx^2 (k0^2 - mu) / 4. Written with
// half-angle forms so it stays accurate when s is tiny.
cplx outgoing_multiplier_minus_one(double s) {
  if (s > 0.0 && s < 1.0) {
    const double theta = 2.0 * std::asin(std::sqrt(s));
    return {-2.0 * s, -std::sin(theta)};
  }
  if (s <= 0.0) return std::expm1(-2.0 * std::asinh(std::sqrt(-s)));
  return -std::exp(-2.0 * std::acosh(std::sqrt(s))) - 1.0;
}

}  // namespace

MaterialSpec MaterialSpec::from_index_impedance(cplx n1, cplx z1, double area,
                                                const MediumProperties& medium) {
  medium.validate();
  if (!(area > 0.0)) throw ValidationError("material area must be positive");
  if (n1 == cplx{0.0} || z1 == cplx{0.0} || !finite(n1) || !finite(z1))
    throw ValidationError("material n1 and z1 must be finite and nonzero");
  MaterialSpec m;
  m.density = z1 * area * n1 / medium.c0;
  m.bulk_modulus = z1 * area * medium.c0 / n1;
  return m;
}

MaterialSpec MaterialSpec::air(const MediumProperties& medium) {
  medium.validate();
  MaterialSpec m;
  m.density = medium.rho0;
  m.bulk_modulus = medium.rho0 * medium.c0 * medium.c0;
  return m;
}

void MaterialSpec::validate() const {
  if (!finite(density) || !finite(bulk_modulus) || density == cplx{0.0} || bulk_modulus == cplx{0.0})
    throw ValidationError("material density and bulk modulus must be finite and nonzero");
}

void SceneOptions::validate() const {
  if (radial_cells < 4) throw ValidationError("oracle.radial_cells must be at least 4");
  if (!(radial_fit_tolerance > 0.0)) throw ValidationError("radial fit tolerance must be positive");
  if (!(cells_per_wavelength >= 4.0)) throw ValidationError("oracle.cells_per_wavelength must be at least 4");
  if (min_thickness_cells < 1) throw ValidationError("minimum thickness cells must be positive");
  if (axial_cell < 0.0) throw ValidationError("axial cell size must be >= 0");
  if (thickness_cells < 0) throw ValidationError("oracle.thickness_cells must be >= 0");
  if (termination == Termination::Pml && pml_cells < 1) throw ValidationError("oracle.pml_cells must be positive");
  if (!(pml_strength > 0.0)) throw ValidationError("PML strength must be positive");
  if (mic_offset < 0.0 || mic_spacing < 0.0) throw ValidationError("microphone offsets must be >= 0");
  if (source_gap_cells < 1 || end_cells < 1) throw ValidationError("source gap and end cells must be positive");
}

SimGrid build_scene(const DuctGeometry& geometry, const MediumProperties& medium, double f_max,
                    double max_index, const SceneOptions& options) {
  geometry.validate();
  medium.validate();
  options.validate();
  if (!(f_max > 0.0) || !std::isfinite(f_max)) throw ValidationError("maximum frequency must be positive");
  if (!(max_index > 0.0) || !std::isfinite(max_index)) throw ValidationError("maximum index must be positive");

  SimGrid g;
  g.geometry = geometry;
  g.options = options;
  g.direction = options.excite_downstream ? -1 : 1;

  if (options.full_fill) {
    g.nr = options.radial_cells;
    g.dr = geometry.r2 / g.nr;
    g.jr1 = g.nr;
  } else {
    bool fitted = false;
    for (int nr = options.radial_cells; nr <= 8 * options.radial_cells; ++nr) {
      const double dr = geometry.r2 / nr;
      const int jr1 = static_cast<int>(std::lround(geometry.r1 / dr));
      if (jr1 >= 1 && jr1 < nr && std::abs(jr1 * dr - geometry.r1) <= options.radial_fit_tolerance * geometry.r1) {
        g.nr = nr;
        g.dr = dr;
        g.jr1 = jr1;
        fitted = true;
        break;
      }
    }
    if (!fitted) throw ValidationError("no radial grid places r1 on a cell face; raise oracle.radial_cells");
  }

  const double lambda_min = medium.c0 / (f_max * std::max(1.0, max_index));
  if (options.axial_cell > 0.0) {
    g.nt = static_cast<int>(std::lround(geometry.t / options.axial_cell));
    if (g.nt < 1) throw ValidationError("sample thickness is smaller than one axial cell");
    if (std::abs(g.nt * options.axial_cell - geometry.t) > 5e-3 * geometry.t)
      throw ValidationError("sample thickness is not a whole number of axial cells (within 0.5%)");
  } else if (options.thickness_cells > 0) {
    g.nt = options.thickness_cells;
  } else {
    g.nt = std::max(options.min_thickness_cells,
                    static_cast<int>(std::ceil(geometry.t * options.cells_per_wavelength / lambda_min)));
  }
  g.dx = geometry.t / g.nt;
  if (g.dx > lambda_min / options.cells_per_wavelength * (1.0 + 1e-12)) {
    throw ValidationError("axial cell of " + std::to_string(g.dx) + " m resolves the shortest wavelength with fewer than " +
                          std::to_string(options.cells_per_wavelength) + " cells");
  }

  const double off = options.mic_offset > 0.0 ? options.mic_offset : geometry.r2;
  const double sp = options.mic_spacing > 0.0 ? options.mic_spacing : 0.5 * geometry.r2;
  const double t = geometry.t;
  std::array<double, 3> mx{};
  double xs = 0.0;
  if (g.direction > 0) {
    mx = {-(off + sp), -off, t + off};
    xs = mx[0] - options.source_gap_cells * g.dx;
  } else {
    mx = {t + off + sp, t + off, -off};
    xs = mx[0] + options.source_gap_cells * g.dx;
  }
  std::array<int, 3> k{};
  for (int m = 0; m < 3; ++m) k[m] = nearest_cell(mx[m], g.dx);
  const int ks = nearest_cell(xs, g.dx);
  if (k[0] == k[1]) throw ValidationError("microphones 1 and 2 fall in the same cell; increase oracle.mic_spacing");
  const auto outside = [&](int c) { return c < 0 || c >= g.nt; };
  if (!outside(k[0]) || !outside(k[1]) || !outside(k[2]))
    throw ValidationError("a microphone falls inside the sample; increase oracle.mic_offset");

  const int kmin = std::min({k[0], k[1], k[2], ks, 0});
  const int kmax = std::max({k[0], k[1], k[2], ks, g.nt - 1});
  const int lead = pml_cells(options) + options.end_cells;
  g.i0 = lead - kmin;
  g.nx = g.i0 + kmax + 1 + lead;
  for (int m = 0; m < 3; ++m) g.mic_cell[m] = g.i0 + k[m];
  g.source_cell = g.i0 + ks;

  if (g.unknowns() > options.max_cells) {
    throw ValidationError("oracle grid needs " + std::to_string(g.unknowns()) + " cells, above the limit of " +
                          std::to_string(options.max_cells));
  }
  return g;
}

double discrete_cutoff_hz(const SimGrid& grid, const MediumProperties& medium) {
  const RadialModes modes = radial_modes(grid);
  if (modes.mu.size() < 2) return std::numeric_limits<double>::infinity();
  return medium.c0 * std::sqrt(modes.mu[1]) / (2.0 * kPi);
}

double discrete_wavenumber(const SimGrid& grid, const MediumProperties& medium, double f) {
  const double half = 0.5 * medium.wavenumber(f) * grid.dx;
  if (half >= 1.0) throw ValidationError("axial grid too coarse for " + hz(f));
  return 2.0 * std::asin(half) / grid.dx;
}

HarmonicSolution solve_harmonic(const SimGrid& g, const MediumProperties& medium, const MaterialSpec& sample,
                                double f, bool keep_field) {
  medium.validate();
  sample.validate();
  if (!(f > 0.0) || !std::isfinite(f)) throw ValidationError("frequency must be positive");

  const double k0 = medium.wavenumber(f);
  const double ktilde = discrete_wavenumber(g, medium, f);

  PortRecord ports;
  ports.f = f;
  ports.axial_wavenumber = ktilde;
  ports.direction = g.direction;
  ports.incident_face_x = g.direction > 0 ? 0.0 : g.geometry.t;
  ports.exit_face_x = g.direction > 0 ? g.geometry.t : 0.0;
  for (int m = 0; m < 3; ++m) ports.mic_x[m] = g.x_center(g.mic_cell[m]);

  const double kd = ktilde * std::abs(ports.mic_x[1] - ports.mic_x[0]);
  const double nearest = std::round(kd / kPi) * kPi;
  if (std::abs(kd - nearest) < 0.05 * kPi) {
    throw ValidationError("microphone spacing is within 0.05 pi of a multiple of half a wavelength at " + hz(f));
  }

  const RadialModes modes = radial_modes(g);
  ports.above_cutoff = modes.mu.size() > 1 && k0 * k0 > modes.mu[1];

  const int nx = g.nx;
  const int nr = g.nr;
  const int npml = pml_cells(g.options);
  const bool pml = g.options.termination == Termination::Pml;

  // Assembled in long double: when k0 dx is small the axial stencil dwarfs
  // the mass term on the diagonal, and double rounding there shifts the
  // discrete wavenumber by ~1e-11, which the retrieval turns into Im(n1)
  // noise of order 1e-9 at the low end of a sweep. The double LU is used
  // as a preconditioner for iterative refinement against this operator.
  using ld = long double;
  const auto to_ld = [](cplx v) { return ldc(v.real(), v.imag()); };
  const ld dx = static_cast<ld>(g.geometry.t) / g.nt;
  const ld dr = static_cast<ld>(g.geometry.r2) / g.nr;
  const ld om = 2.0L * std::numbers::pi_v<ld> * f;
  const ld rho0 = medium.rho0;
  const ld kappa0 = static_cast<ld>(medium.rho0) * medium.c0 * medium.c0;
  const ldc rho1 = to_ld(sample.density);
  const ldc kappa1 = to_ld(sample.bulk_modulus);

  const auto in_sample = [&](int i, int j) { return i >= g.i0 && i < g.i0 + g.nt && j < g.jr1; };
  const auto rho = [&](int i, int j) { return in_sample(i, j) ? rho1 : ldc(rho0); };
  const auto kappa = [&](int i, int j) { return in_sample(i, j) ? kappa1 : ldc(kappa0); };

  // Coordinate stretch, evaluated at positions measured in cells from the
  // start of the grid.
  const ld sigma_max = static_cast<ld>(g.options.pml_strength) * medium.c0 / dx;
  const ld pml_len = npml * dx;
  const auto stretch = [&](ld cells) -> ldc {
    if (!pml) return 1.0L;
    ld d = 0.0L;
    if (cells < npml) d = (npml - cells) * dx;
    if (cells > nx - npml) d = (cells - (nx - npml)) * dx;
    if (d <= 0.0L) return 1.0L;
    const ld s = d / pml_len;
    return ldc{1.0L, -sigma_max * s * s / om};
  };

  const auto idx = [nr](int i, int j) { return i * nr + j; };
  std::vector<Eigen::Triplet<ldc, int>> trips;
  trips.reserve(static_cast<std::size_t>(nx) * nr * 5 + 2u * nr * nr);

  for (int i = 0; i < nx; ++i) {
    const ldc sc = stretch(i + 0.5L);
    const bool sample_row = i >= g.i0 && i < g.i0 + g.nt;
    for (int j = 0; j < nr; ++j) {
      const ld w = (j + 0.5L) * dr * dr;
      const int p = idx(i, j);
      ldc diag = sc * om * om / kappa(i, j) * w * dx;
      for (int ii : {i - 1, i + 1}) {
        if (ii < 0 || ii >= nx) continue;
        const ldc sf = stretch(static_cast<ld>(std::max(i, ii)));
        const ldc inv_rho = 2.0L / (rho(i, j) + rho(ii, j));
        const ldc c = w * inv_rho / (sf * dx);
        trips.emplace_back(p, idx(ii, j), c);
        diag -= c;
      }
      for (int jj : {j - 1, j + 1}) {
        if (jj < 0 || jj >= nr) continue;
        const int face = std::max(j, jj);
        if (g.options.sleeve && !g.options.full_fill && sample_row && face == g.jr1) continue;
        const ldc inv_rho = 2.0L / (rho(i, j) + rho(i, jj));
        const ldc c = sc * static_cast<ld>(face) * dx * inv_rho;
        trips.emplace_back(p, idx(i, jj), c);
        diag -= c;
      }
      trips.emplace_back(p, p, diag);
    }
  }

  if (!pml) {
    // Exact discrete radiation condition, mode by mode, on the uniform air
    // duct beyond each end. With p_outside = W^-1/2 Psi Lambda Psi^T W^1/2 p_edge
    // the edge row gains W^1/2 Psi (Lambda - 1) Psi^T W^1/2 / (rho0 dx).
    Eigen::VectorXcd lm1(nr);
    for (int m = 0; m < nr; ++m) lm1[m] = outgoing_multiplier_minus_one(0.25 * g.dx * g.dx * (k0 * k0 - modes.mu[m]));
    const Eigen::MatrixXcd psi = modes.psi.cast<cplx>();
    const Eigen::MatrixXcd inner = psi * lm1.asDiagonal() * psi.transpose();
    for (int edge : {0, nx - 1}) {
      for (int j = 0; j < nr; ++j) {
        for (int kk = 0; kk < nr; ++kk) {
          // Symmetrize so rounding cannot introduce a non-reciprocal part.
          const cplx v = 0.5 * (inner(j, kk) + inner(kk, j));
          const ld wjk = std::sqrt(static_cast<ld>(modes.weights[j]) * modes.weights[kk]);
          trips.emplace_back(idx(edge, j), idx(edge, kk), to_ld(v) * wjk / (rho0 * dx));
        }
      }
    }
  }

  const int n = nx * nr;
  using SpLd = Eigen::SparseMatrix<ldc, Eigen::ColMajor, int>;
  SpLd a_ld(n, n);
  a_ld.setFromTriplets(trips.begin(), trips.end());
  trips.clear();
  trips.shrink_to_fit();
  a_ld.makeCompressed();
  const SpMat a = a_ld.unaryExpr([](const ldc& v) { return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag())); });

  std::vector<ldc> b(static_cast<std::size_t>(n));
  long double bnorm2 = 0.0L;
  for (int j = 0; j < nr; ++j) {
    b[idx(g.source_cell, j)] = (j + 0.5L) * dr * dr * dx;
    bnorm2 += std::norm(b[idx(g.source_cell, j)]);
  }

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(a);
  lu.factorize(a);
  if (lu.info() != Eigen::Success) throw NumericalError("sparse factorization failed at " + hz(f), f);

  std::vector<ldc> xl(static_cast<std::size_t>(n));
  Eigen::VectorXcd r(n);
  const auto residual_ld = [&]() {
    std::vector<ldc> acc(b);
    for (int col = 0; col < a_ld.outerSize(); ++col) {
      for (SpLd::InnerIterator it(a_ld, col); it; ++it) acc[it.row()] -= it.value() * xl[col];
    }
    long double nr2 = 0.0L;
    for (int q = 0; q < n; ++q) {
      r[q] = cplx(static_cast<double>(acc[q].real()), static_cast<double>(acc[q].imag()));
      nr2 += std::norm(acc[q]);
    }
    return static_cast<double>(std::sqrt(nr2 / bnorm2));
  };
  double res = residual_ld();
  for (int pass = 0; pass < 6 && res > 1e-17; ++pass) {
    const Eigen::VectorXcd d = lu.solve(r);
    if (lu.info() != Eigen::Success) throw NumericalError("sparse solve failed at " + hz(f), f);
    for (int q = 0; q < n; ++q) xl[q] += to_ld(d[q]);
    const double next = residual_ld();
    if (pass > 0 && next > 0.5 * res) {
      res = next;
      break;
    }
    res = next;
  }

  HarmonicSolution out;
  out.residual = res;
  if (!(out.residual <= kMaxOracleResidual)) {
    char msg[64];
    std::snprintf(msg, sizeof msg, "oracle residual %.3e too large at ", out.residual);
    throw NumericalError(msg + hz(f), f);
  }

  long double wsum = 0.0L;
  for (int j = 0; j < nr; ++j) wsum += modes.weights[j];
  for (int m = 0; m < 3; ++m) {
    ldc acc = 0.0L;
    for (int j = 0; j < nr; ++j) acc += static_cast<long double>(modes.weights[j]) * xl[idx(g.mic_cell[m], j)];
    ports.pressure[m] = cplx(static_cast<double>(acc.real() / wsum), static_cast<double>(acc.imag() / wsum));
  }
  out.ports = ports;
  if (keep_field) {
    FieldSnapshot snap;
    snap.grid = g;
    snap.pressure.resize(static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) snap.pressure[q] = cplx(static_cast<double>(xl[q].real()), static_cast<double>(xl[q].imag()));
    out.field = std::move(snap);
  }
  return out;
}

ScatteringData scattering_from_ports(const PortRecord& ports) {
  const double k = ports.axial_wavenumber;
  if (!(k > 0.0)) throw ValidationError("port record has no wavenumber");
  const double dir = ports.direction >= 0 ? 1.0 : -1.0;
  const double xi1 = dir * (ports.mic_x[0] - ports.incident_face_x);
  const double xi2 = dir * (ports.mic_x[1] - ports.incident_face_x);
  const double xi3 = dir * (ports.mic_x[2] - ports.incident_face_x);
  const double t = std::abs(ports.exit_face_x - ports.incident_face_x);

  const double kd = k * std::abs(xi2 - xi1);
  if (std::abs(kd - std::round(kd / kPi) * kPi) < 0.05 * kPi) {
    throw ValidationError("microphone spacing is within 0.05 pi of a multiple of half a wavelength at " +
                          hz(ports.f));
  }
  const cplx e1m = std::exp(-kI * k * xi1), e1p = std::exp(kI * k * xi1);
  const cplx e2m = std::exp(-kI * k * xi2), e2p = std::exp(kI * k * xi2);
  const cplx det = e1m * e2p - e1p * e2m;
  const cplx pplus = (ports.pressure[0] * e2p - e1p * ports.pressure[1]) / det;
  const cplx pminus = (e1m * ports.pressure[1] - e2m * ports.pressure[0]) / det;
  if (pplus == cplx{0.0}) throw NumericalError("no incident wave at " + hz(ports.f), ports.f);

  ScatteringData d;
  d.f = ports.f;
  d.R = pminus / pplus;
  d.T = ports.pressure[2] * std::exp(kI * k * (xi3 - t)) / pplus;
  return d;
}

void write_field_csv(std::ostream& out, const FieldSnapshot& field) {
  const SimGrid& g = field.grid;
  out << "x_m,r_m,p_re,p_im\n";
  char buf[128];
  for (int i = 0; i < g.nx; ++i) {
    for (int j = 0; j < g.nr; ++j) {
      const cplx v = field.pressure[static_cast<std::size_t>(i) * g.nr + j];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", g.x_center(i), g.r_center(j), v.real(), v.imag());
      out << buf;
    }
  }
}

}  // namespace metaduct::fdfd
