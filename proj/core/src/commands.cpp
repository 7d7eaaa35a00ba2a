#include "metaduct/io/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <thread>

#include <nlohmann/json.hpp>

#include "metaduct/errors.hpp"
#include "metaduct/io/sweep_io.hpp"
#include "metaduct/modal_coupling.hpp"

namespace metaduct::io {
namespace {

using Clock = std::chrono::steady_clock;

std::ostream& out_of(const CommandContext& c) { return c.out ? *c.out : std::cout; }
std::ostream& err_of(const CommandContext& c) { return c.err ? *c.err : std::cerr; }

std::string hz(double f) { return format_double(f) + " Hz"; }

void warn(const CommandContext& c, std::vector<std::string>& log, const std::string& msg) {
  err_of(c) << "warning: " << msg << '\n';
  log.push_back(msg);
}

template <class Fn>
int guarded(const CommandContext& c, Fn&& fn) {
  try {
    return fn();
  } catch (const ValidationError& e) {
    err_of(c) << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const NumericalError& e) {
    err_of(c) << "error: " << e.what();
    if (e.frequency()) err_of(c) << " (first failing frequency " << hz(*e.frequency()) << ")";
    err_of(c) << '\n';
    return kExitNumerical;
  } catch (const std::invalid_argument& e) {
    err_of(c) << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err_of(c) << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
}

void emit(const CommandContext& c, const CsvTable& table) {
  if (c.output.empty()) {
    write_csv(out_of(c), table);
  } else {
    write_csv_file(c.output, table);
  }
}

void write_sidecar(const CommandContext& c, const std::string& command, double elapsed,
                   const std::vector<std::string>& warnings, nlohmann::json extra = nlohmann::json::object()) {
  if (c.output.empty()) return;
  nlohmann::json j;
  j["command"] = command;
  j["config_file"] = c.config_path;
  j["input"] = c.input;
  j["output"] = c.output;
  nlohmann::json keys = nlohmann::json::object();
  for (const auto& [k, v] : to_keys(c.config)) keys[k] = v;
  j["config"] = keys;
  j["elapsed_seconds"] = elapsed;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  j["finished_utc"] = stamp;
  j["warnings"] = warnings;
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  std::ofstream f(c.output + ".meta.json");
  if (!f) throw ValidationError("cannot write " + c.output + ".meta.json");
  f << j.dump(2) << '\n';
}

void require_material(const RunConfig& cfg) {
  if (!cfg.has_material) throw ValidationError("config has no material (set material.n1 and material.z1_over_z2)");
}

void check_cutoff(const RunConfig& cfg, std::span<const double> freqs) {
  if (cfg.allow_above_cutoff) return;
  const double fc = analytic_cutoff_hz(cfg);
  for (double f : freqs) {
    if (f >= fc) {
      throw ValidationError("frequency " + hz(f) + " is above the first duct cutoff " + hz(fc) +
                            " (pass --allow-above-cutoff to override)");
    }
  }
}

std::vector<std::string> geometry_comments(const RunConfig& cfg) {
  return {"r1 = " + format_double(cfg.geometry.r1) + " m, r2 = " + format_double(cfg.geometry.r2) +
              " m, t = " + format_double(cfg.geometry.t) + " m",
          "rho0 = " + format_double(cfg.medium.rho0) + " kg/m^3, c0 = " + format_double(cfg.medium.c0) + " m/s"};
}

const char* method_name(ForwardMethod m) { return m == ForwardMethod::Fdfd ? "fdfd" : "averaged"; }

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double analytic_cutoff_hz(const RunConfig& cfg) {
  return ModalBasis(cfg.geometry, 2).first_cutoff_hz(cfg.medium);
}

std::vector<ScatteringData> forward_sweep_averaged(const RunConfig& cfg, std::span<const double> freqs) {
  cfg.validate();
  require_material(cfg);
  const ModalBasis basis(cfg.geometry, cfg.coupling.modes);
  const GapProperties gap = cfg.gap();
  std::vector<ScatteringData> out;
  out.reserve(freqs.size());
  for (double f : freqs) {
    const auto c = coupling_coefficients(basis, cfg.medium, f, cfg.coupling);
    const auto tr = forward_averaged(cfg.n1, cfg.z1(), cfg.geometry, cfg.medium, gap, c, f);
    out.push_back({f, tr.T, tr.R});
  }
  return out;
}

std::vector<ScatteringData> forward_sweep_fdfd(const RunConfig& cfg, std::span<const double> freqs) {
  cfg.validate();
  require_material(cfg);
  if (freqs.empty()) return {};
  const double fmax = *std::max_element(freqs.begin(), freqs.end());
  const fdfd::SimGrid grid = fdfd::build_scene(cfg.geometry, cfg.medium, fmax, std::abs(cfg.n1), cfg.oracle);
  const auto material =
      fdfd::MaterialSpec::from_index_impedance(cfg.n1, cfg.z1(), cfg.geometry.sample_area(), cfg.medium);

  std::vector<ScatteringData> out(freqs.size());
  std::vector<std::exception_ptr> errors(freqs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < freqs.size(); i = next++) {
      try {
        const auto sol = fdfd::solve_harmonic(grid, cfg.medium, material, freqs[i]);
        out[i] = fdfd::scattering_from_ports(sol.ports);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  unsigned n = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads) : std::thread::hardware_concurrency();
  n = std::clamp<unsigned>(n, 1u, static_cast<unsigned>(freqs.size()));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < n; ++k) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

RoundTripSummary summarize_roundtrip(std::span<const RetrievedProperties> results, cplx n1_true,
                                     cplx z1_over_z2_true, double z2) {
  RoundTripSummary s;
  const double n_ref = std::abs(n1_true.real());
  const double z_ref = std::abs(z1_over_z2_true);
  for (const auto& r : results) {
    if (r.has(kFlagDegenerate) || r.has(kFlagInterpolated)) {
      ++s.excluded;
      continue;
    }
    s.err_n.push_back(std::abs(r.n1.real() - n1_true.real()) / n_ref);
    s.err_z.push_back(std::abs(std::abs(r.z1 / z2) - z_ref) / z_ref);
  }
  s.median_n = median(s.err_n);
  s.median_z = median(s.err_z);
  s.max_n = s.err_n.empty() ? 0.0 : *std::max_element(s.err_n.begin(), s.err_n.end());
  s.max_z = s.err_z.empty() ? 0.0 : *std::max_element(s.err_z.begin(), s.err_z.end());
  return s;
}

int cmd_retrieve(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto t0 = Clock::now();
    const RunConfig& cfg = ctx.config;
    cfg.validate();
    if (ctx.input.empty()) throw ValidationError("retrieve needs --input");
    const auto sweep = sweep_from_table(read_csv_file(ctx.input), ctx.input);
    const auto results = retrieve_sweep(sweep, cfg.geometry, cfg.medium, cfg.retrieval());

    std::vector<std::string> warnings;
    if (results.size() == 1)
      warn(ctx, warnings, "single-frequency input: unwrapping undetermined, branch m = " +
                              std::to_string(cfg.branch_seed) + " assumed");
    std::size_t interp = 0, above = 0;
    for (const auto& r : results) {
      interp += r.has(kFlagInterpolated) ? 1 : 0;
      above += r.has(kFlagAboveCutoff) ? 1 : 0;
    }
    if (interp)
      warn(ctx, warnings, std::to_string(interp) + " degenerate frequencies filled by interpolation (flagged)");
    if (above) warn(ctx, warnings, std::to_string(above) + " frequencies above the first duct cutoff");

    auto comments = geometry_comments(cfg);
    comments.push_back("z2 = " + format_double(cfg.gap().z2) + " Pa s/m^3");
    for (const auto& w : warnings) comments.push_back("warning: " + w);
    emit(ctx, results_to_table(results, cfg.gap().z2, comments));
    write_sidecar(ctx, "retrieve", std::chrono::duration<double>(Clock::now() - t0).count(), warnings);
    return static_cast<int>(kExitOk);
  });
}

int cmd_forward(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto t0 = Clock::now();
    const RunConfig& cfg = ctx.config;
    cfg.validate();
    require_material(cfg);
    const ForwardMethod method = ctx.method.value_or(ForwardMethod::Fdfd);
    const auto freqs = cfg.frequencies();
    check_cutoff(cfg, freqs);
    const auto sweep = method == ForwardMethod::Fdfd ? forward_sweep_fdfd(cfg, freqs) : forward_sweep_averaged(cfg, freqs);

    if (!ctx.field_output.empty()) {
      if (method != ForwardMethod::Fdfd) throw ValidationError("--field needs --method fdfd");
      const double f = ctx.field_frequency.value_or(freqs.front());
      const auto grid = fdfd::build_scene(cfg.geometry, cfg.medium, std::max(f, freqs.back()), std::abs(cfg.n1), cfg.oracle);
      const auto mat = fdfd::MaterialSpec::from_index_impedance(cfg.n1, cfg.z1(), cfg.geometry.sample_area(), cfg.medium);
      const auto sol = fdfd::solve_harmonic(grid, cfg.medium, mat, f, true);
      std::ofstream fo(ctx.field_output);
      if (!fo) throw ValidationError("cannot write " + ctx.field_output);
      fdfd::write_field_csv(fo, *sol.field);
    }

    auto comments = geometry_comments(cfg);
    comments.push_back(std::string("method = ") + method_name(method));
    comments.push_back("n1 = " + format_double(cfg.n1.real()) + " + " + format_double(cfg.n1.imag()) +
                       "i, z1/z2 = " + format_double(cfg.z1_over_z2.real()) + " + " +
                       format_double(cfg.z1_over_z2.imag()) + "i");
    emit(ctx, sweep_to_table(sweep, comments));
    write_sidecar(ctx, "forward", std::chrono::duration<double>(Clock::now() - t0).count(), {},
                  {{"method", method_name(method)}});
    return static_cast<int>(kExitOk);
  });
}

int cmd_roundtrip(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const auto t0 = Clock::now();
    const RunConfig& cfg = ctx.config;
    cfg.validate();
    require_material(cfg);
    const auto freqs = cfg.frequencies();
    check_cutoff(cfg, freqs);
    std::vector<ForwardMethod> methods;
    if (ctx.method) methods.push_back(*ctx.method);
    else methods = {ForwardMethod::Averaged, ForwardMethod::Fdfd};

    const double z2 = cfg.gap().z2;
    CsvTable table;
    table.header = {"method", "f_hz", "n1_re", "n1_im", "abs_z1_over_z2", "err_n1", "err_z1", "flags"};
    table.comments = geometry_comments(cfg);
    table.comments.push_back("tolerance = " + format_double(cfg.roundtrip_tolerance) +
                             " (median), " + format_double(2.0 * cfg.roundtrip_tolerance) + " (max)");
    bool ok = true;
    nlohmann::json summary = nlohmann::json::object();
    for (ForwardMethod m : methods) {
      const auto sweep = m == ForwardMethod::Fdfd ? forward_sweep_fdfd(cfg, freqs) : forward_sweep_averaged(cfg, freqs);
      const auto results = retrieve_sweep(sweep, cfg.geometry, cfg.medium, cfg.retrieval());
      const auto s = summarize_roundtrip(results, cfg.n1, cfg.z1_over_z2, z2);
      for (const auto& r : results) {
        const double en = std::abs(r.n1.real() - cfg.n1.real()) / std::abs(cfg.n1.real());
        const double ez = std::abs(std::abs(r.z1 / z2) - std::abs(cfg.z1_over_z2)) / std::abs(cfg.z1_over_z2);
        table.rows.push_back({method_name(m), format_double(r.f), format_double(r.n1.real()), format_double(r.n1.imag()),
                              format_double(std::abs(r.z1 / z2)), format_double(en), format_double(ez),
                              flags_to_string(r.flags)});
      }
      const bool pass = s.within(cfg.roundtrip_tolerance);
      ok = ok && pass;
      char line[256];
      std::snprintf(line, sizeof line,
                    "%s: n1 error median %.3e max %.3e; |z1/z2| error median %.3e max %.3e; %zu excluded; %s",
                    method_name(m), s.median_n, s.max_n, s.median_z, s.max_z, s.excluded, pass ? "PASS" : "FAIL");
      table.comments.emplace_back(line);
      err_of(ctx) << line << '\n';
      summary[method_name(m)] = {{"median_n", s.median_n}, {"max_n", s.max_n}, {"median_z", s.median_z},
                                 {"max_z", s.max_z},       {"excluded", s.excluded}, {"pass", pass}};
    }
    emit(ctx, table);
    write_sidecar(ctx, "roundtrip", std::chrono::duration<double>(Clock::now() - t0).count(), {},
                  {{"summary", summary}});
    return static_cast<int>(ok ? kExitOk : kExitValidation);
  });
}

int cmd_modes(const CommandContext& ctx) {
  return guarded(ctx, [&] {
    const RunConfig& cfg = ctx.config;
    cfg.medium.validate();
    cfg.geometry.validate();
    if (cfg.coupling.modes < 1) throw ValidationError("modal.modes must be at least 1");
    const ModalBasis basis(cfg.geometry, cfg.coupling.modes);
    const double fq = cfg.query_frequency.value_or(cfg.sweep_stop);
    const double k0 = cfg.medium.wavenumber(fq);
    CsvTable t;
    t.comments = {"modes N = " + std::to_string(basis.size()) + ", r2 = " + format_double(cfg.geometry.r2) + " m",
                  "first cutoff = " + hz(basis.first_cutoff_hz(cfg.medium)),
                  "status at query frequency " + hz(fq)};
    t.header = {"n", "x_n", "k_n", "cutoff_hz", "status"};
    for (int n = 0; n < basis.size(); ++n) {
      const double kn = basis.wavenumber(n);
      const double fc = kn * cfg.medium.c0 / (2.0 * kPi);
      t.rows.push_back({std::to_string(n), format_double(basis.root(n)), format_double(kn), format_double(fc),
                        kn < k0 ? "propagating" : "evanescent"});
    }
    emit(ctx, t);
    return static_cast<int>(kExitOk);
  });
}

}  // namespace metaduct::io
