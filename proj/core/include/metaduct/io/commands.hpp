#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaduct/io/config.hpp"

namespace metaduct::io {

enum ExitCode : int { kExitOk = 0, kExitValidation = 1, kExitNumerical = 2 };

enum class ForwardMethod { Fdfd, Averaged };

struct CommandContext {
  RunConfig config;
  std::string config_path;  // recorded in the metadata sidecar only
  std::string input;
  std::string output;                  // empty -> stdout, no sidecar
  std::optional<ForwardMethod> method; // roundtrip runs both when unset
  std::string field_output;            // forward --field: pressure raster at field_frequency
  std::optional<double> field_frequency;
  std::ostream* out = nullptr;
  std::ostream* err = nullptr;
};

int cmd_retrieve(const CommandContext& ctx);
int cmd_forward(const CommandContext& ctx);
int cmd_roundtrip(const CommandContext& ctx);
int cmd_modes(const CommandContext& ctx);

// Building blocks shared with the tests and benchmarks.
double analytic_cutoff_hz(const RunConfig& cfg);
std::vector<ScatteringData> forward_sweep_averaged(const RunConfig& cfg, std::span<const double> freqs);
// One independent oracle solve per frequency, spread over cfg.threads
// workers. On failure rethrows the error of the lowest failing frequency.
std::vector<ScatteringData> forward_sweep_fdfd(const RunConfig& cfg, std::span<const double> freqs);

struct RoundTripSummary {
  std::vector<double> err_n;  // |Re n1 - Re n1_true| / |Re n1_true|, unflagged rows
  std::vector<double> err_z;  // ||z1/z2| - |z1/z2|_true| / |z1/z2|_true, unflagged rows
  double median_n = 0.0, max_n = 0.0, median_z = 0.0, max_z = 0.0;
  std::size_t excluded = 0;
  [[nodiscard]] bool within(double tol) const {
    return median_n <= tol && median_z <= tol && max_n <= 2.0 * tol && max_z <= 2.0 * tol;
  }
};

RoundTripSummary summarize_roundtrip(std::span<const RetrievedProperties> results, cplx n1_true,
                                     cplx z1_over_z2_true, double z2);

double median(std::vector<double> v);

}  // namespace metaduct::io
