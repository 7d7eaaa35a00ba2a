#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaduct/forward_oracle.hpp"
#include "metaduct/retrieval.hpp"
#include "metaduct/types.hpp"

namespace metaduct::io {

enum class BranchStrategy { Auto, Fixed };

// Everything a run needs. Built from flat dotted keys; see known_keys().
struct RunConfig {
  MediumProperties medium;
  DuctGeometry geometry;

  bool has_material = false;
  cplx n1{1.0};
  cplx z1_over_z2{1.0};

  CouplingOptions coupling;
  BranchStrategy branch = BranchStrategy::Auto;
  int branch_seed = 0;
  SignConvention signs = SignConvention::Corrected;
  bool allow_above_cutoff = false;
  double max_condition = kMaxCondition;

  double sweep_start = 300.0;
  double sweep_stop = 2500.0;
  int sweep_count = 45;

  fdfd::SceneOptions oracle;
  int threads = 0;  // 0 -> hardware concurrency

  double roundtrip_tolerance = 0.01;
  std::optional<double> query_frequency;

  [[nodiscard]] std::vector<double> frequencies() const;
  [[nodiscard]] GapProperties gap() const { return GapProperties::of(geometry, medium); }
  // z1 in Pa s/m^3.
  [[nodiscard]] cplx z1() const { return z1_over_z2 * gap().z2; }
  [[nodiscard]] RetrievalConfig retrieval() const;

  // Throws ValidationError naming the offending key.
  void validate() const;
};

using KeyValues = std::map<std::string, std::string, std::less<>>;

// "key = value" lines; '#' starts a comment; blank lines ignored. Errors
// carry source:line.
KeyValues parse_config_text(std::string_view text, const std::string& source = "config");
KeyValues load_config_file(const std::string& path);

// Applies keys in order over cfg. Unknown keys and bad values throw.
void apply_keys(RunConfig& cfg, const KeyValues& keys);

// Canonical "key = value" listing of cfg (all known keys).
KeyValues to_keys(const RunConfig& cfg);

const std::vector<std::string>& known_keys();

}  // namespace metaduct::io
