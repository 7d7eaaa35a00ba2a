#include "metaduct/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "metaduct/errors.hpp"

namespace metaduct::io {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, std::string_view v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end || !std::isfinite(out))
    throw ValidationError(key + ": expected a number, got '" + std::string(v) + "'");
  return out;
}

long long parse_int(const std::string& key, std::string_view v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end) throw ValidationError(key + ": expected an integer, got '" + std::string(v) + "'");
  return out;
}

int parse_int32(const std::string& key, std::string_view v) {
  const long long x = parse_int(key, v);
  if (x < -2147483647LL || x > 2147483647LL) throw ValidationError(key + ": value out of range");
  return static_cast<int>(x);
}

bool parse_bool(const std::string& key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ValidationError(key + ": expected true or false, got '" + std::string(v) + "'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct KeyDef {
  std::string name;
  std::function<void(RunConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<KeyDef>& key_table() {
  static const std::vector<KeyDef> table = [] {
    std::vector<KeyDef> t;
    const auto dbl = [&t](std::string name, double RunConfig::*field) {
      t.push_back({name, [field](RunConfig& c, const std::string& k, std::string_view v) { c.*field = parse_double(k, v); },
                   [field](const RunConfig& c) { return fmt(c.*field); }});
    };
    const auto num = [&t](std::string name, auto getter) {
      t.push_back({name,
                   [getter](RunConfig& c, const std::string& k, std::string_view v) { getter(c) = parse_double(k, v); },
                   [getter](const RunConfig& c) { return fmt(getter(const_cast<RunConfig&>(c))); }});
    };
    const auto integer = [&t](std::string name, auto getter) {
      t.push_back({name,
                   [getter](RunConfig& c, const std::string& k, std::string_view v) { getter(c) = parse_int32(k, v); },
                   [getter](const RunConfig& c) { return std::to_string(getter(const_cast<RunConfig&>(c))); }});
    };
    const auto boolean = [&t](std::string name, auto getter) {
      t.push_back({name,
                   [getter](RunConfig& c, const std::string& k, std::string_view v) { getter(c) = parse_bool(k, v); },
                   [getter](const RunConfig& c) {
                     return std::string(getter(const_cast<RunConfig&>(c)) ? "true" : "false");
                   }});
    };

    num("medium.rho0", [](RunConfig& c) -> double& { return c.medium.rho0; });
    num("medium.c0", [](RunConfig& c) -> double& { return c.medium.c0; });
    num("geometry.r1", [](RunConfig& c) -> double& { return c.geometry.r1; });
    num("geometry.r2", [](RunConfig& c) -> double& { return c.geometry.r2; });
    num("geometry.t", [](RunConfig& c) -> double& { return c.geometry.t; });

    const auto cpart = [&t](std::string name, cplx RunConfig::*field, bool imag) {
      t.push_back({name,
                   [field, imag](RunConfig& c, const std::string& k, std::string_view v) {
                     const double x = parse_double(k, v);
                     cplx& z = c.*field;
                     z = imag ? cplx(z.real(), x) : cplx(x, z.imag());
                     c.has_material = true;
                   },
                   [field, imag](const RunConfig& c) {
                     const cplx z = c.*field;
                     return fmt(imag ? z.imag() : z.real());
                   }});
    };
    cpart("material.n1", &RunConfig::n1, false);
    cpart("material.n1_imag", &RunConfig::n1, true);
    cpart("material.z1_over_z2", &RunConfig::z1_over_z2, false);
    cpart("material.z1_over_z2_imag", &RunConfig::z1_over_z2, true);

    integer("modal.modes", [](RunConfig& c) -> int& { return c.coupling.modes; });
    num("modal.tolerance", [](RunConfig& c) -> double& { return c.coupling.tolerance; });
    boolean("modal.check_convergence", [](RunConfig& c) -> bool& { return c.coupling.check_convergence; });

    t.push_back({"branch.strategy",
                 [](RunConfig& c, const std::string& k, std::string_view v) {
                   if (v == "auto") c.branch = BranchStrategy::Auto;
                   else if (v == "fixed") c.branch = BranchStrategy::Fixed;
                   else throw ValidationError(k + ": expected auto or fixed, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) { return std::string(c.branch == BranchStrategy::Auto ? "auto" : "fixed"); }});
    integer("branch.seed", [](RunConfig& c) -> int& { return c.branch_seed; });

    dbl("sweep.start", &RunConfig::sweep_start);
    dbl("sweep.stop", &RunConfig::sweep_stop);
    integer("sweep.count", [](RunConfig& c) -> int& { return c.sweep_count; });

    integer("oracle.radial_cells", [](RunConfig& c) -> int& { return c.oracle.radial_cells; });
    num("oracle.cells_per_wavelength", [](RunConfig& c) -> double& { return c.oracle.cells_per_wavelength; });
    integer("oracle.min_thickness_cells", [](RunConfig& c) -> int& { return c.oracle.min_thickness_cells; });
    integer("oracle.thickness_cells", [](RunConfig& c) -> int& { return c.oracle.thickness_cells; });
    num("oracle.axial_cell", [](RunConfig& c) -> double& { return c.oracle.axial_cell; });
    t.push_back({"oracle.termination",
                 [](RunConfig& c, const std::string& k, std::string_view v) {
                   if (v == "modal") c.oracle.termination = fdfd::Termination::Modal;
                   else if (v == "pml") c.oracle.termination = fdfd::Termination::Pml;
                   else throw ValidationError(k + ": expected modal or pml, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.oracle.termination == fdfd::Termination::Modal ? "modal" : "pml");
                 }});
    integer("oracle.pml_cells", [](RunConfig& c) -> int& { return c.oracle.pml_cells; });
    num("oracle.pml_strength", [](RunConfig& c) -> double& { return c.oracle.pml_strength; });
    num("oracle.mic_offset", [](RunConfig& c) -> double& { return c.oracle.mic_offset; });
    num("oracle.mic_spacing", [](RunConfig& c) -> double& { return c.oracle.mic_spacing; });
    boolean("oracle.sleeve", [](RunConfig& c) -> bool& { return c.oracle.sleeve; });
    integer("oracle.threads", [](RunConfig& c) -> int& { return c.threads; });
    t.push_back({"oracle.max_cells",
                 [](RunConfig& c, const std::string& k, std::string_view v) {
                   const long long x = parse_int(k, v);
                   if (x <= 0) throw ValidationError(k + ": must be positive");
                   c.oracle.max_cells = static_cast<std::size_t>(x);
                 },
                 [](const RunConfig& c) { return std::to_string(c.oracle.max_cells); }});

    t.push_back({"retrieval.signs",
                 [](RunConfig& c, const std::string& k, std::string_view v) {
                   if (v == "corrected") c.signs = SignConvention::Corrected;
                   else if (v == "printed") c.signs = SignConvention::Printed;
                   else throw ValidationError(k + ": expected corrected or printed, got '" + std::string(v) + "'");
                 },
                 [](const RunConfig& c) {
                   return std::string(c.signs == SignConvention::Corrected ? "corrected" : "printed");
                 }});
    boolean("retrieval.allow_above_cutoff", [](RunConfig& c) -> bool& { return c.allow_above_cutoff; });
    dbl("retrieval.max_condition", &RunConfig::max_condition);
    dbl("roundtrip.tolerance", &RunConfig::roundtrip_tolerance);
    t.push_back({"modes.query_frequency",
                 [](RunConfig& c, const std::string& k, std::string_view v) { c.query_frequency = parse_double(k, v); },
                 [](const RunConfig& c) { return c.query_frequency ? fmt(*c.query_frequency) : std::string{}; }});
    return t;
  }();
  return table;
}

}  // namespace

std::vector<double> RunConfig::frequencies() const {
  std::vector<double> f(static_cast<std::size_t>(std::max(sweep_count, 0)));
  for (int i = 0; i < sweep_count; ++i) {
    f[i] = sweep_count == 1 ? sweep_start
                            : sweep_start + (sweep_stop - sweep_start) * static_cast<double>(i) / (sweep_count - 1);
  }
  if (sweep_count > 1) f.back() = sweep_stop;
  return f;
}

RetrievalConfig RunConfig::retrieval() const {
  RetrievalConfig r;
  r.coupling = coupling;
  r.branch_seed = branch_seed;
  r.unwrap = branch == BranchStrategy::Auto;
  r.allow_above_cutoff = allow_above_cutoff;
  r.signs = signs;
  r.max_condition = max_condition;
  return r;
}

void RunConfig::validate() const {
  medium.validate();
  geometry.validate();
  if (coupling.modes < 1) throw ValidationError("modal.modes must be at least 1");
  if (!(coupling.tolerance > 0.0)) throw ValidationError("modal.tolerance must be positive");
  if (!(sweep_start > 0.0)) throw ValidationError("sweep.start must be positive");
  if (!(sweep_stop >= sweep_start)) throw ValidationError("sweep.stop must not be below sweep.start");
  if (sweep_count < 1) throw ValidationError("sweep.count must be at least 1");
  if (sweep_count > 1 && !(sweep_stop > sweep_start))
    throw ValidationError("sweep.stop must exceed sweep.start when sweep.count > 1");
  if (!(max_condition > 1.0)) throw ValidationError("retrieval.max_condition must exceed 1");
  if (!(roundtrip_tolerance > 0.0)) throw ValidationError("roundtrip.tolerance must be positive");
  if (threads < 0) throw ValidationError("oracle.threads must be >= 0");
  if (query_frequency && !(*query_frequency > 0.0)) throw ValidationError("modes.query_frequency must be positive");
  if (has_material && (n1 == cplx{0.0} || z1_over_z2 == cplx{0.0}))
    throw ValidationError("material.n1 and material.z1_over_z2 must be nonzero");
  oracle.validate();
}

KeyValues parse_config_text(std::string_view text, const std::string& source) {
  KeyValues out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ValidationError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ValidationError(where + ": missing key");
    if (value.empty()) throw ValidationError(where + ": missing value for " + key);
    const auto& keys = known_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) throw ValidationError(where + ": unknown key " + key);
    if (out.count(key)) throw ValidationError(where + ": duplicate key " + key);
    out[key] = value;
  }
  return out;
}

KeyValues load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path);
}

void apply_keys(RunConfig& cfg, const KeyValues& keys) {
  const auto& table = key_table();
  for (const auto& [k, v] : keys) {
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyDef& d) { return d.name == k; });
    if (it == table.end()) throw ValidationError("unknown key " + k);
    it->set(cfg, k, trim(v));
  }
}

KeyValues to_keys(const RunConfig& cfg) {
  KeyValues out;
  for (const auto& d : key_table()) {
    std::string v = d.get(cfg);
    if (!v.empty()) out[d.name] = std::move(v);
  }
  return out;
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : key_table()) n.push_back(d.name);
    return n;
  }();
  return names;
}

}  // namespace metaduct::io
