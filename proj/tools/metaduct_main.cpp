#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "metaduct/errors.hpp"
#include "metaduct/io/commands.hpp"
#include "metaduct/io/config.hpp"

using namespace metaduct;

namespace {

struct Flags {
  std::string config;
  std::string input;
  std::string output;
  std::string method;
  bool allow_above_cutoff = false;
  std::optional<int> branch_seed;
  std::optional<int> modes;
  std::optional<double> frequency;
  std::optional<int> threads;
  bool printed_signs = false;
  std::vector<std::string> sets;
  std::string field;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "config file with dotted keys");
  sub->add_option("--output", f.output, "output CSV (stdout when omitted)");
  sub->add_option("--modes", f.modes, "modal truncation N");
  sub->add_option("--set", f.sets, "override a config key: key=value (repeatable)");
}

void add_physics(CLI::App* sub, Flags& f) {
  sub->add_flag("--allow-above-cutoff", f.allow_above_cutoff, "accept frequencies above the first duct cutoff");
  sub->add_option("--branch-seed", f.branch_seed, "arccos branch m at the lowest frequency");
  sub->add_flag("--printed-signs", f.printed_signs, "use the legacy sign pattern in the 8x8 system");
  sub->add_option("--threads", f.threads, "oracle worker threads (0 = all cores)");
}

io::RunConfig build_config(const Flags& f) {
  io::RunConfig cfg;
  if (!f.config.empty()) io::apply_keys(cfg, io::load_config_file(f.config));
  io::KeyValues sets;
  for (const auto& s : f.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError("--set expects key=value, got '" + s + "'");
    const std::string text = s.substr(0, eq) + " = " + s.substr(eq + 1);
    for (auto& [k, v] : io::parse_config_text(text, "--set")) sets[k] = v;
  }
  io::apply_keys(cfg, sets);
  if (f.allow_above_cutoff) cfg.allow_above_cutoff = true;
  if (f.branch_seed) {
    cfg.branch_seed = *f.branch_seed;
  }
  if (f.modes) cfg.coupling.modes = *f.modes;
  if (f.frequency) cfg.query_frequency = *f.frequency;
  if (f.threads) cfg.threads = *f.threads;
  if (f.printed_signs) cfg.signs = SignConvention::Printed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Effective index and impedance of an undersized sample in an impedance tube"};
  app.require_subcommand(1);
  Flags f;

  auto* retrieve = app.add_subcommand("retrieve", "retrieve n1 and z1 from a T/R sweep file");
  add_common(retrieve, f);
  add_physics(retrieve, f);
  retrieve->add_option("--input", f.input, "T/R sweep CSV")->required();

  auto* forward = app.add_subcommand("forward", "simulate a T/R sweep for the configured material");
  add_common(forward, f);
  add_physics(forward, f);
  forward->add_option("--method", f.method, "fdfd | averaged")->check(CLI::IsMember({"fdfd", "averaged"}));
  forward->add_option("--field", f.field, "also dump the oracle pressure field (x, r, Re p, Im p)");
  forward->add_option("--frequency", f.frequency, "frequency of the --field dump");

  auto* roundtrip = app.add_subcommand("roundtrip", "forward then retrieve, report errors against the material");
  add_common(roundtrip, f);
  add_physics(roundtrip, f);
  roundtrip->add_option("--method", f.method, "fdfd | averaged (both when omitted)")
      ->check(CLI::IsMember({"fdfd", "averaged"}));

  auto* modes = app.add_subcommand("modes", "list duct modes and cutoffs");
  add_common(modes, f);
  modes->add_option("--frequency", f.frequency, "query frequency for the propagating/evanescent column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : io::kExitValidation;
  }

  io::CommandContext ctx;
  try {
    ctx.config = build_config(f);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return io::kExitValidation;
  }
  ctx.config_path = f.config;
  ctx.input = f.input;
  ctx.output = f.output;
  if (f.method == "fdfd") ctx.method = io::ForwardMethod::Fdfd;
  if (f.method == "averaged") ctx.method = io::ForwardMethod::Averaged;
  ctx.field_output = f.field;
  ctx.field_frequency = f.frequency;

  if (*retrieve) return io::cmd_retrieve(ctx);
  if (*forward) return io::cmd_forward(ctx);
  if (*roundtrip) return io::cmd_roundtrip(ctx);
  return io::cmd_modes(ctx);
}
