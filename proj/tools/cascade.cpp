#include <CLI11.hpp>

#include <iostream>

#include "cascade/commands.hpp"
#include "cascade/config.hpp"

namespace {

struct Options {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
};

int run(const std::string& name, const Options& o) {
  using namespace cascade;
  try {
    RunConfig cfg = o.config.empty() ? RunConfig{} : RunConfig::load(o.config);
    for (const auto& a : o.overrides) cfg.apply_override(a);
    if (!o.out.empty()) cfg.general.out_dir = o.out;
    const CommandResult r = run_command(name, cfg);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
    for (const auto& f : r.failures) std::cerr << "check failed: " << f << "\n";
    std::cout << name << ": " << (r.exit_code == kExitOk ? "PASS" : "FAIL") << " (" << r.files.size()
              << " files in " << cfg.general.out_dir << ")\n";
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hilbert cascade experiments"};
  app.set_version_flag("--version", CASCADE_VERSION);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> commands{
      {"coeffs", "exact expansion coefficients and their parity and growth checks"},
      {"ode", "coefficient ODE systems and their bands"},
      {"growth", "L^p growth of the model function or of the solver output"},
      {"solve", "grid solver snapshots and norms"},
      {"compare", "truncated series against the grid solver"},
      {"verify", "consistency checks of every component"}};
  Options opts;
  std::string chosen;
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "INI file; defaults are used when omitted")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory (overrides general.out_dir)");
    sub->add_option("--override", opts.overrides, "section.key=value, repeatable");
    sub->callback([&chosen, n = name] { chosen = n; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cascade::kExitUsage;
  }
  return run(chosen, opts);
}
