#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "slowshift/csv.hpp"
#include "slowshift/error.hpp"
#include "slowshift/scenario.hpp"

namespace fs = std::filesystem;
using namespace slowshift;

namespace {

// Exit codes by failure category.
constexpr int kExitOther = 1;
constexpr int kExitParse = 2;
constexpr int kExitPrecondition = 3;
constexpr int kExitNumerical = 4;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return kExitParse;
    case ErrorKind::NumericalFailure: return kExitNumerical;
    case ErrorKind::Io: return kExitOther;
    default: return kExitPrecondition;
  }
}

// A path to an existing file is read as a config; otherwise the name of a
// builtin scenario.
ScenarioConfig resolve(const std::string& arg) {
  std::error_code ec;
  if (fs::is_regular_file(arg, ec)) return load_config(arg);
  if (is_builtin_scenario(arg)) return builtin_scenario(arg);
  fail(ErrorKind::Parse, "'" + arg + "' is neither a config file nor a builtin scenario (see list-scenarios)");
}

fs::path output_dir(const ScenarioConfig& c, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (!c.directory.empty()) return c.directory;
  return fs::path("results") / c.name;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slow-light frequency shifter simulator"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "slowshift 0.1.0");

  std::string config_arg, out_arg;
  bool force = false;
  double voltage = 0.0;

  auto* run = app.add_subcommand("run", "run a scenario and write its result bundle");
  run->add_option("config", config_arg, "config file or builtin scenario name")->required();
  run->add_option("-o,--out", out_arg, "output directory (default: [output] directory or results/<name>)");
  run->add_flag("-f,--force", force, "replace an existing result bundle");

  auto* list = app.add_subcommand("list-scenarios", "list builtin scenarios");

  auto* prepare = app.add_subcommand("prepare", "write the prepared ion profiles only");
  prepare->add_option("config", config_arg, "config file or builtin scenario name")->required();
  prepare->add_option("-o,--out", out_arg, "output directory")->required();

  auto* oracle = app.add_subcommand("oracle", "write the linear transfer function only");
  oracle->add_option("config", config_arg, "config file or builtin scenario name")->required();
  oracle->add_option("-V,--voltage", voltage, "static voltage applied to the structure");
  oracle->add_option("-o,--out", out_arg, "output CSV (default: standard output)");

  auto* dump = app.add_subcommand("dump-config", "print the fully resolved configuration");
  dump->add_option("config", config_arg, "config file or builtin scenario name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitParse;
  }

  try {
    if (list->parsed()) {
      for (const auto& s : list_scenarios()) std::cout << s.name << "  " << s.description << '\n';
      return 0;
    }
    const ScenarioConfig cfg = resolve(config_arg);
    validate_config(cfg);

    if (dump->parsed()) {
      std::cout << render_config(cfg);
      return 0;
    }
    if (prepare->parsed()) {
      const IonEnsemble e = build_ensemble(cfg);
      fs::create_directories(out_arg);
      for (const auto& f : write_profiles(e, out_arg, "profiles")) std::cout << f << '\n';
      return 0;
    }
    if (oracle->parsed()) {
      const IonEnsemble e = build_ensemble(cfg);
      const double ds = cfg.drive_coefficient().mhz_per_v_per_mm() * voltage / cfg.gap_mm;
      const double center = cfg.pulse.center_detuning_mhz + ds;
      const auto n = static_cast<std::size_t>(std::llround(2.0 * cfg.transfer_half_span_mhz / cfg.transfer_spacing_mhz)) + 1;
      std::vector<double> f(n);
      for (std::size_t i = 0; i < n; ++i)
        f[i] = center - cfg.transfer_half_span_mhz + cfg.transfer_spacing_mhz * static_cast<double>(i);
      const auto h = linear_transfer(e, f, ds);
      if (out_arg.empty()) {
        write_transfer_csv(h, std::cout);
      } else {
        auto out = open_output(out_arg);
        write_transfer_csv(h, out);
      }
      return 0;
    }

    const fs::path dir = output_dir(cfg, out_arg);
    std::error_code ec;
    if (fs::exists(dir, ec) && !force)
      fail(ErrorKind::Io, "output directory " + dir.string() + " already exists (use --force to replace it)");
    std::cerr << "running " << cfg.name << '\n';
    const ScenarioResult res = execute_scenario(cfg);
    write_bundle(res, dir, force);
    for (const auto& [k, v] : res.summary) std::cout << k << ": " << v << '\n';
    std::cerr << "wrote " << dir.string() << '\n';
    return 0;
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitOther;
  }
}
