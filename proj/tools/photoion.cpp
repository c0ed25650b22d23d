// photoion.cpp — command-line front end
#include <iostream>

#include <CLI11.hpp>

#include "photoion/cli.hpp"

namespace {
const char* kUnits = "Units: hbar = 2 m_e = 1, electron kinetic energy p^2, photon energy |k|.";
}

int main(int argc, char** argv) {
  using namespace photoion;
  CLI::App app{std::string("photoion: photoionization numerics on truncated Fock spaces.\n") + kUnits};
  app.require_subcommand(1);
  app.set_version_flag("--version", cli::kVersion);

  std::string run_path, out_dir, validate_path;
  int jobs = 1;
  auto* run = app.add_subcommand("run", "execute the task named in a config file");
  run->add_option("config", run_path, "config JSON (schema photoion-config-v1)")->required();
  run->add_option("--jobs", jobs, "worker threads for the task's parallel axis")->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "output directory (overrides the config)");
  auto* val = app.add_subcommand("validate", "check a config file against the schema only");
  val->add_option("config", validate_path, "config JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*val) {
      const cli::RunConfig cfg = cli::load_config(validate_path);
      std::cout << "config ok: task " << cfg.task << "\n";
      return 0;
    }
    cli::RunConfig cfg = cli::load_config(run_path);
    if (!out_dir.empty()) {
      cfg.output = out_dir;
      cfg.resolved["output"] = out_dir;
    }
    const cli::RunOutcome r = cli::run(cfg, jobs);
    if (r.exit_code == 2) std::cerr << "photoion: invariant suite failed, see " << cfg.output << "/results.csv\n";
    return r.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "photoion: " << e.what() << "\n";
    return cli::exit_code_for(e);
  }
}
