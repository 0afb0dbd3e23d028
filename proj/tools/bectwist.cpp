#include <bectwist/commands.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

namespace {

enum ExitCode { kOk = 0, kInternal = 1, kConfig = 2, kNumerical = 3 };

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase twists induced by a rotating condensate on lattice impurities"};
  app.set_version_flag("--version", BECTWIST_VERSION);
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  std::function<bectwist::RunOutput(bectwist::Config&)> run;

  auto add = [&](const std::string& name, const std::string& help, auto command) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory")->required();
    sub->add_option("--threads", threads, "worker threads for sweeps")->check(CLI::PositiveNumber);
    sub->callback([&, command] { run = [&, command](bectwist::Config& c) { return command(c, threads); }; });
  };
  add("phase-ring", "ring condensate: twist, hopping reduction and polaron shifts vs rotation",
      [](bectwist::Config& c, int t) { return bectwist::cmd_phase_ring(c, t); });
  add("drift", "single impurity drift on the twisted ring lattice",
      [](bectwist::Config& c, int t) { return bectwist::cmd_drift(c, t); });
  add("ed", "exact two-species Bose-Hubbard quench",
      [](bectwist::Config& c, int t) { return bectwist::cmd_ed(c, t); });
  add("phase-2d", "twist in a rotating 2D harmonic trap",
      [](bectwist::Config& c, int t) { return bectwist::cmd_phase_2d(c, t); });
  add("validate", "weak-coupling and phonon-velocity checks only",
      [](bectwist::Config& c, int) { return bectwist::cmd_validate(c); });

  CLI11_PARSE(app, argc, argv);

  try {
    bectwist::Config cfg = bectwist::Config::from_file(config_path);
    const bectwist::RunOutput result = run(cfg);
    const auto manifest = bectwist::commit_run(result, cfg, out_dir);
    for (const auto& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("%s: wrote %zu files to %s\n", result.command.c_str(), manifest["outputs"].size() + 1,
                out_dir.c_str());
    return kOk;
  } catch (const bectwist::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const bectwist::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kInternal;
  }
}
