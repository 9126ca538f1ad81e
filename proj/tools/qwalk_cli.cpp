// Command-line front end: configure a walk (flags, config file, presets),
// run it, and write CSV or JSON results.  Exit codes: 0 success, 1 usage or
// configuration error, 2 I/O error, 3 numerical error.

#include <chrono>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "qwalk/qwalk.hpp"
#include "qwalk/record_io.hpp"

namespace {

struct RawArgs {
  std::vector<std::pair<std::string, std::string>> pairs;  // flag order
  std::string config_path;
};

void add_common_options(CLI::App* sub, RawArgs& raw) {
  auto opt = [sub, &raw](const std::string& flag, const std::string& key,
                         const std::string& help) {
    sub->add_option_function<std::string>(
        flag,
        [&raw, key](const std::string& v) { raw.pairs.emplace_back(key, v); },
        help);
  };
  opt("--preset", "preset",
      "experiment preset: fig1|fig2|fig4|fig6|equivalence|control|circle");
  opt("--engine", "engine",
      "evolution family: standard|timedep|gqw|gqw2|control|decoupled");
  opt("--rho", "rho", "coin parameter in [0,1] (default 0.5)");
  opt("--phi0", "phi0",
      "phase: a/b means 2*pi*a/b, a bare real means radians, or 'golden'");
  opt("--steps", "steps", "number of steps (default 100)");
  opt("--stride", "stride", "record every stride-th step (default 1)");
  opt("--initial", "initial",
      "initial coin amplitudes u_re,u_im,d_re,d_im (default symmetric)");
  opt("--lattice", "lattice", "line | line:EXTENT | circle:L");
  opt("--w", "w", "continuum Gaussian width (default 0.65)");
  opt("--taus", "taus", "comma-separated continuum slice times");
  opt("--snapshots", "snapshots", "comma-separated snapshot times");
  opt("--xi-min", "xi_min", "continuum grid lower edge (default -80.5)");
  opt("--xi-max", "xi_max", "continuum grid upper edge (default 80.5)");
  opt("--dxi", "dxi", "continuum grid spacing (default 0.25)");
  opt("--engines", "engines", "two engines to compare, e.g. timedep,gqw");
  opt("--out", "out", "output directory (default .)");
  opt("--format", "format", "csv | json (default csv)");
  sub->add_option("--config", raw.config_path,
                  "config file with the same keys as the flags (key=value)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Discrete-time quantum walk simulator: dynamic localization, "
      "quasiperiodic revivals, phase-equivalent walk constructions, and the "
      "long-wavelength continuum approximation."};
  app.require_subcommand(1);
  RawArgs raw;
  std::string command;
  for (const char* name : {"run", "sweep", "continuum", "compare"}) {
    CLI::App* sub = app.add_subcommand(
        name, std::string(name) == "run"        ? "run one walk"
              : std::string(name) == "sweep"    ? "run a preset sweep"
              : std::string(name) == "continuum"? "evaluate continuum slices"
                                                : "run two engines and diff");
    add_common_options(sub, raw);
    sub->callback([&command, name] { command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exit 0
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  }

  try {
    std::vector<std::pair<std::string, std::string>> file_pairs;
    if (!raw.config_path.empty())
      file_pairs = qwalk::read_config_file(raw.config_path);
    qwalk::ExperimentConfig cfg =
        qwalk::build_config(command, file_pairs, raw.pairs);
    qwalk::validate(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    qwalk::RunRecord rec = qwalk::run_experiment(cfg);
    qwalk::write_output(rec, cfg);
    const std::chrono::duration<double> dt =
        std::chrono::steady_clock::now() - t0;
    rec.wall_time_s = dt.count();
    std::fprintf(stderr, "wall_time_s=%.3f\n", rec.wall_time_s);
    return 0;
  } catch (const qwalk::io_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {  // usage_error, param_error
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {  // accuracy/range/domain/extent
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
