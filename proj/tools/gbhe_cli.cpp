// Command-line driver: convergence studies, single simulations and weight tables.
#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "gbhe/driver.hpp"
#include "gbhe/errors.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Burgers-Huxley equation with memory: CR and DG finite element solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  std::optional<int> levels;
  std::optional<unsigned long long> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "seed for random-field checks (recorded in the output)");
  };
  auto* conv = app.add_subcommand("convergence", "run a manufactured-solution convergence study");
  add_common(conv);
  conv->add_option("--levels", levels, "number of refinement levels");
  auto* sim = app.add_subcommand("simulate", "run one simulation and write diagnostics and VTK snapshots");
  add_common(sim);
  auto* dump = app.add_subcommand("weights-dump", "print the memory/Caputo quadrature weights");
  add_common(dump);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigError;
  }

  try {
    gbhe::RunConfig cfg = gbhe::parse_config(config_path);
    if (seed) cfg.seed = *seed;
    if (conv->parsed()) {
      gbhe::cmd_convergence(cfg, out_dir, levels, std::cout);
    } else if (sim->parsed()) {
      gbhe::cmd_simulate(cfg, out_dir, std::cout);
    } else {
      gbhe::cmd_weights_dump(cfg, std::cout);
    }
  } catch (const gbhe::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbhe::UnsupportedCase& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const gbhe::StepFailure& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const gbhe::SingularMatrixError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kSolverFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
