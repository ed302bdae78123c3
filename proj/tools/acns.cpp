// Command-line driver: experiments, decay fits, convergence verification and
// snapshot inspection on top of the header library.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "acns/acns.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw acns::ConfigError(0, "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

int do_run(const std::string& config_path) {
  const acns::RunConfig cfg = acns::parse_config(read_file(config_path));
  const acns::RunResult res = acns::run(cfg);
  if (res.status != 0) {
    std::cerr << "solver failure: " << res.error << '\n';
    return 1;
  }
  const auto& s = res.summary;
  std::cout << "steps            " << s.steps << '\n'
            << "final time       " << s.final_state.time << '\n'
            << "max |div u|      " << s.max_div << '\n'
            << "max overshoot    " << s.max_overshoot << '\n'
            << "final e_total    " << s.e_total.v.back() << '\n'
            << "final global_e0  " << s.global_e0.v.back() << '\n';
  if (s.stagnation_warned)
    std::cerr << "warning: inner iteration stagnated at least once\n";
  return 0;
}

int do_decay(const std::string& config_path) {
  const acns::RunConfig cfg = acns::parse_config(read_file(config_path));
  const acns::RunResult res = acns::run(cfg);
  if (res.status != 0) {
    std::cerr << "solver failure: " << res.error << '\n';
    return 1;
  }
  const auto& series = res.summary.global_e0;
  try {
    const acns::DecayFit fit =
        acns::decay_fit(series, 0.1 * cfg.t_end, series.t.back());
    std::cout << "decay rate c     " << fit.c << '\n'
              << "r_squared        " << fit.r_squared << '\n'
              << "samples          " << fit.samples << '\n'
              << "global_e0 ratio  " << series.v.back() / series.v.front() << '\n';
    if (fit.degenerate) std::cout << "series is constant within rounding\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "decay fit failed: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int do_verify() {
  const acns::Params prm;
  const acns::StepperConfig cfg;

  std::cout << "# spatial study, phase_diffusion\n";
  const acns::ConvergenceReport spatial =
      acns::spatial_study("phase_diffusion", prm, cfg);
  std::cout << acns::to_csv(spatial);

  std::cout << "# temporal study, swirl\n";
  const acns::ConvergenceReport temporal = acns::temporal_study("swirl", prm, cfg);
  std::cout << acns::to_csv(temporal);

  acns::RunConfig ecfg;
  ecfg.nx = ecfg.ny = 32;
  ecfg.ic.kind = acns::IcKind::perturbed_equilibrium;
  ecfg.ic.amplitude = 0.05;
  ecfg.stepper.poisson_tol = 1e-14;
  ecfg.stepper.picard_max = 4;
  ecfg.stepper.picard_tol = 1e-12;
  double worst = 0.0;
  for (const acns::Branch b : {acns::Branch::plus, acns::Branch::minus}) {
    ecfg.params.branch = b;
    const acns::SimState st = acns::initial_condition(ecfg);
    const acns::EquivalenceResult eq = acns::perturbation_equivalence_run(
        ecfg.grid(), st, ecfg.stepper, ecfg.params, 10);
    std::cout << "# equivalence drift, branch "
              << (b == acns::Branch::plus ? "plus" : "minus") << ": "
              << eq.max_discrepancy << '\n';
    worst = std::max(worst, eq.max_discrepancy);
  }

  const bool ok = spatial.order > 1.7 && spatial.order < 2.3 && temporal.order > 0.7 &&
                  temporal.order < 1.3 && worst <= 1e-10;
  std::cout << (ok ? "verify: OK\n" : "verify: FAILED\n");
  return ok ? 0 : 1;
}

int do_check(const std::string& snapshot_path, const std::string& config_path) {
  const acns::Snapshot snap = acns::snapshot_read(snapshot_path);
  acns::Params prm;
  if (!config_path.empty()) {
    const acns::RunConfig cfg = acns::parse_config(read_file(config_path));
    if (!(cfg.grid() == snap.grid))
      throw acns::ConfigError(0, "config grid does not match snapshot grid");
    prm = cfg.params;
  }
  const acns::EnergyReport er = acns::evaluate(snap.grid, snap.state, prm);
  std::cout << "grid             " << snap.grid.nx << " x " << snap.grid.ny << '\n'
            << "time             " << snap.state.time << '\n'
            << "e_total          " << er.e_total << '\n'
            << "d_dissipative    " << er.d_dissipative << '\n'
            << "e0               " << er.e0 << '\n'
            << "global_e0        " << er.global_e0 << '\n'
            << "div_max          " << er.div_max << '\n'
            << "phi range        [" << er.phi_min << ", " << er.phi_max << "]\n"
            << "poincare ratio   " << er.poincare_ratio << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-difference solver for a diffuse-interface two-phase flow model"};
  app.require_subcommand(1);

  std::string config_path, snapshot_path, check_config;
  CLI::App* cmd_run = app.add_subcommand("run", "advance the configured experiment");
  cmd_run->add_option("config", config_path, "config file")->required();
  CLI::App* cmd_decay =
      app.add_subcommand("decay", "run, then fit exponential decay of global_e0");
  cmd_decay->add_option("config", config_path, "config file")->required();
  CLI::App* cmd_verify =
      app.add_subcommand("verify", "convergence and equivalence verification suite");
  CLI::App* cmd_check =
      app.add_subcommand("check", "monitors and energy report for a snapshot");
  cmd_check->add_option("snapshot", snapshot_path, "snapshot file")->required();
  cmd_check->add_option("--config", check_config, "config supplying the parameters");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::cout.precision(12);
  try {
    if (cmd_run->parsed()) return do_run(config_path);
    if (cmd_decay->parsed()) return do_decay(config_path);
    if (cmd_verify->parsed()) return do_verify();
    if (cmd_check->parsed()) return do_check(snapshot_path, check_config);
  } catch (const acns::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
