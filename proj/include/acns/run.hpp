#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>
#include <string>

#include "acns/config.hpp"
#include "acns/diagnostics.hpp"
#include "acns/field.hpp"
#include "acns/mms.hpp"
#include "acns/snapshot.hpp"
#include "acns/stepper.hpp"

namespace acns {

// Initial states; all presets have discretely divergence-free velocity and
// phase inside [-1, 1].
inline SimState initial_condition(const RunConfig& cfg) {
  const Grid g = cfg.grid();
  const double s = branch_sign(cfg.params.branch);
  SimState st(g);
  switch (cfg.ic.kind) {
    case IcKind::equilibrium:
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) st.phase(i, j) = s;
      break;
    case IcKind::perturbed_equilibrium: {
      // phi = s - s a bump with bump in [0, 1] and zero normal derivative;
      // amplitude <= 2 keeps phi inside [-1, 1].
      const double a = cfg.ic.amplitude;
      const double wx = 2.0 * std::numbers::pi * cfg.ic.mode / g.lx;
      const double wy = 2.0 * std::numbers::pi * cfg.ic.mode / g.ly;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double bump =
              0.25 * (1.0 - std::cos(wx * g.xc(i))) * (1.0 - std::cos(wy * g.yc(j)));
          st.phase(i, j) = s - s * a * bump;
        }
      break;
    }
    case IcKind::bubble: {
      const double R = cfg.ic.radius * g.lx, w = cfg.ic.width * g.lx;
      const double cx = 0.5 * g.lx, cy = 0.5 * g.ly;
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
          const double d = std::hypot(g.xc(i) - cx, g.yc(j) - cy);
          st.phase(i, j) = std::clamp(std::tanh((d - R) / w), -1.0, 1.0);
        }
      break;
    }
    case IcKind::mms: {
      const auto mc = make_case(cfg.ic.mms_case, g.lx, g.ly);
      return sample_state(g, *mc, 0.0);
    }
  }
  apply_bc(g, st);
  return st;
}

// Everything an observer may want about one completed step (step 0 is the
// initial state; prev == state and the report is empty there).
struct StepInfo {
  int step = 0;
  const SimState& state;
  const SimState& prev;
  const StepReport& report;
  EnergyReport energy;
  double balance_residual = std::numeric_limits<double>::quiet_NaN();
};

struct RunSummary {
  int steps = 0;
  double max_div = 0.0;
  double max_overshoot = 0.0;  // max over steps of dist(phi, [-1,1])
  TimeSeries e_total, d_diss, global_e0, residuals;
  SimState final_state;
  bool stagnation_warned = false;
};

using StepObserver = std::function<void(const StepInfo&)>;

// Time loop with per-step diagnostics. Solver failures propagate after the
// observer has seen every completed step.
inline RunSummary simulate(const RunConfig& cfg, const StepObserver& observer = {}) {
  cfg.validate();
  const Grid g = cfg.grid();
  const double dt = cfg.stepper.dt;
  int nsteps = static_cast<int>(std::lround(cfg.t_end / dt));
  if (nsteps < 1) nsteps = 1;

  SimState st = initial_condition(cfg);
  RunSummary sum;
  const StepReport blank;

  auto overshoot = [](const EnergyReport& e) {
    return std::max({0.0, e.phi_max - 1.0, -1.0 - e.phi_min});
  };

  EnergyReport er = evaluate(g, st, cfg.params);
  sum.max_div = er.div_max;
  sum.max_overshoot = overshoot(er);
  sum.e_total.push_back(st.time, er.e_total);
  sum.d_diss.push_back(st.time, er.d_dissipative);
  sum.global_e0.push_back(st.time, er.global_e0);
  if (observer)
    observer(StepInfo{0, st, st, blank, er, std::numeric_limits<double>::quiet_NaN()});

  double e_prev = er.e_total;
  for (int k = 1; k <= nsteps; ++k) {
    StepResult r = step(g, st, cfg.stepper, cfg.params);
    const SimState prev = std::move(st);
    st = std::move(r.state);

    er = evaluate(g, st, cfg.params, &prev, dt);
    const double balance = (er.e_total - e_prev) / dt + er.d_dissipative;
    e_prev = er.e_total;

    sum.steps = k;
    sum.max_div = std::max(sum.max_div, er.div_max);
    sum.max_overshoot = std::max(sum.max_overshoot, overshoot(er));
    sum.e_total.push_back(st.time, er.e_total);
    sum.d_diss.push_back(st.time, er.d_dissipative);
    sum.global_e0.push_back(st.time, er.global_e0);
    sum.residuals.push_back(st.time, balance);
    sum.stagnation_warned = sum.stagnation_warned || r.report.picard_stagnated;

    if (observer) observer(StepInfo{k, st, prev, r.report, er, balance});
  }
  sum.final_state = std::move(st);
  return sum;
}

struct RunResult {
  int status = 0;  // 0 ok, 1 solver failure
  std::string error;
  RunSummary summary;
};

namespace detail_run {

inline std::filesystem::path output_directory(const RunConfig& cfg) {
  if (const char* env = std::getenv("ACNS_OUTPUT_DIR"); env && *env)
    return std::filesystem::path(env);
  return std::filesystem::path(cfg.output_dir);
}

inline std::string snapshot_name(int step) {
  std::ostringstream os;
  os << "snap_" << std::setw(6) << std::setfill('0') << step << ".dat";
  return os.str();
}

inline void write_series_row(std::ostream& os, const StepInfo& info) {
  auto col = [&os](double v) {
    if (std::isnan(v)) os << "nan";
    else os << v;
  };
  os << info.state.time << ',';
  col(info.energy.e_total);
  os << ',';
  col(info.energy.d_dissipative);
  os << ',';
  col(info.energy.e0);
  os << ',';
  col(info.energy.d0 ? *info.energy.d0 : std::numeric_limits<double>::quiet_NaN());
  os << ',';
  col(info.energy.global_e0);
  os << ',';
  col(info.energy.div_max);
  os << ',';
  col(info.energy.phi_min);
  os << ',';
  col(info.energy.phi_max);
  os << ',';
  col(info.energy.poincare_ratio);
  os << ',' << info.report.picard_iters << ',';
  col(info.balance_residual);
  os << '\n';
}

}  // namespace detail_run

// Full experiment: time loop plus series.csv and snapshots in the output
// directory (overridable through ACNS_OUTPUT_DIR). Solver failure flushes
// the last good state and returns status 1.
inline RunResult run(const RunConfig& cfg) {
  cfg.validate();
  const Grid g = cfg.grid();
  const double dt = cfg.stepper.dt;
  int nsteps = static_cast<int>(std::lround(cfg.t_end / dt));
  if (nsteps < 1) nsteps = 1;

  const std::filesystem::path dir = detail_run::output_directory(cfg);
  std::filesystem::create_directories(dir);
  std::ofstream series(dir / "series.csv");
  if (!series) throw std::runtime_error("cannot open " + (dir / "series.csv").string());
  series.precision(17);
  series << "t,e_total,d_dissipative,e0,d0,global_e0,div_max,phi_min,phi_max,"
            "poincare_ratio,picard_iters,balance_residual\n";

  RunResult res;
  SimState last_good(g);
  bool have_state = false;

  const StepObserver observer = [&](const StepInfo& info) {
    last_good = info.state;
    have_state = true;
    if (info.step % cfg.output_every == 0 || info.step == nsteps) {
      detail_run::write_series_row(series, info);
      snapshot_write(g, info.state, (dir / detail_run::snapshot_name(info.step)).string());
    }
  };

  auto bail = [&](const char* what) {
    series.flush();
    if (have_state) snapshot_write(g, last_good, (dir / "last_good.dat").string());
    res.status = 1;
    res.error = what;
  };
  try {
    res.summary = simulate(cfg, observer);
  } catch (const SolveFailure& e) {
    bail(e.what());
    return res;
  } catch (const ModelViolation& e) {
    bail(e.what());
    return res;
  }
  series.flush();
  if (!series) {
    res.status = 1;
    res.error = "write failure on series.csv";
  }
  return res;
}

}  // namespace acns
