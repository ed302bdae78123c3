#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "acns/field.hpp"
#include "acns/mms.hpp"
#include "acns/params.hpp"
#include "acns/stepper.hpp"

namespace acns {

// One time step honoring the case freeze flags: a frozen field keeps its
// sampled value while the other is advanced with the manufactured forcing.
// The fully coupled case goes through the regular stepper.
inline SimState mms_step(const Grid& g, const ManufacturedCase& mc, const SimState& state,
                         const StepperConfig& cfg, const Params& prm) {
  const Forcing f = mms_forcing(g, mc, state.time + cfg.dt, prm);
  if (mc.evolves_velocity() && mc.evolves_phase())
    return step(g, state, cfg, prm, Formulation::original, &f).state;

  SimState cand = state;
  apply_bc(g, cand);
  const SimState& base = cand;
  SimState next = cand;
  for (int m = 0; m < cfg.picard_max; ++m) {
    const SimState frozen = next;
    if (mc.evolves_phase())
      next.phase = phase_step(g, base, frozen, cfg, prm, &f.phase);
    if (mc.evolves_velocity()) {
      const StaggeredVelocity u_star =
          momentum_predict(g, base, frozen, cfg, prm, &f.momentum);
      const ScalarField rho_c = rho_field(g, frozen.phase, prm);
      const ProjectResult pr = project(g, u_star, rho_c, cfg, &next.pressure);
      next.velocity = pr.velocity;
      next.pressure = pr.pressure;
    }
    double delta = 0.0, scale = 1.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        delta = std::max(delta, std::fabs(next.phase(i, j) - frozen.phase(i, j)));
        scale = std::max(scale, std::fabs(next.phase(i, j)));
      }
    for (int j = 0; j < g.ny; ++j)
      for (int i = 1; i < g.nx; ++i) {
        delta = std::max(delta, std::fabs(next.velocity.u(i, j) - frozen.velocity.u(i, j)));
        scale = std::max(scale, std::fabs(next.velocity.u(i, j)));
      }
    for (int j = 1; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        delta = std::max(delta, std::fabs(next.velocity.v(i, j) - frozen.velocity.v(i, j)));
        scale = std::max(scale, std::fabs(next.velocity.v(i, j)));
      }
    if (delta / scale < cfg.picard_tol) break;
  }
  next.time = state.time + cfg.dt;
  return next;
}

inline SimState mms_run(const Grid& g, const ManufacturedCase& mc, const StepperConfig& cfg,
                        const Params& prm, int nsteps) {
  SimState st = sample_state(g, mc, 0.0);
  for (int k = 0; k < nsteps; ++k) st = mms_step(g, mc, st, cfg, prm);
  return st;
}

struct ConvergenceRow {
  int resolution = 0;
  double h = 0, dt = 0;
  MmsErrors err;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  double order = std::numeric_limits<double>::quiet_NaN();
};

namespace detail_verify {

inline double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t k = 0; k < n; ++k) {
    sx += x[k];
    sy += y[k];
    sxx += x[k] * x[k];
    sxy += x[k] * y[k];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail_verify

// Refines grid and step together (dt scaled with h^2 so the first-order time
// error tracks the second-order space error); order fitted on combined L2.
inline ConvergenceReport spatial_study(const std::string& case_name, const Params& prm,
                                       StepperConfig cfg,
                                       const std::vector<int>& resolutions = {32, 64, 128},
                                       double t_end = 0.04, double dt_coarse = 4e-4) {
  if (resolutions.size() < 3) throw std::invalid_argument("need at least 3 resolutions");
  ConvergenceReport rep;
  std::vector<double> lh, le;
  for (int n : resolutions) {
    Grid g{n, n, 1.0, 1.0};
    auto mc = make_case(case_name, g.lx, g.ly);
    const double scale = static_cast<double>(resolutions.front()) / n;
    cfg.dt = dt_coarse * scale * scale;
    const int nsteps = static_cast<int>(std::lround(t_end / cfg.dt));
    const SimState st = mms_run(g, *mc, cfg, prm, nsteps);
    rep.rows.push_back({n, g.hx(), cfg.dt, mms_errors(g, *mc, st, st.time)});
    lh.push_back(std::log(g.hx()));
    le.push_back(std::log(rep.rows.back().err.combined_l2()));
  }
  rep.order = detail_verify::lsq_slope(lh, le);
  return rep;
}

namespace detail_verify {

inline double state_diff_l2(const Grid& g, const SimState& a, const SimState& b) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double d = a.velocity.u(i, j) - b.velocity.u(i, j);
      acc += d * d;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = a.velocity.v(i, j) - b.velocity.v(i, j);
      acc += d * d;
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = a.phase(i, j) - b.phase(i, j);
      acc += d * d;
    }
  return std::sqrt(acc * g.cell_area());
}

}  // namespace detail_verify

// Fixed grid, halved steps; the order comes from consecutive solution
// differences (Richardson), which cancels the common spatial error floor.
inline ConvergenceReport temporal_study(const std::string& case_name, const Params& prm,
                                        StepperConfig cfg, int resolution = 64,
                                        double t_end = 0.04, double dt_coarse = 1e-3) {
  Grid g{resolution, resolution, 1.0, 1.0};
  auto mc = make_case(case_name, g.lx, g.ly);
  ConvergenceReport rep;
  std::vector<SimState> finals;
  for (int level = 0; level < 3; ++level) {
    cfg.dt = dt_coarse / (1 << level);
    const int nsteps = static_cast<int>(std::lround(t_end / cfg.dt));
    finals.push_back(mms_run(g, *mc, cfg, prm, nsteps));
    rep.rows.push_back(
        {resolution, g.hx(), cfg.dt, mms_errors(g, *mc, finals.back(), finals.back().time)});
  }
  const double d1 = detail_verify::state_diff_l2(g, finals[0], finals[1]);
  const double d2 = detail_verify::state_diff_l2(g, finals[1], finals[2]);
  rep.order = std::log2(d1 / d2);
  return rep;
}

inline std::string to_csv(const ConvergenceReport& rep) {
  std::ostringstream os;
  os.precision(17);
  os << "resolution,h,dt,l2_u,linf_u,l2_phi,linf_phi\n";
  for (const auto& r : rep.rows)
    os << r.resolution << ',' << r.h << ',' << r.dt << ',' << r.err.l2_u << ','
       << r.err.linf_u << ',' << r.err.l2_phi << ',' << r.err.linf_phi << '\n';
  os << "# fitted order," << rep.order << '\n';
  return os.str();
}

namespace detail_verify {

// Per-field relative inf-norm distance over interior degrees of freedom.
inline double state_rel_discrepancy(const Grid& g, const SimState& a, const SimState& b) {
  double du = 0, su = 0, dphi = 0, sphi = 0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      du = std::max(du, std::fabs(a.velocity.u(i, j) - b.velocity.u(i, j)));
      su = std::max({su, std::fabs(a.velocity.u(i, j)), std::fabs(b.velocity.u(i, j))});
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      du = std::max(du, std::fabs(a.velocity.v(i, j) - b.velocity.v(i, j)));
      su = std::max({su, std::fabs(a.velocity.v(i, j)), std::fabs(b.velocity.v(i, j))});
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      dphi = std::max(dphi, std::fabs(a.phase(i, j) - b.phase(i, j)));
      sphi = std::max({sphi, std::fabs(a.phase(i, j)), std::fabs(b.phase(i, j))});
    }
  return std::max(du / std::max(1e-14, su), dphi / std::max(1e-14, sphi));
}

}  // namespace detail_verify

// One step through the original and the perturbed formulation from the same
// state; the two are algebraically identical, so the discrepancy is solver
// and rounding noise only.
inline double perturbation_equivalence(const Grid& g, const SimState& state,
                                       const StepperConfig& cfg, const Params& prm) {
  const double s = branch_sign(prm.branch);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (std::fabs(state.phase(i, j) - s) > 0.5)
        throw std::invalid_argument("phase too far from the selected equilibrium");
  const StepResult a = step(g, state, cfg, prm, Formulation::original);
  const StepResult b = step(g, state, cfg, prm, Formulation::perturbed);
  return detail_verify::state_rel_discrepancy(g, a.state, b.state);
}

struct EquivalenceResult {
  double max_discrepancy = 0.0;
  std::vector<double> per_step;
};

// Advances two independent trajectories, one per formulation, and tracks the
// running discrepancy; drift should stay near the one-step tolerance scale.
inline EquivalenceResult perturbation_equivalence_run(const Grid& g, const SimState& state,
                                                      const StepperConfig& cfg,
                                                      const Params& prm, int nsteps) {
  EquivalenceResult res;
  SimState a = state, b = state;
  for (int k = 0; k < nsteps; ++k) {
    a = step(g, a, cfg, prm, Formulation::original).state;
    b = step(g, b, cfg, prm, Formulation::perturbed).state;
    res.per_step.push_back(detail_verify::state_rel_discrepancy(g, a, b));
    res.max_discrepancy = std::max(res.max_discrepancy, res.per_step.back());
  }
  return res;
}

}  // namespace acns
