#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "acns/field.hpp"
#include "acns/operators.hpp"
#include "acns/params.hpp"

namespace acns {

// E^total = int 1/2 rho(phi) |u|^2 + lambda (1/2 |grad phi|^2 + f(phi)).
inline double total_energy(const Grid& g, const SimState& st, const Params& prm) {
  const ScalarField rho_c = rho_field(g, st.phase, prm);
  double fsum = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) fsum += prm.f(st.phase(i, j));
  fsum *= g.cell_area();
  return 0.5 * norm2_weighted_center(g, st.velocity, rho_c) +
         prm.lambda * (0.5 * grad_norm2_scalar(g, st.phase) + fsum);
}

// Rate of phase change following the flow, evaluated from the equation's
// right side: phidot = gamma (lambda lap phi - lambda f'(phi) - rho'(phi)|u|^2/2).
inline ScalarField phase_rate(const Grid& g, const SimState& st, const Params& prm) {
  const ScalarField lap = laplacian_neumann(g, st.phase);
  const ScalarField sp2 = speed2_centers(g, st.velocity);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double ph = st.phase(i, j);
      out(i, j) = prm.gamma * (prm.lambda * lap(i, j) - prm.lambda * prm.f_prime(ph) -
                               prm.rho_prime(ph) * 0.5 * sp2(i, j));
    }
  return out;
}

// Delta^dissipative = int mu |grad u|^2 + (1/gamma) |phidot|^2.
inline double dissipation_rate(const Grid& g, const SimState& st, const Params& prm) {
  const ScalarField pd = phase_rate(g, st, prm);
  return prm.mu * grad_norm2_velocity(g, st.velocity) +
         norm2_cells(g, pd) / prm.gamma;
}

namespace detail_diag {

inline ScalarField cell_derivative(const Grid& g, const ScalarField& a,
                                   const ScalarField& b, double dt) {
  ScalarField out(g);
  const double idt = 1.0 / dt;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = (a(i, j) - b(i, j)) * idt;
  apply_bc_neumann(g, out);
  return out;
}

inline StaggeredVelocity face_derivative(const Grid& g, const StaggeredVelocity& a,
                                         const StaggeredVelocity& b, double dt) {
  StaggeredVelocity out(g);
  const double idt = 1.0 / dt;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) out.u(i, j) = (a.u(i, j) - b.u(i, j)) * idt;
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out.v(i, j) = (a.v(i, j) - b.v(i, j)) * idt;
  apply_bc_velocity(g, out);
  return out;
}

inline double lap_norm2_scalar(const Grid& g, const ScalarField& s) {
  const ScalarField lap = laplacian_neumann(g, s);
  return norm2_cells(g, lap);
}

inline double lap_norm2_velocity(const Grid& g, const StaggeredVelocity& w) {
  const StaggeredVelocity lap = laplacian_dirichlet(g, w);
  return norm2_faces(g, lap);
}

inline double h1_norm2_scalar(const Grid& g, const ScalarField& s) {
  return norm2_cells(g, s) + grad_norm2_scalar(g, s);
}

inline ScalarField shifted_phase(const Grid& g, const ScalarField& phase, double sgn) {
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) out(i, j) = phase(i, j) - sgn;
  apply_bc_neumann(g, out);
  return out;
}

}  // namespace detail_diag

// E_0 = ||u||^2_rho + mu ||grad u||^2 + ||phi||^2 + (gl+1) ||grad phi||^2 + gl ||lap phi||^2.
inline double functional_E0(const Grid& g, const SimState& st, const Params& prm) {
  const ScalarField rho_c = rho_field(g, st.phase, prm);
  const double gl = prm.gamma * prm.lambda;
  return norm2_weighted_center(g, st.velocity, rho_c) +
         prm.mu * grad_norm2_velocity(g, st.velocity) +
         norm2_cells(g, st.phase) + (gl + 1.0) * grad_norm2_scalar(g, st.phase) +
         gl * detail_diag::lap_norm2_scalar(g, st.phase);
}

struct D0Result {
  double core = 0.0;           // everything except the kappa ||p||_H1 term
  double pressure_term = 0.0;  // kappa ||p||_H1^2, reported separately
  double total() const { return core + pressure_term; }
};

// D_0, with time derivatives as backward differences of (curr, prev).
inline D0Result functional_D0(const Grid& g, const SimState& curr, const SimState& prev,
                              double dt, const Params& prm) {
  if (!(dt > 0.0)) throw std::invalid_argument("functional_D0: dt must be > 0");
  const double gl = prm.gamma * prm.lambda;
  const ScalarField rho_c = rho_field(g, curr.phase, prm);
  const StaggeredVelocity ut = detail_diag::face_derivative(g, curr.velocity, prev.velocity, dt);
  const ScalarField pt = detail_diag::cell_derivative(g, curr.phase, prev.phase, dt);
  const ScalarField lap_phi = laplacian_neumann(g, curr.phase);

  D0Result r;
  r.core = prm.mu * grad_norm2_velocity(g, curr.velocity) +
           norm2_weighted_center(g, ut, rho_c) +
           gl * grad_norm2_scalar(g, curr.phase) + norm2_cells(g, pt) +
           gl * detail_diag::lap_norm2_scalar(g, curr.phase) +
           grad_norm2_scalar(g, pt) +
           prm.kappa * detail_diag::lap_norm2_velocity(g, curr.velocity) +
           prm.kappa * grad_norm2_scalar(g, lap_phi);
  r.pressure_term = prm.kappa * detail_diag::h1_norm2_scalar(g, curr.pressure);
  return r;
}

// E_1: the E_j structure applied to backward-difference time derivatives.
inline double functional_E1(const Grid& g, const SimState& curr, const SimState& prev,
                            double dt, const Params& prm) {
  if (!(dt > 0.0)) throw std::invalid_argument("functional_E1: dt must be > 0");
  const double gl = prm.gamma * prm.lambda;
  const ScalarField rho_c = rho_field(g, curr.phase, prm);
  const StaggeredVelocity ut = detail_diag::face_derivative(g, curr.velocity, prev.velocity, dt);
  const ScalarField pt = detail_diag::cell_derivative(g, curr.phase, prev.phase, dt);
  return norm2_weighted_center(g, ut, rho_c) + prm.mu * grad_norm2_velocity(g, ut) +
         norm2_cells(g, pt) + (gl + 1.0) * grad_norm2_scalar(g, pt) +
         gl * detail_diag::lap_norm2_scalar(g, pt);
}

// D_1: the D_j structure on first derivatives; needs three consecutive states.
inline D0Result functional_D1(const Grid& g, const SimState& s2, const SimState& s1,
                              const SimState& s0, double dt, const Params& prm) {
  if (!(dt > 0.0)) throw std::invalid_argument("functional_D1: dt must be > 0");
  const double gl = prm.gamma * prm.lambda;
  const ScalarField rho_c = rho_field(g, s2.phase, prm);
  const StaggeredVelocity ut = detail_diag::face_derivative(g, s2.velocity, s1.velocity, dt);
  const StaggeredVelocity ut_prev = detail_diag::face_derivative(g, s1.velocity, s0.velocity, dt);
  const StaggeredVelocity utt = detail_diag::face_derivative(g, ut, ut_prev, dt);
  const ScalarField pt = detail_diag::cell_derivative(g, s2.phase, s1.phase, dt);
  const ScalarField pt_prev = detail_diag::cell_derivative(g, s1.phase, s0.phase, dt);
  const ScalarField ptt = detail_diag::cell_derivative(g, pt, pt_prev, dt);
  const ScalarField qt = detail_diag::cell_derivative(g, s2.pressure, s1.pressure, dt);

  D0Result r;
  r.core = prm.mu * grad_norm2_velocity(g, ut) + norm2_weighted_center(g, utt, rho_c) +
           gl * grad_norm2_scalar(g, pt) + norm2_cells(g, ptt) +
           gl * detail_diag::lap_norm2_scalar(g, pt) + grad_norm2_scalar(g, ptt) +
           prm.kappa * detail_diag::lap_norm2_velocity(g, ut) +
           prm.kappa * grad_norm2_scalar(g, laplacian_neumann(g, pt));
  r.pressure_term = prm.kappa * detail_diag::h1_norm2_scalar(g, qt);
  return r;
}

// Global perturbation functional about phi = +-1 (weights mu0, mu1):
// script-E_0 = ||u||^2_varrho + mu ||grad u||^2 + mu0 ||varphi||^2
//            + mu1 ||grad varphi||^2 + gl ||lap varphi||^2, varphi = phi -+ 1.
inline double functional_global_E(const Grid& g, const SimState& st, const Params& prm) {
  const double gl = prm.gamma * prm.lambda;
  const ScalarField varphi = detail_diag::shifted_phase(g, st.phase, branch_sign(prm.branch));
  const ScalarField rho_c = rho_field(g, st.phase, prm);
  return norm2_weighted_center(g, st.velocity, rho_c) +
         prm.mu * grad_norm2_velocity(g, st.velocity) +
         prm.mu0() * norm2_cells(g, varphi) + prm.mu1() * grad_norm2_scalar(g, varphi) +
         gl * detail_diag::lap_norm2_scalar(g, varphi);
}

// Global dissipation counterpart (weight mu2 and the damping term).
inline D0Result functional_global_D(const Grid& g, const SimState& curr,
                                    const SimState& prev, double dt, const Params& prm) {
  if (!(dt > 0.0)) throw std::invalid_argument("functional_global_D: dt must be > 0");
  const double gl = prm.gamma * prm.lambda;
  const double damping = 2.0 * gl / (prm.epsilon * prm.epsilon);
  const ScalarField varphi = detail_diag::shifted_phase(g, curr.phase, branch_sign(prm.branch));
  const ScalarField rho_c = rho_field(g, curr.phase, prm);
  const StaggeredVelocity ut = detail_diag::face_derivative(g, curr.velocity, prev.velocity, dt);
  const ScalarField pt = detail_diag::cell_derivative(g, curr.phase, prev.phase, dt);

  D0Result r;
  r.core = prm.mu * grad_norm2_velocity(g, curr.velocity) +
           norm2_weighted_center(g, ut, rho_c) + damping * norm2_cells(g, varphi) +
           prm.mu2() * grad_norm2_scalar(g, varphi) + norm2_cells(g, pt) +
           gl * detail_diag::lap_norm2_scalar(g, varphi) + grad_norm2_scalar(g, pt) +
           prm.kappa * (detail_diag::lap_norm2_velocity(g, curr.velocity) +
                        grad_norm2_scalar(g, laplacian_neumann(g, varphi)));
  r.pressure_term = prm.kappa * detail_diag::h1_norm2_scalar(g, curr.pressure);
  return r;
}

struct Monitors {
  double div_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double poincare_ratio = std::numeric_limits<double>::quiet_NaN();  // NaN: undefined
};

inline Monitors monitors(const Grid& g, const SimState& st) {
  Monitors m;
  m.div_max = max_abs_cells(g, divergence(g, st.velocity));
  m.phi_min = std::numeric_limits<double>::infinity();
  m.phi_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      m.phi_min = std::min(m.phi_min, st.phase(i, j));
      m.phi_max = std::max(m.phi_max, st.phase(i, j));
    }
  const double gn2 = grad_norm2_velocity(g, st.velocity);
  if (gn2 > 0.0) m.poincare_ratio = std::sqrt(norm2_faces(g, st.velocity) / gn2);
  return m;
}

struct TimeSeries {
  std::vector<double> t, v;

  void push_back(double time, double value) {
    if (!t.empty() && !(time > t.back()))
      throw std::invalid_argument("TimeSeries: t must be strictly increasing");
    t.push_back(time);
    v.push_back(value);
  }
  size_t size() const { return t.size(); }
};

struct DecayFit {
  double c = 0.0;          // decay rate, value ~ intercept * exp(-c t)
  double intercept = 0.0;  // value at t = 0 of the fitted model
  double r_squared = 0.0;
  bool degenerate = false;  // constant series: r^2 undefined
  int samples = 0;
};

// Least-squares fit of log(value) vs t over the window [t1, t2].
inline DecayFit decay_fit(const TimeSeries& s, double t1, double t2) {
  std::vector<double> ts, ys;
  for (size_t k = 0; k < s.size(); ++k) {
    if (s.t[k] < t1 || s.t[k] > t2) continue;
    if (!(s.v[k] > 0.0))
      throw std::invalid_argument("decay_fit: nonpositive value in window");
    ts.push_back(s.t[k]);
    ys.push_back(std::log(s.v[k]));
  }
  const int n = static_cast<int>(ts.size());
  if (n < 10) throw std::invalid_argument("decay_fit: fewer than 10 samples in window");

  double tm = 0.0, ym = 0.0;
  for (int k = 0; k < n; ++k) {
    tm += ts[k];
    ym += ys[k];
  }
  tm /= n;
  ym /= n;
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (int k = 0; k < n; ++k) {
    const double dt = ts[k] - tm, dy = ys[k] - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  DecayFit fit;
  fit.samples = n;
  const double slope = sty / stt;
  fit.c = slope == 0.0 ? 0.0 : -slope;
  fit.intercept = std::exp(ym - slope * tm);
  if (syy <= 1e-28 * static_cast<double>(n)) {
    fit.degenerate = true;
    fit.r_squared = 0.0;
    fit.c = 0.0;
    fit.intercept = std::exp(ym);
  } else {
    double ssres = 0.0;
    for (int k = 0; k < n; ++k) {
      const double pred = ym + slope * (ts[k] - tm);
      const double e = ys[k] - pred;
      ssres += e * e;
    }
    fit.r_squared = 1.0 - ssres / syy;
  }
  return fit;
}

// residual_k = [E(t_{k+1}) - E(t_k)]/dt + D(t_{k+1}); -> 0 at first order in
// dt for the semi-implicit scheme.
inline TimeSeries energy_balance_audit(const Grid& g, std::span<const SimState> history,
                                       double dt, const Params& prm) {
  if (history.size() < 2)
    throw std::invalid_argument("energy_balance_audit: need at least 2 states");
  if (!(dt > 0.0)) throw std::invalid_argument("energy_balance_audit: dt must be > 0");
  TimeSeries out;
  double e_prev = total_energy(g, history[0], prm);
  for (size_t k = 1; k < history.size(); ++k) {
    const double e = total_energy(g, history[k], prm);
    const double d = dissipation_rate(g, history[k], prm);
    out.push_back(history[k].time, (e - e_prev) / dt + d);
    e_prev = e;
  }
  return out;
}

struct EnergyReport {
  double e_total = 0.0;
  double d_dissipative = 0.0;
  double e0 = 0.0;
  double global_e0 = 0.0;
  std::optional<double> d0, d0_pressure, e1, global_d0, d1;
  double div_max = 0.0;
  double phi_min = 0.0;
  double phi_max = 0.0;
  double poincare_ratio = std::numeric_limits<double>::quiet_NaN();
};

inline EnergyReport evaluate(const Grid& g, const SimState& st, const Params& prm,
                             const SimState* prev = nullptr, double dt = 0.0) {
  EnergyReport r;
  r.e_total = total_energy(g, st, prm);
  r.d_dissipative = dissipation_rate(g, st, prm);
  r.e0 = functional_E0(g, st, prm);
  r.global_e0 = functional_global_E(g, st, prm);
  const Monitors m = monitors(g, st);
  r.div_max = m.div_max;
  r.phi_min = m.phi_min;
  r.phi_max = m.phi_max;
  r.poincare_ratio = m.poincare_ratio;
  if (prev) {
    const D0Result d0 = functional_D0(g, st, *prev, dt, prm);
    r.d0 = d0.core;
    r.d0_pressure = d0.pressure_term;
    r.e1 = functional_E1(g, st, *prev, dt, prm);
    r.global_d0 = functional_global_D(g, st, *prev, dt, prm).total();
  }
  return r;
}

}  // namespace acns
