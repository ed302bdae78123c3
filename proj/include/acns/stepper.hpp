#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "acns/field.hpp"
#include "acns/linsolve.hpp"
#include "acns/operators.hpp"
#include "acns/params.hpp"

namespace acns {

class ModelViolation : public std::runtime_error {
 public:
  explicit ModelViolation(const std::string& msg) : std::runtime_error(msg) {}
};

struct StepperConfig {
  double dt = 2.5e-4;
  int picard_max = 2;          // inner fixed-point passes
  double picard_tol = 1e-8;    // relative change between passes
  double poisson_tol = 1e-10;  // linear-solver relative residual
  int poisson_max_iter = 5000;

  bool operator==(const StepperConfig&) const = default;

  void validate() const {
    if (!(dt > 0.0)) throw std::invalid_argument("dt must be > 0");
    if (picard_max < 1) throw std::invalid_argument("picard_max must be >= 1");
    if (!(picard_tol > 0.0)) throw std::invalid_argument("picard_tol must be > 0");
    if (!(poisson_tol > 0.0)) throw std::invalid_argument("poisson_tol must be > 0");
    if (poisson_max_iter < 1) throw std::invalid_argument("poisson_max_iter must be >= 1");
  }
};

// Which algebraic form of the phase equation the step uses. Both are the
// same equation; `perturbed` works on varphi = phi -+ 1 with the linear
// damping split off the potential. Agreement to rounding is a test target.
enum class Formulation { original, perturbed };

struct Forcing {
  StaggeredVelocity momentum;
  ScalarField phase;
};

struct StepReport {
  int picard_iters = 0;
  double picard_residual = 0.0;
  bool picard_stagnated = false;
  std::vector<double> picard_deltas;
  int phase_iters = 0;
  int momentum_iters = 0;
  int poisson_iters = 0;
};

struct StepResult {
  SimState state;
  StepReport report;
};

namespace detail {

inline std::vector<double> pack_cells(const Grid& g, const ScalarField& s) {
  std::vector<double> x(static_cast<size_t>(g.nx) * g.ny);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) x[j * g.nx + i] = s(i, j);
  return x;
}

inline ScalarField unpack_cells(const Grid& g, const std::vector<double>& x) {
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(i, j) = x[j * g.nx + i];
  apply_bc_neumann(g, s);
  return s;
}

// Density averaged to faces; ru covers all u-faces, rv all v-faces.
struct FaceDensity {
  std::vector<double> ru;  // (nx+1) x ny, index j*(nx+1)+i
  std::vector<double> rv;  // nx x (ny+1), index j*nx+i
};

inline FaceDensity face_density(const Grid& g, const ScalarField& rho_c) {
  FaceDensity fd;
  fd.ru.resize(static_cast<size_t>(g.nx + 1) * g.ny);
  fd.rv.resize(static_cast<size_t>(g.nx) * (g.ny + 1));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i)
      fd.ru[j * (g.nx + 1) + i] = 0.5 * (rho_c(i - 1, j) + rho_c(i, j));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      fd.rv[j * g.nx + i] = 0.5 * (rho_c(i, j - 1) + rho_c(i, j));
  return fd;
}

// (1/dt + u_f . grad - d lap) with homogeneous Neumann mirrors, on packed cells.
struct NeumannAdvectDiffuse {
  int nx, ny;
  double idt, d, ihx2, ihy2, i2hx, i2hy;
  std::vector<double> uc, vc;

  void operator()(const std::vector<double>& x, std::vector<double>& y) const {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int k = j * nx + i;
        const double xc = x[k];
        const double xw = i > 0 ? x[k - 1] : xc;
        const double xe = i < nx - 1 ? x[k + 1] : xc;
        const double xs = j > 0 ? x[k - nx] : xc;
        const double xn = j < ny - 1 ? x[k + nx] : xc;
        const double lap = (xe - 2.0 * xc + xw) * ihx2 + (xn - 2.0 * xc + xs) * ihy2;
        const double adv = uc[k] * (xe - xw) * i2hx + vc[k] * (xn - xs) * i2hy;
        y[k] = xc * idt + adv - d * lap;
      }
  }
};

inline LinearSystem make_phase_system(const Grid& g, const StaggeredVelocity& u_f,
                                      double dt, double d) {
  NeumannAdvectDiffuse op;
  op.nx = g.nx;
  op.ny = g.ny;
  op.idt = 1.0 / dt;
  op.d = d;
  op.ihx2 = 1.0 / (g.hx() * g.hx());
  op.ihy2 = 1.0 / (g.hy() * g.hy());
  op.i2hx = 0.5 / g.hx();
  op.i2hy = 0.5 / g.hy();
  op.uc.resize(static_cast<size_t>(g.nx) * g.ny);
  op.vc.resize(op.uc.size());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      op.uc[j * g.nx + i] = 0.5 * (u_f.u(i, j) + u_f.u(i + 1, j));
      op.vc[j * g.nx + i] = 0.5 * (u_f.v(i, j) + u_f.v(i, j + 1));
    }

  LinearSystem sys;
  sys.n = g.nx * g.ny;
  sys.diag.resize(sys.n);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double cx = (i == 0 || i == g.nx - 1) ? 1.0 : 2.0;
      const double cy = (j == 0 || j == g.ny - 1) ? 1.0 : 2.0;
      sys.diag[j * g.nx + i] = op.idt + d * (cx * op.ihx2 + cy * op.ihy2);
    }
  sys.apply = std::move(op);
  sys.spd = false;
  return sys;
}

// rho (1/dt + u_f . grad) - mu lap on packed interior u- or v-faces, with
// no-slip values (zero at normal walls, reflection across tangential walls).
struct DirichletAdvectDiffuse {
  int nx, ny;  // packed extents: u-faces (nx-1) x ny are stored as nx_ x ny_
  bool ucomp;
  double idt, mu, ihx2, ihy2, i2hx, i2hy;
  std::vector<double> rho, ua, va;

  void operator()(const std::vector<double>& x, std::vector<double>& y) const {
    const int mx = ucomp ? nx - 1 : nx;
    const int my = ucomp ? ny : ny - 1;
    for (int q = 0; q < my; ++q)
      for (int p = 0; p < mx; ++p) {
        const int m = q * mx + p;
        const double xc = x[m];
        double xw, xe, xs, xn;
        if (ucomp) {
          xw = p > 0 ? x[m - 1] : 0.0;
          xe = p < mx - 1 ? x[m + 1] : 0.0;
          xs = q > 0 ? x[m - mx] : -xc;
          xn = q < my - 1 ? x[m + mx] : -xc;
        } else {
          xw = p > 0 ? x[m - 1] : -xc;
          xe = p < mx - 1 ? x[m + 1] : -xc;
          xs = q > 0 ? x[m - mx] : 0.0;
          xn = q < my - 1 ? x[m + mx] : 0.0;
        }
        const double lap = (xe - 2.0 * xc + xw) * ihx2 + (xn - 2.0 * xc + xs) * ihy2;
        const double adv = ua[m] * (xe - xw) * i2hx + va[m] * (xn - xs) * i2hy;
        y[m] = rho[m] * (xc * idt + adv) - mu * lap;
      }
  }
};

inline LinearSystem make_momentum_system(const Grid& g, const StaggeredVelocity& u_f,
                                         const FaceDensity& fd, bool ucomp, double dt,
                                         double mu) {
  DirichletAdvectDiffuse op;
  op.nx = g.nx;
  op.ny = g.ny;
  op.ucomp = ucomp;
  op.idt = 1.0 / dt;
  op.mu = mu;
  op.ihx2 = 1.0 / (g.hx() * g.hx());
  op.ihy2 = 1.0 / (g.hy() * g.hy());
  op.i2hx = 0.5 / g.hx();
  op.i2hy = 0.5 / g.hy();
  const int mx = ucomp ? g.nx - 1 : g.nx;
  const int my = ucomp ? g.ny : g.ny - 1;
  op.rho.resize(static_cast<size_t>(mx) * my);
  op.ua.resize(op.rho.size());
  op.va.resize(op.rho.size());
  for (int q = 0; q < my; ++q)
    for (int p = 0; p < mx; ++p) {
      const int m = q * mx + p;
      if (ucomp) {
        const int i = p + 1, j = q;
        op.rho[m] = fd.ru[j * (g.nx + 1) + i];
        op.ua[m] = u_f.u(i, j);
        op.va[m] = 0.25 * (u_f.v(i - 1, j) + u_f.v(i, j) + u_f.v(i - 1, j + 1) + u_f.v(i, j + 1));
      } else {
        const int i = p, j = q + 1;
        op.rho[m] = fd.rv[j * g.nx + i];
        op.ua[m] = 0.25 * (u_f.u(i, j - 1) + u_f.u(i + 1, j - 1) + u_f.u(i, j) + u_f.u(i + 1, j));
        op.va[m] = u_f.v(i, j);
      }
    }

  LinearSystem sys;
  sys.n = mx * my;
  sys.diag.resize(sys.n);
  for (int q = 0; q < my; ++q)
    for (int p = 0; p < mx; ++p) {
      const int m = q * mx + p;
      double cx = 2.0, cy = 2.0;
      if (ucomp && (q == 0 || q == my - 1)) cy = 3.0;
      if (!ucomp && (p == 0 || p == mx - 1)) cx = 3.0;
      sys.diag[m] = op.rho[m] * op.idt + mu * (cx * op.ihx2 + cy * op.ihy2);
    }
  sys.apply = std::move(op);
  sys.spd = false;
  return sys;
}

// -div(beta grad .) with homogeneous-flux walls, on packed cells.
struct VariablePoisson {
  int nx, ny;
  double ihx2, ihy2;
  std::vector<double> be, bw, bn, bs;

  void operator()(const std::vector<double>& x, std::vector<double>& y) const {
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        const int k = j * nx + i;
        const double xc = x[k];
        const double xw = i > 0 ? x[k - 1] : 0.0;
        const double xe = i < nx - 1 ? x[k + 1] : 0.0;
        const double xs = j > 0 ? x[k - nx] : 0.0;
        const double xn = j < ny - 1 ? x[k + nx] : 0.0;
        y[k] = (be[k] * (xc - xe) + bw[k] * (xc - xw)) * ihx2 +
               (bn[k] * (xc - xn) + bs[k] * (xc - xs)) * ihy2;
      }
  }
};

}  // namespace detail

// Implicit solve of (1/dt + u_f . grad - d lap) s = rhs with Neumann BC.
inline ScalarField solve_phase_system(const Grid& g, const StaggeredVelocity& u_f,
                                      const ScalarField& rhs, const ScalarField& guess,
                                      double dt, double d, const StepperConfig& cfg,
                                      int* iters = nullptr) {
  LinearSystem sys = detail::make_phase_system(g, u_f, dt, d);
  std::vector<double> b = detail::pack_cells(g, rhs);
  std::vector<double> x = detail::pack_cells(g, guess);
  SolveResult res = solve_linear(sys, b, x, cfg.poisson_tol, cfg.poisson_max_iter);
  if (iters) *iters = res.iterations;
  return detail::unpack_cells(g, x);
}

// One implicit phase update following the frozen-coefficient linearization:
// (1/dt + u_f . grad - gamma lambda lap) phi_new
//   = phi_n/dt - gamma lambda f'(phi_f) - gamma rho'(phi_f) |u_f|^2 / 2 (+ forcing).
inline ScalarField phase_step(const Grid& g, const SimState& state_n,
                              const SimState& frozen, const StepperConfig& cfg,
                              const Params& prm, const ScalarField* forcing = nullptr,
                              int* iters = nullptr) {
  require_match(g, state_n.phase);
  require_match(g, frozen.phase);
  cfg.validate();
  const ScalarField sp2 = speed2_centers(g, frozen.velocity);
  ScalarField rhs(g);
  const double idt = 1.0 / cfg.dt;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double pf = frozen.phase(i, j);
      rhs(i, j) = state_n.phase(i, j) * idt -
                  prm.gamma * prm.lambda * prm.f_prime(pf) -
                  prm.gamma * prm.rho_prime(pf) * 0.5 * sp2(i, j);
      if (forcing) rhs(i, j) += (*forcing)(i, j);
    }
  return solve_phase_system(g, frozen.velocity, rhs, frozen.phase, cfg.dt,
                            prm.gamma * prm.lambda, cfg, iters);
}

// Same update written in the perturbed variable varphi = phi -+ 1 with the
// damping term split off the potential; the linear operator is identical.
inline ScalarField perturbed_phase_step(const Grid& g, const ScalarField& varphi_n,
                                        const ScalarField& varphi_f,
                                        const StaggeredVelocity& u_f,
                                        const StepperConfig& cfg, const Params& prm,
                                        const ScalarField* forcing = nullptr,
                                        int* iters = nullptr) {
  const ScalarField sp2 = speed2_centers(g, u_f);
  ScalarField rhs(g);
  const double idt = 1.0 / cfg.dt;
  const double gl = prm.gamma * prm.lambda;
  const double damping = 2.0 * gl / (prm.epsilon * prm.epsilon);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double vf = varphi_f(i, j);
      rhs(i, j) = varphi_n(i, j) * idt - damping * vf - gl * prm.h(vf) -
                  prm.gamma * prm.varrho_prime(vf) * 0.5 * sp2(i, j);
      if (forcing) rhs(i, j) += (*forcing)(i, j);
    }
  return solve_phase_system(g, u_f, rhs, varphi_f, cfg.dt, gl, cfg, iters);
}

// Implicit predictor: rho(phi_f)(1/dt + u_f . grad) u* - mu lap u*
//   = rho(phi_f) u_n / dt + capillary(phi_f) (+ forcing), componentwise.
inline StaggeredVelocity momentum_predict(const Grid& g, const SimState& state_n,
                                          const SimState& frozen,
                                          const StepperConfig& cfg, const Params& prm,
                                          const StaggeredVelocity* forcing = nullptr,
                                          int* iters = nullptr) {
  require_match(g, state_n.velocity);
  require_match(g, frozen.velocity);
  cfg.validate();
  const ScalarField rho_c = rho_field(g, frozen.phase, prm);
  const detail::FaceDensity fd = detail::face_density(g, rho_c);
  const StaggeredVelocity cap = capillary_force(g, frozen.phase, prm);
  const double idt = 1.0 / cfg.dt;

  StaggeredVelocity out(g);
  int total_iters = 0;
  for (bool ucomp : {true, false}) {
    LinearSystem sys = detail::make_momentum_system(g, frozen.velocity, fd, ucomp,
                                                    cfg.dt, prm.mu);
    const int mx = ucomp ? g.nx - 1 : g.nx;
    const int my = ucomp ? g.ny : g.ny - 1;
    std::vector<double> b(static_cast<size_t>(mx) * my), x(b.size());
    for (int q = 0; q < my; ++q)
      for (int p = 0; p < mx; ++p) {
        const int m = q * mx + p;
        const int i = ucomp ? p + 1 : p;
        const int j = ucomp ? q : q + 1;
        const double rf = ucomp ? fd.ru[j * (g.nx + 1) + i] : fd.rv[j * g.nx + i];
        const double un = ucomp ? state_n.velocity.u(i, j) : state_n.velocity.v(i, j);
        const double cf = ucomp ? cap.u(i, j) : cap.v(i, j);
        b[m] = rf * un * idt + cf;
        if (forcing) b[m] += ucomp ? forcing->u(i, j) : forcing->v(i, j);
        x[m] = ucomp ? frozen.velocity.u(i, j) : frozen.velocity.v(i, j);
      }
    SolveResult res = solve_linear(sys, b, x, cfg.poisson_tol, cfg.poisson_max_iter);
    total_iters += res.iterations;
    for (int q = 0; q < my; ++q)
      for (int p = 0; p < mx; ++p) {
        const int m = q * mx + p;
        if (ucomp)
          out.u(p + 1, q) = x[m];
        else
          out.v(p, q + 1) = x[m];
      }
  }
  apply_bc_velocity(g, out);
  if (iters) *iters = total_iters;
  return out;
}

struct ProjectResult {
  StaggeredVelocity velocity;
  ScalarField pressure;
  int iterations = 0;
  double residual = 0.0;
};

// Variable-density projection: solve div((1/rho) grad q) = (1/dt) div u*,
// then u = u* - (dt/rho) grad q, p = q (zero mean). The solve is continued
// until the corrected field also meets the advertised max-divergence bound
// max|div u| <= 10 poisson_tol ||u*||_inf / min(hx, hy).
inline ProjectResult project(const Grid& g, const StaggeredVelocity& u_star,
                             const ScalarField& rho_c, const StepperConfig& cfg,
                             const ScalarField* warm_q = nullptr) {
  require_match(g, u_star);
  require_match(g, rho_c);
  cfg.validate();
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i)
      if (!(rho_c(i, j) > 0.0)) throw ModelViolation("non-positive density in projection");

  const detail::FaceDensity fd = detail::face_density(g, rho_c);
  const int nx = g.nx, ny = g.ny;

  detail::VariablePoisson op;
  op.nx = nx;
  op.ny = ny;
  op.ihx2 = 1.0 / (g.hx() * g.hx());
  op.ihy2 = 1.0 / (g.hy() * g.hy());
  op.be.assign(static_cast<size_t>(nx) * ny, 0.0);
  op.bw = op.be;
  op.bn = op.be;
  op.bs = op.be;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const int k = j * nx + i;
      if (i < nx - 1) op.be[k] = 1.0 / fd.ru[j * (nx + 1) + (i + 1)];
      if (i > 0) op.bw[k] = 1.0 / fd.ru[j * (nx + 1) + i];
      if (j < ny - 1) op.bn[k] = 1.0 / fd.rv[(j + 1) * nx + i];
      if (j > 0) op.bs[k] = 1.0 / fd.rv[j * nx + i];
    }

  LinearSystem sys;
  sys.n = nx * ny;
  sys.spd = true;
  sys.diag.resize(sys.n);
  for (int k = 0; k < sys.n; ++k)
    sys.diag[k] = (op.be[k] + op.bw[k]) * op.ihx2 + (op.bn[k] + op.bs[k]) * op.ihy2;
  sys.apply = op;

  const ScalarField div_star = divergence(g, u_star);
  const double idt = 1.0 / cfg.dt;
  std::vector<double> b(sys.n);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) b[j * nx + i] = -div_star(i, j) * idt;
  double bmean = 0.0;
  for (double v : b) bmean += v;
  bmean /= sys.n;
  for (double& v : b) v -= bmean;

  ProjectResult out;
  out.velocity = u_star;
  if (vec::nrm2(b) == 0.0) {
    out.pressure = ScalarField(g);
    apply_bc_velocity(g, out.velocity);
    apply_bc_neumann(g, out.pressure);
    return out;
  }

  // Enforce the max-divergence contract through the residual: after the
  // correction, div u = -dt (r + mean shift) cellwise.
  const double bound = 10.0 * cfg.poisson_tol * max_abs_faces(g, u_star) /
                       std::min(g.hx(), g.hy());
  const double rcap = bound * idt - std::fabs(bmean);
  if (!(rcap > 0.0))
    throw SolveFailure("projection divergence bound unattainable", std::fabs(bmean), 0);
  ResidualPredicate within_bound = [rcap](const std::vector<double>& r) {
    double m = 0.0;
    for (double v : r) m = std::max(m, std::fabs(v));
    return m <= rcap;
  };

  std::vector<double> x(sys.n, 0.0);
  if (warm_q) x = detail::pack_cells(g, *warm_q);
  SolveResult res = solve_linear(sys, b, x, cfg.poisson_tol, cfg.poisson_max_iter,
                                 within_bound);
  out.iterations = res.iterations;
  out.residual = res.residual;

  double qmean = 0.0;
  for (double v : x) qmean += v;
  qmean /= sys.n;
  for (double& v : x) v -= qmean;
  out.pressure = detail::unpack_cells(g, x);

  const double dhx = cfg.dt / g.hx(), dhy = cfg.dt / g.hy();
  for (int j = 0; j < ny; ++j)
    for (int i = 1; i < nx; ++i)
      out.velocity.u(i, j) -= dhx / fd.ru[j * (nx + 1) + i] *
                              (out.pressure(i, j) - out.pressure(i - 1, j));
  for (int j = 1; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.velocity.v(i, j) -= dhy / fd.rv[j * nx + i] *
                              (out.pressure(i, j) - out.pressure(i, j - 1));
  apply_bc_velocity(g, out.velocity);
  return out;
}

// One full time step: Picard passes of (phase solve, momentum predictor,
// projection) with coefficients re-frozen at the latest iterate.
inline StepResult step(const Grid& g, const SimState& state, const StepperConfig& cfg,
                       const Params& prm, Formulation form = Formulation::original,
                       const Forcing* forcing = nullptr) {
  cfg.validate();
  prm.validate();
  g.validate();
  require_match(g, state.velocity);
  require_match(g, state.phase);
  require_match(g, state.pressure);

  SimState s0 = state;
  apply_bc(g, s0);
  const double sgn = branch_sign(prm.branch);

  ScalarField varphi_n;  // perturbed-variable anchor, phi - (+-1)
  if (form == Formulation::perturbed) {
    varphi_n = ScalarField(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) varphi_n(i, j) = s0.phase(i, j) - sgn;
    apply_bc_neumann(g, varphi_n);
  }

  StepResult out;
  out.state = s0;
  SimState cand = s0;
  StepReport& rep = out.report;

  for (int m = 0; m < cfg.picard_max; ++m) {
    const SimState frozen = cand;  // pass m freezes the latest candidate

    ScalarField phase_new;
    int it_phase = 0;
    if (form == Formulation::original) {
      phase_new = phase_step(g, s0, frozen, cfg, prm,
                             forcing ? &forcing->phase : nullptr, &it_phase);
    } else {
      ScalarField varphi_f(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) varphi_f(i, j) = frozen.phase(i, j) - sgn;
      apply_bc_neumann(g, varphi_f);
      ScalarField vnew = perturbed_phase_step(g, varphi_n, varphi_f, frozen.velocity,
                                              cfg, prm,
                                              forcing ? &forcing->phase : nullptr,
                                              &it_phase);
      phase_new = ScalarField(g);
      for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) phase_new(i, j) = vnew(i, j) + sgn;
      apply_bc_neumann(g, phase_new);
    }

    int it_mom = 0;
    const StaggeredVelocity u_star =
        momentum_predict(g, s0, frozen, cfg, prm,
                         forcing ? &forcing->momentum : nullptr, &it_mom);

    const ScalarField rho_c = rho_field(g, frozen.phase, prm);
    ProjectResult pr = project(g, u_star, rho_c, cfg, &cand.pressure);

    SimState next = cand;
    next.velocity = pr.velocity;
    next.pressure = pr.pressure;
    next.phase = phase_new;

    double delta = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        delta = std::max(delta, std::fabs(next.phase(i, j) - cand.phase(i, j)));
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i <= g.nx; ++i)
        delta = std::max(delta, std::fabs(next.velocity.u(i, j) - cand.velocity.u(i, j)));
    for (int j = 0; j <= g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        delta = std::max(delta, std::fabs(next.velocity.v(i, j) - cand.velocity.v(i, j)));

    cand = std::move(next);
    rep.phase_iters += it_phase;
    rep.momentum_iters += it_mom;
    rep.poisson_iters += pr.iterations;
    rep.picard_deltas.push_back(delta);
    rep.picard_iters = m + 1;

    const double scale = std::max({1.0, max_abs_cells(g, cand.phase),
                                   max_abs_faces(g, cand.velocity)});
    rep.picard_residual = delta / scale;
    if (rep.picard_residual < cfg.picard_tol) break;
    if (m > 0 && rep.picard_deltas[m] >= rep.picard_deltas[m - 1])
      rep.picard_stagnated = true;
  }

  cand.time = s0.time + cfg.dt;
  out.state = std::move(cand);
  if (!all_finite(out.state)) throw SolveFailure("non-finite state after step", 0.0, 0);
  return out;
}

}  // namespace acns
