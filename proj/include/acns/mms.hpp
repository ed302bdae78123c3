#pragma once

#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>

#include "acns/field.hpp"
#include "acns/params.hpp"
#include "acns/stepper.hpp"

namespace acns {

// Analytic values of a manufactured solution at one sample point.
struct MmsPoint {
  double u = 0, v = 0, p = 0, phi = 0;
  double u_t = 0, u_x = 0, u_y = 0, lap_u = 0;
  double v_t = 0, v_x = 0, v_y = 0, lap_v = 0;
  double p_x = 0, p_y = 0;
  double phi_t = 0, phi_x = 0, phi_y = 0, lap_phi = 0;
};

// A closed-form (u, p, phi) satisfying no-slip, zero normal phase gradient
// and div u = 0 identically; velocity comes from a stream function psi that
// vanishes on the boundary.
class ManufacturedCase {
 public:
  virtual ~ManufacturedCase() = default;
  virtual const char* name() const = 0;
  virtual bool evolves_velocity() const = 0;
  virtual bool evolves_phase() const = 0;
  virtual MmsPoint eval(double x, double y, double t) const = 0;
  virtual double psi(double x, double y, double t) const = 0;
};

namespace detail_mms {

// Shared swirl velocity: psi = U sin^2(kx x) sin^2(ky y) g(t).
inline void swirl_velocity(MmsPoint& q, double x, double y, double U, double kx,
                           double ky, double gt, double gpt) {
  const double sx = std::sin(kx * x), cx = std::cos(kx * x);
  const double sy = std::sin(ky * y), cy = std::cos(ky * y);
  const double s2x = std::sin(2.0 * kx * x), c2x = std::cos(2.0 * kx * x);
  const double s2y = std::sin(2.0 * ky * y), c2y = std::cos(2.0 * ky * y);

  q.u = ky * U * sx * sx * s2y * gt;
  q.u_t = ky * U * sx * sx * s2y * gpt;
  q.u_x = kx * ky * U * s2x * s2y * gt;
  q.u_y = 2.0 * ky * ky * U * sx * sx * c2y * gt;
  q.lap_u = 2.0 * ky * U * (kx * kx * c2x - 2.0 * ky * ky * sx * sx) * s2y * gt;

  q.v = -kx * U * s2x * sy * sy * gt;
  q.v_t = -kx * U * s2x * sy * sy * gpt;
  q.v_x = -2.0 * kx * kx * U * c2x * sy * sy * gt;
  q.v_y = -kx * ky * U * s2x * s2y * gt;
  q.lap_v = 2.0 * kx * U * s2x * (2.0 * kx * kx * sy * sy - ky * ky * c2y) * gt;
  (void)cx;
  (void)cy;
}

}  // namespace detail_mms

// (a) Pure phase diffusion: u = 0, phi = A exp(-sigma t) cos(kx x) cos(ky y).
class PhaseDiffusionCase final : public ManufacturedCase {
 public:
  PhaseDiffusionCase(double lx, double ly, double amplitude = 0.3, double sigma = 1.0)
      : kx_(std::numbers::pi / lx), ky_(std::numbers::pi / ly), a_(amplitude),
        sigma_(sigma) {}

  const char* name() const override { return "phase_diffusion"; }
  bool evolves_velocity() const override { return false; }
  bool evolves_phase() const override { return true; }
  double psi(double, double, double) const override { return 0.0; }

  MmsPoint eval(double x, double y, double t) const override {
    MmsPoint q;
    const double e = a_ * std::exp(-sigma_ * t);
    const double cx = std::cos(kx_ * x), sx = std::sin(kx_ * x);
    const double cy = std::cos(ky_ * y), sy = std::sin(ky_ * y);
    q.phi = e * cx * cy;
    q.phi_t = -sigma_ * q.phi;
    q.phi_x = -kx_ * e * sx * cy;
    q.phi_y = -ky_ * e * cx * sy;
    q.lap_phi = -(kx_ * kx_ + ky_ * ky_) * q.phi;
    return q;
  }

 private:
  double kx_, ky_, a_, sigma_;
};

// (b) Steady forced Stokes-like flow: swirl velocity, constant phase.
class StokesCase final : public ManufacturedCase {
 public:
  StokesCase(double lx, double ly, double U = 0.4, double P = 0.5, double phi0 = 0.2)
      : kx_(std::numbers::pi / lx), ky_(std::numbers::pi / ly), U_(U), P_(P),
        phi0_(phi0) {}

  const char* name() const override { return "stokes"; }
  bool evolves_velocity() const override { return true; }
  bool evolves_phase() const override { return false; }

  double psi(double x, double y, double) const override {
    const double sx = std::sin(kx_ * x), sy = std::sin(ky_ * y);
    return U_ * sx * sx * sy * sy;
  }

  MmsPoint eval(double x, double y, double) const override {
    MmsPoint q;
    detail_mms::swirl_velocity(q, x, y, U_, kx_, ky_, 1.0, 0.0);
    q.p = P_ * std::cos(kx_ * x) * std::cos(ky_ * y);
    q.p_x = -P_ * kx_ * std::sin(kx_ * x) * std::cos(ky_ * y);
    q.p_y = -P_ * ky_ * std::cos(kx_ * x) * std::sin(ky_ * y);
    q.phi = phi0_;
    return q;
  }

 private:
  double kx_, ky_, U_, P_, phi0_;
};

// (c) Fully coupled time-dependent swirl.
class SwirlCase final : public ManufacturedCase {
 public:
  SwirlCase(double lx, double ly, double U = 0.4, double P = 0.5,
            double omega = std::numbers::pi, double a = 0.2,
            double omega2 = std::numbers::pi)
      : kx_(std::numbers::pi / lx), ky_(std::numbers::pi / ly), U_(U), P_(P),
        om_(omega), a_(a), om2_(omega2) {}

  const char* name() const override { return "swirl"; }
  bool evolves_velocity() const override { return true; }
  bool evolves_phase() const override { return true; }

  double psi(double x, double y, double t) const override {
    const double sx = std::sin(kx_ * x), sy = std::sin(ky_ * y);
    return U_ * sx * sx * sy * sy * std::cos(om_ * t);
  }

  MmsPoint eval(double x, double y, double t) const override {
    MmsPoint q;
    const double gt = std::cos(om_ * t), gpt = -om_ * std::sin(om_ * t);
    detail_mms::swirl_velocity(q, x, y, U_, kx_, ky_, gt, gpt);

    const double cx = std::cos(kx_ * x), sx = std::sin(kx_ * x);
    const double cy = std::cos(ky_ * y), sy = std::sin(ky_ * y);
    q.p = P_ * cx * cy * gt;
    q.p_x = -P_ * kx_ * sx * cy * gt;
    q.p_y = -P_ * ky_ * cx * sy * gt;

    const double qt = std::cos(om2_ * t), qpt = -om2_ * std::sin(om2_ * t);
    q.phi = a_ * cx * cy * qt;
    q.phi_t = a_ * cx * cy * qpt;
    q.phi_x = -a_ * kx_ * sx * cy * qt;
    q.phi_y = -a_ * ky_ * cx * sy * qt;
    q.lap_phi = -(kx_ * kx_ + ky_ * ky_) * q.phi;
    return q;
  }

 private:
  double kx_, ky_, U_, P_, om_, a_, om2_;
};

inline std::unique_ptr<ManufacturedCase> make_case(const std::string& name, double lx,
                                                   double ly) {
  if (name == "phase_diffusion") return std::make_unique<PhaseDiffusionCase>(lx, ly);
  if (name == "stokes") return std::make_unique<StokesCase>(lx, ly);
  if (name == "swirl") return std::make_unique<SwirlCase>(lx, ly);
  throw std::invalid_argument("unknown manufactured case: " + name);
}

// Forcing residuals of the governing equations at one analytic point.
inline double forcing_u(const MmsPoint& q, const Params& prm) {
  return prm.rho(q.phi) * (q.u_t + q.u * q.u_x + q.v * q.u_y) + q.p_x -
         prm.mu * q.lap_u + prm.lambda * q.lap_phi * q.phi_x;
}

inline double forcing_v(const MmsPoint& q, const Params& prm) {
  return prm.rho(q.phi) * (q.v_t + q.u * q.v_x + q.v * q.v_y) + q.p_y -
         prm.mu * q.lap_v + prm.lambda * q.lap_phi * q.phi_y;
}

inline double forcing_phi(const MmsPoint& q, const Params& prm) {
  return q.phi_t + q.u * q.phi_x + q.v * q.phi_y -
         prm.gamma * (prm.lambda * q.lap_phi - prm.lambda * prm.f_prime(q.phi) -
                      prm.rho_prime(q.phi) * 0.5 * (q.u * q.u + q.v * q.v));
}

// Forcing sampled to the grid at time t.
inline Forcing mms_forcing(const Grid& g, const ManufacturedCase& mc, double t,
                           const Params& prm) {
  Forcing f{StaggeredVelocity(g), ScalarField(g)};
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      f.momentum.u(i, j) = forcing_u(mc.eval(g.xu(i), g.yu(j), t), prm);
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.momentum.v(i, j) = forcing_v(mc.eval(g.xv(i), g.yv(j), t), prm);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      f.phase(i, j) = forcing_phi(mc.eval(g.xc(i), g.yc(j), t), prm);
  return f;
}

// Analytic state on the grid; velocity is sampled through stream-function
// differences so the discrete divergence vanishes to rounding.
inline SimState sample_state(const Grid& g, const ManufacturedCase& mc, double t) {
  SimState st(g);
  st.time = t;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double x = g.xu(i);
      st.velocity.u(i, j) = (mc.psi(x, (j + 1) * g.hy(), t) - mc.psi(x, j * g.hy(), t)) * ihy;
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double y = g.yv(j);
      st.velocity.v(i, j) = -(mc.psi((i + 1) * g.hx(), y, t) - mc.psi(i * g.hx(), y, t)) * ihx;
    }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const MmsPoint q = mc.eval(g.xc(i), g.yc(j), t);
      st.pressure(i, j) = q.p;
      st.phase(i, j) = q.phi;
    }
  apply_bc(g, st);
  return st;
}

struct MmsErrors {
  double l2_u = 0, linf_u = 0;
  double l2_phi = 0, linf_phi = 0;
  double combined_l2() const { return std::sqrt(l2_u * l2_u + l2_phi * l2_phi); }
};

// Errors of a computed state against the pointwise analytic solution.
inline MmsErrors mms_errors(const Grid& g, const ManufacturedCase& mc,
                            const SimState& st, double t) {
  MmsErrors e;
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) {
      const double d = st.velocity.u(i, j) - mc.eval(g.xu(i), g.yu(j), t).u;
      acc += d * d;
      e.linf_u = std::max(e.linf_u, std::fabs(d));
    }
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = st.velocity.v(i, j) - mc.eval(g.xv(i), g.yv(j), t).v;
      acc += d * d;
      e.linf_u = std::max(e.linf_u, std::fabs(d));
    }
  e.l2_u = std::sqrt(acc * g.cell_area());
  acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = st.phase(i, j) - mc.eval(g.xc(i), g.yc(j), t).phi;
      acc += d * d;
      e.linf_phi = std::max(e.linf_phi, std::fabs(d));
    }
  e.l2_phi = std::sqrt(acc * g.cell_area());
  return e;
}

}  // namespace acns
