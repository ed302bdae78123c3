#pragma once

#include <cmath>

#include "acns/field.hpp"
#include "acns/params.hpp"

namespace acns {

// Second-order centered stencils on the staggered layout. All operators
// assume BC-applied inputs (ghosts valid) and write plain values; outputs on
// boundary faces, where the no-slip value is pinned, are set to 0.

inline ScalarField divergence(const Grid& g, const StaggeredVelocity& w) {
  require_match(g, w);
  ScalarField out(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (w.u(i + 1, j) - w.u(i, j)) * ihx + (w.v(i, j + 1) - w.v(i, j)) * ihy;
  return out;
}

inline StaggeredVelocity gradient(const Grid& g, const ScalarField& s) {
  require_match(g, s);
  StaggeredVelocity out(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      out.u(i, j) = (s(i, j) - s(i - 1, j)) * ihx;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.v(i, j) = (s(i, j) - s(i, j - 1)) * ihy;
  return out;
}

inline ScalarField laplacian_neumann(const Grid& g, const ScalarField& s) {
  require_match(g, s);
  ScalarField out(g);
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out(i, j) = (s(i + 1, j) - 2.0 * s(i, j) + s(i - 1, j)) * ihx2 +
                  (s(i, j + 1) - 2.0 * s(i, j) + s(i, j - 1)) * ihy2;
  return out;
}

inline StaggeredVelocity laplacian_dirichlet(const Grid& g, const StaggeredVelocity& w) {
  require_match(g, w);
  StaggeredVelocity out(g);
  const double ihx2 = 1.0 / (g.hx() * g.hx()), ihy2 = 1.0 / (g.hy() * g.hy());
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i)
      out.u(i, j) = (w.u(i + 1, j) - 2.0 * w.u(i, j) + w.u(i - 1, j)) * ihx2 +
                    (w.u(i, j + 1) - 2.0 * w.u(i, j) + w.u(i, j - 1)) * ihy2;
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      out.v(i, j) = (w.v(i + 1, j) - 2.0 * w.v(i, j) + w.v(i - 1, j)) * ihx2 +
                    (w.v(i, j + 1) - 2.0 * w.v(i, j) + w.v(i, j - 1)) * ihy2;
  return out;
}

// u . grad s at cell centers.
inline ScalarField advect_scalar(const Grid& g, const StaggeredVelocity& w,
                                 const ScalarField& s) {
  require_match(g, w);
  require_match(g, s);
  ScalarField out(g);
  const double i2hx = 0.5 / g.hx(), i2hy = 0.5 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double uc = 0.5 * (w.u(i, j) + w.u(i + 1, j));
      const double vc = 0.5 * (w.v(i, j) + w.v(i, j + 1));
      out(i, j) = uc * (s(i + 1, j) - s(i - 1, j)) * i2hx +
                  vc * (s(i, j + 1) - s(i, j - 1)) * i2hy;
    }
  return out;
}

// u . grad u at faces (advecting field = advected field).
inline StaggeredVelocity advect_velocity(const Grid& g, const StaggeredVelocity& w) {
  require_match(g, w);
  StaggeredVelocity out(g);
  const double i2hx = 0.5 / g.hx(), i2hy = 0.5 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double vf = 0.25 * (w.v(i - 1, j) + w.v(i, j) + w.v(i - 1, j + 1) + w.v(i, j + 1));
      out.u(i, j) = w.u(i, j) * (w.u(i + 1, j) - w.u(i - 1, j)) * i2hx +
                    vf * (w.u(i, j + 1) - w.u(i, j - 1)) * i2hy;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double uf = 0.25 * (w.u(i, j - 1) + w.u(i + 1, j - 1) + w.u(i, j) + w.u(i + 1, j));
      out.v(i, j) = uf * (w.v(i + 1, j) - w.v(i - 1, j)) * i2hx +
                    w.v(i, j) * (w.v(i, j + 1) - w.v(i, j - 1)) * i2hy;
    }
  return out;
}

// Capillary force -lambda (lap phi) grad phi at faces; the |grad phi|^2/2
// remainder of the stress divergence is carried by the pressure.
inline StaggeredVelocity capillary_force(const Grid& g, const ScalarField& phase,
                                         const Params& p) {
  require_match(g, phase);
  ScalarField lap = laplacian_neumann(g, phase);
  StaggeredVelocity out(g);
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double lf = 0.5 * (lap(i - 1, j) + lap(i, j));
      out.u(i, j) = -p.lambda * lf * (phase(i, j) - phase(i - 1, j)) * ihx;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double lf = 0.5 * (lap(i, j - 1) + lap(i, j));
      out.v(i, j) = -p.lambda * lf * (phase(i, j) - phase(i, j - 1)) * ihy;
    }
  return out;
}

// ---- quadrature: inner products and norms -------------------------------

inline double dot_cells(const Grid& g, const ScalarField& a, const ScalarField& b) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += a(i, j) * b(i, j);
  return s * g.cell_area();
}

inline double norm2_cells(const Grid& g, const ScalarField& a) { return dot_cells(g, a, a); }

inline double dot_faces(const Grid& g, const StaggeredVelocity& a,
                        const StaggeredVelocity& b) {
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) s += a.u(i, j) * b.u(i, j);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += a.v(i, j) * b.v(i, j);
  return s * g.cell_area();
}

inline double norm2_faces(const Grid& g, const StaggeredVelocity& a) {
  return dot_faces(g, a, a);
}

// ||grad s||^2 over interior faces; summation-by-parts exact:
// <laplacian_neumann(s), s> = -grad_norm2_scalar(s) for BC-applied s.
inline double grad_norm2_scalar(const Grid& g, const ScalarField& s) {
  double acc = 0.0;
  const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
  for (int j = 0; j < g.ny; ++j)
    for (int i = 1; i < g.nx; ++i) {
      const double d = (s(i, j) - s(i - 1, j)) * ihx;
      acc += d * d;
    }
  for (int j = 1; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (s(i, j) - s(i, j - 1)) * ihy;
      acc += d * d;
    }
  return acc * g.cell_area();
}

// ||grad u||^2 with wall rows at half weight and wall gradient 2 u/h (the
// reflection value); summation-by-parts exact against laplacian_dirichlet:
// <laplacian_dirichlet(w), w> = -grad_norm2_velocity(w) for no-slip w.
inline double grad_norm2_velocity(const Grid& g, const StaggeredVelocity& w) {
  const double hx = g.hx(), hy = g.hy();
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w.u(i + 1, j) - w.u(i, j)) / hx;
      acc += d * d;
    }
  for (int i = 0; i <= g.nx; ++i) {
    for (int j = 1; j < g.ny; ++j) {
      const double d = (w.u(i, j) - w.u(i, j - 1)) / hy;
      acc += d * d;
    }
    const double dw0 = 2.0 * w.u(i, 0) / hy, dw1 = 2.0 * w.u(i, g.ny - 1) / hy;
    acc += 0.5 * (dw0 * dw0 + dw1 * dw1);
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = (w.v(i, j + 1) - w.v(i, j)) / hy;
      acc += d * d;
    }
  for (int j = 0; j <= g.ny; ++j) {
    for (int i = 1; i < g.nx; ++i) {
      const double d = (w.v(i, j) - w.v(i - 1, j)) / hx;
      acc += d * d;
    }
    const double dw0 = 2.0 * w.v(0, j) / hx, dw1 = 2.0 * w.v(g.nx - 1, j) / hx;
    acc += 0.5 * (dw0 * dw0 + dw1 * dw1);
  }
  return acc * g.cell_area();
}

// Mixed integrands (density-weighted speed) are averaged to cell centers.
inline double norm2_weighted_center(const Grid& g, const StaggeredVelocity& w,
                                    const ScalarField& weight) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double uc = 0.5 * (w.u(i, j) + w.u(i + 1, j));
      const double vc = 0.5 * (w.v(i, j) + w.v(i, j + 1));
      acc += weight(i, j) * (uc * uc + vc * vc);
    }
  return acc * g.cell_area();
}

// |u|^2 averaged to cell centers.
inline ScalarField speed2_centers(const Grid& g, const StaggeredVelocity& w) {
  require_match(g, w);
  ScalarField out(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double uc = 0.5 * (w.u(i, j) + w.u(i + 1, j));
      const double vc = 0.5 * (w.v(i, j) + w.v(i, j + 1));
      out(i, j) = uc * uc + vc * vc;
    }
  return out;
}

inline double max_abs_cells(const Grid& g, const ScalarField& s) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m = std::max(m, std::fabs(s(i, j)));
  return m;
}

inline double max_abs_faces(const Grid& g, const StaggeredVelocity& w) {
  double m = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) m = std::max(m, std::fabs(w.u(i, j)));
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) m = std::max(m, std::fabs(w.v(i, j)));
  return m;
}

inline double mean_cells(const Grid& g, const ScalarField& s) {
  double acc = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) acc += s(i, j);
  return acc / (static_cast<double>(g.nx) * g.ny);
}

// rho(phi) evaluated everywhere, ghosts included (phase must be BC-applied).
inline ScalarField rho_field(const Grid& g, const ScalarField& phase, const Params& p) {
  require_match(g, phase);
  ScalarField out(g);
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i) out(i, j) = p.rho(phase(i, j));
  return out;
}

}  // namespace acns
