#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace acns {

// Uniform MAC-staggered grid on [0,lx] x [0,ly].
//
// Cell (i,j), i in [0,nx), j in [0,ny), has its center at ((i+1/2)hx, (j+1/2)hy).
// u lives on vertical faces (i*hx, (j+1/2)hy), i in [0,nx]; v on horizontal
// faces ((i+1/2)hx, j*hy), j in [0,ny]. Scalars carry one ghost layer per
// side; u carries ghost rows (j = -1, ny), v ghost columns (i = -1, nx).
struct Grid {
  int nx = 64, ny = 64;
  double lx = 1.0, ly = 1.0;

  void validate() const {
    if (nx < 4 || ny < 4) throw std::invalid_argument("nx, ny must be >= 4");
    if (!(lx > 0.0) || !(ly > 0.0)) throw std::invalid_argument("lx, ly must be > 0");
  }

  double hx() const { return lx / nx; }
  double hy() const { return ly / ny; }
  double cell_area() const { return hx() * hy(); }

  double xc(int i) const { return (i + 0.5) * hx(); }
  double yc(int j) const { return (j + 0.5) * hy(); }
  double xu(int i) const { return i * hx(); }
  double yu(int j) const { return (j + 0.5) * hy(); }
  double xv(int i) const { return (i + 0.5) * hx(); }
  double yv(int j) const { return j * hy(); }

  bool operator==(const Grid&) const = default;
};

// Cell-centered scalar with one ghost layer; index range i,j in [-1, n].
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : nx_(g.nx), ny_(g.ny), data_((g.nx + 2) * (g.ny + 2), fill) {}

  double& operator()(int i, int j) { return data_[idx(i, j)]; }
  double operator()(int i, int j) const { return data_[idx(i, j)]; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::vector<double>& raw() { return data_; }
  const std::vector<double>& raw() const { return data_; }

  bool matches(const Grid& g) const { return nx_ == g.nx && ny_ == g.ny; }

 private:
  int idx(int i, int j) const { return (j + 1) * (nx_ + 2) + (i + 1); }
  int nx_ = 0, ny_ = 0;
  std::vector<double> data_;
};

// MAC velocity. u(i,j): i in [0,nx], j in [-1,ny]; v(i,j): i in [-1,nx], j in [0,ny].
class StaggeredVelocity {
 public:
  StaggeredVelocity() = default;
  explicit StaggeredVelocity(const Grid& g)
      : nx_(g.nx), ny_(g.ny),
        u_((g.nx + 1) * (g.ny + 2), 0.0),
        v_((g.nx + 2) * (g.ny + 1), 0.0) {}

  double& u(int i, int j) { return u_[uidx(i, j)]; }
  double u(int i, int j) const { return u_[uidx(i, j)]; }
  double& v(int i, int j) { return v_[vidx(i, j)]; }
  double v(int i, int j) const { return v_[vidx(i, j)]; }

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  std::vector<double>& uraw() { return u_; }
  const std::vector<double>& uraw() const { return u_; }
  std::vector<double>& vraw() { return v_; }
  const std::vector<double>& vraw() const { return v_; }

  bool matches(const Grid& g) const { return nx_ == g.nx && ny_ == g.ny; }

 private:
  int uidx(int i, int j) const { return (j + 1) * (nx_ + 1) + i; }
  int vidx(int i, int j) const { return j * (nx_ + 2) + (i + 1); }
  int nx_ = 0, ny_ = 0;
  std::vector<double> u_, v_;
};

struct SimState {
  StaggeredVelocity velocity;
  ScalarField pressure;
  ScalarField phase;
  double time = 0.0;

  SimState() = default;
  explicit SimState(const Grid& g)
      : velocity(g), pressure(g), phase(g) {}
};

inline void require_match(const Grid& g, const ScalarField& s) {
  if (!s.matches(g)) throw std::invalid_argument("scalar field size mismatch");
}

inline void require_match(const Grid& g, const StaggeredVelocity& w) {
  if (!w.matches(g)) throw std::invalid_argument("velocity field size mismatch");
}

// No-slip walls: normal faces exactly 0, tangential ghosts by linear
// reflection so the interpolated wall value vanishes.
inline void apply_bc_velocity(const Grid& g, StaggeredVelocity& w) {
  require_match(g, w);
  for (int j = 0; j < g.ny; ++j) {
    w.u(0, j) = 0.0;
    w.u(g.nx, j) = 0.0;
  }
  for (int i = 0; i <= g.nx; ++i) {
    w.u(i, -1) = -w.u(i, 0);
    w.u(i, g.ny) = -w.u(i, g.ny - 1);
  }
  for (int i = 0; i < g.nx; ++i) {
    w.v(i, 0) = 0.0;
    w.v(i, g.ny) = 0.0;
  }
  for (int j = 0; j <= g.ny; ++j) {
    w.v(-1, j) = -w.v(0, j);
    w.v(g.nx, j) = -w.v(g.nx - 1, j);
  }
}

// Homogeneous Neumann ghosts: mirror the adjacent interior cell; corners
// doubly mirrored.
inline void apply_bc_neumann(const Grid& g, ScalarField& s) {
  require_match(g, s);
  for (int j = 0; j < g.ny; ++j) {
    s(-1, j) = s(0, j);
    s(g.nx, j) = s(g.nx - 1, j);
  }
  for (int i = -1; i <= g.nx; ++i) {
    s(i, -1) = s(i, 0);
    s(i, g.ny) = s(i, g.ny - 1);
  }
}

inline void apply_bc(const Grid& g, SimState& st) {
  apply_bc_velocity(g, st.velocity);
  apply_bc_neumann(g, st.pressure);
  apply_bc_neumann(g, st.phase);
}

inline bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline bool all_finite(const SimState& st) {
  return all_finite(st.velocity.uraw()) && all_finite(st.velocity.vraw()) &&
         all_finite(st.pressure.raw()) && all_finite(st.phase.raw());
}

}  // namespace acns
