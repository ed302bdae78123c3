#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "acns/field.hpp"
#include "acns/operators.hpp"
#include "acns/params.hpp"

using namespace acns;
using Catch::Approx;

namespace {

ScalarField random_cells(const Grid& g, std::mt19937& eng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField s(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s(i, j) = dist(eng);
  apply_bc_neumann(g, s);
  return s;
}

StaggeredVelocity random_velocity(const Grid& g, std::mt19937& eng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  StaggeredVelocity w(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i <= g.nx; ++i) w.u(i, j) = dist(eng);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w.v(i, j) = dist(eng);
  apply_bc_velocity(g, w);
  return w;
}

}  // namespace

TEST_CASE("divergence and gradient are negative adjoints") {
  const Grid g{64, 64, 1.3, 0.9};
  std::mt19937 eng(42);
  for (int rep = 0; rep < 10; ++rep) {
    const StaggeredVelocity w = random_velocity(g, eng);
    const ScalarField q = random_cells(g, eng);
    const double a = dot_cells(g, divergence(g, w), q);
    const double b = dot_faces(g, w, gradient(g, q));
    const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
    CHECK(std::fabs(a + b) <= 1e-12 * scale);
  }
}

TEST_CASE("Neumann Laplacian is the divergence of the gradient") {
  const Grid g{48, 40, 1.0, 1.0};
  std::mt19937 eng(5);
  const ScalarField q = random_cells(g, eng);
  const ScalarField d = divergence(g, gradient(g, q));
  const ScalarField l = laplacian_neumann(g, q);
  const double scale = max_abs_cells(g, l);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(std::fabs(d(i, j) - l(i, j)) <= 1e-10 * scale);
}

TEST_CASE("Neumann quadratic form equals minus the gradient energy") {
  const Grid g{32, 48, 2.0, 1.0};
  std::mt19937 eng(11);
  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField s = random_cells(g, eng);
    const double a = dot_cells(g, laplacian_neumann(g, s), s);
    const double b = grad_norm2_scalar(g, s);
    CHECK(std::fabs(a + b) <= 1e-12 * std::max(1.0, b));
  }
}

TEST_CASE("Dirichlet quadratic form equals minus the velocity gradient energy") {
  const Grid g{32, 32, 1.0, 1.5};
  std::mt19937 eng(13);
  for (int rep = 0; rep < 5; ++rep) {
    const StaggeredVelocity w = random_velocity(g, eng);
    const double a = dot_faces(g, laplacian_dirichlet(g, w), w);
    const double b = grad_norm2_velocity(g, w);
    CHECK(std::fabs(a + b) <= 1e-12 * std::max(1.0, b));
  }
}

TEST_CASE("Neumann Laplacian has zero mean") {
  const Grid g{64, 64, 1.0, 1.0};
  std::mt19937 eng(17);
  for (int rep = 0; rep < 5; ++rep) {
    const ScalarField s = random_cells(g, eng);
    CHECK(std::fabs(mean_cells(g, laplacian_neumann(g, s))) <= 1e-12);
  }
}

TEST_CASE("Laplacian is exact on quadratics") {
  const Grid g{24, 24, 1.0, 1.0};
  ScalarField s(g);
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i) {
      const double x = g.xc(i), y = g.yc(j);
      s(i, j) = x * x + y * y;  // ghosts carry the exact extension
    }
  const ScalarField l = laplacian_neumann(g, s);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(l(i, j) == Approx(4.0).margin(1e-9));
}

TEST_CASE("Neumann Laplacian converges at second order") {
  const double pi = std::numbers::pi;
  auto max_error = [&](int n) {
    const Grid g{n, n, 1.0, 1.0};
    ScalarField s(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        s(i, j) = std::cos(pi * g.xc(i)) * std::cos(pi * g.yc(j));
    apply_bc_neumann(g, s);
    const ScalarField l = laplacian_neumann(g, s);
    double err = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        err = std::max(err, std::fabs(l(i, j) + 2.0 * pi * pi * s(i, j)));
    return err;
  };
  const double e32 = max_error(32), e64 = max_error(64);
  CHECK(e32 / e64 == Approx(4.0).margin(0.7));
}

TEST_CASE("advection of a linear scalar by a uniform flow") {
  const Grid g{16, 20, 1.0, 2.0};
  StaggeredVelocity w(g);
  for (double& x : w.uraw()) x = 0.7;
  for (double& x : w.vraw()) x = -0.3;
  ScalarField s(g);
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i) s(i, j) = 2.0 * g.xc(i) - 5.0 * g.yc(j);
  const ScalarField a = advect_scalar(g, w, s);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      CHECK(a(i, j) == Approx(0.7 * 2.0 + (-0.3) * (-5.0)).margin(1e-11));
}

TEST_CASE("advection vanishes on uniform fields") {
  const Grid g{12, 12, 1.0, 1.0};
  StaggeredVelocity w(g);
  for (double& x : w.uraw()) x = 1.3;
  for (double& x : w.vraw()) x = -2.1;
  ScalarField s(g, 0.8);
  const ScalarField a = advect_scalar(g, w, s);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(a(i, j) == 0.0);
  const StaggeredVelocity adv = advect_velocity(g, w);
  CHECK(max_abs_faces(g, adv) == 0.0);
}

TEST_CASE("capillary force vanishes for uniform phase") {
  const Grid g{12, 12, 1.0, 1.0};
  const Params p;
  const ScalarField s(g, 0.4);
  const StaggeredVelocity f = capillary_force(g, s, p);
  CHECK(max_abs_faces(g, f) == 0.0);
}

TEST_CASE("capillary force of a 1D profile has no transverse component") {
  const Grid g{32, 32, 1.0, 1.0};
  Params p;
  p.lambda = 0.02;
  ScalarField s(g);
  for (int j = -1; j <= g.ny; ++j)
    for (int i = -1; i <= g.nx; ++i) s(i, j) = std::tanh((g.xc(i) - 0.5) / 0.1);
  const StaggeredVelocity f = capillary_force(g, s, p);
  for (int j = 0; j <= g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(f.v(i, j) == 0.0);

  // spot-check one u-face against the hand evaluation of the stencil
  const ScalarField lap = laplacian_neumann(g, s);
  const int i = 10, j = 7;
  const double expect =
      -p.lambda * 0.5 * (lap(i - 1, j) + lap(i, j)) * (s(i, j) - s(i - 1, j)) / g.hx();
  CHECK(f.u(i, j) == Approx(expect).margin(1e-15));
}

TEST_CASE("weighted center norm is the weighted integral of the center speed") {
  const Grid g{24, 24, 1.0, 1.0};
  std::mt19937 eng(23);
  const StaggeredVelocity w = random_velocity(g, eng);
  ScalarField rho(g);
  std::uniform_real_distribution<double> dist(0.5, 3.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) rho(i, j) = dist(eng);
  const double a = norm2_weighted_center(g, w, rho);
  const double b = dot_cells(g, rho, speed2_centers(g, w));
  CHECK(a == Approx(b).epsilon(1e-12));
}

TEST_CASE("weighted center norm of a uniform flow") {
  const Grid g{8, 8, 2.0, 1.0};
  StaggeredVelocity w(g);
  for (double& x : w.uraw()) x = 3.0;
  for (double& x : w.vraw()) x = 4.0;
  const ScalarField rho(g, 2.5);
  CHECK(norm2_weighted_center(g, w, rho) == Approx(2.5 * 25.0 * 2.0).margin(1e-10));
}

TEST_CASE("speed squared at centers for a uniform flow") {
  const Grid g{8, 8, 1.0, 1.0};
  StaggeredVelocity w(g);
  for (double& x : w.uraw()) x = 3.0;
  for (double& x : w.vraw()) x = 4.0;
  const ScalarField sp2 = speed2_centers(g, w);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) CHECK(sp2(i, j) == Approx(25.0).margin(1e-13));
}

TEST_CASE("size mismatches are rejected") {
  const Grid g{8, 8, 1.0, 1.0};
  const Grid g2{16, 8, 1.0, 1.0};
  const ScalarField s(g2);
  CHECK_THROWS_AS(laplacian_neumann(g, s), std::invalid_argument);
  const StaggeredVelocity w(g2);
  CHECK_THROWS_AS(divergence(g, w), std::invalid_argument);
}
