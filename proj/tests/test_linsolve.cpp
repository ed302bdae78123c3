#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "acns/linsolve.hpp"

using namespace acns;
using Catch::Approx;

namespace {

// 1D Poisson with a mass shift: A = tridiag(-1, 2 + c, -1), SPD.
LinearSystem shifted_poisson(int n, double c) {
  LinearSystem A;
  A.n = n;
  A.spd = true;
  A.diag.assign(n, 2.0 + c);
  A.apply = [n, c](const std::vector<double>& x, std::vector<double>& y) {
    for (int k = 0; k < n; ++k) {
      double v = (2.0 + c) * x[k];
      if (k > 0) v -= x[k - 1];
      if (k + 1 < n) v -= x[k + 1];
      y[k] = v;
    }
  };
  return A;
}

// Nonsymmetric advection-diffusion: upwind-ish off-diagonals.
LinearSystem advection(int n) {
  LinearSystem A;
  A.n = n;
  A.spd = false;
  A.diag.assign(n, 3.0);
  A.apply = [n](const std::vector<double>& x, std::vector<double>& y) {
    for (int k = 0; k < n; ++k) {
      double v = 3.0 * x[k];
      if (k > 0) v -= 1.5 * x[k - 1];
      if (k + 1 < n) v -= 0.5 * x[k + 1];
      y[k] = v;
    }
  };
  return A;
}

std::vector<double> random_vec(int n, unsigned seed) {
  std::mt19937 eng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = dist(eng);
  return v;
}

double residual_norm(const LinearSystem& A, const std::vector<double>& b,
                     const std::vector<double>& x) {
  std::vector<double> y(A.n);
  A.apply(x, y);
  for (int k = 0; k < A.n; ++k) y[k] -= b[k];
  return vec::nrm2(y);
}

}  // namespace

TEST_CASE("conjugate gradients recovers a known solution") {
  const int n = 200;
  const LinearSystem A = shifted_poisson(n, 0.1);
  const std::vector<double> x_true = random_vec(n, 1);
  std::vector<double> b(n);
  A.apply(x_true, b);

  std::vector<double> x(n, 0.0);
  const SolveResult res = solve_linear(A, b, x, 1e-12, 1000);
  CHECK(res.iterations > 0);
  for (int k = 0; k < n; ++k) CHECK(x[k] == Approx(x_true[k]).margin(1e-8));
  CHECK(residual_norm(A, b, x) <= 1e-11 * vec::nrm2(b));
}

TEST_CASE("BiCGStab recovers a known solution of a nonsymmetric system") {
  const int n = 200;
  const LinearSystem A = advection(n);
  const std::vector<double> x_true = random_vec(n, 2);
  std::vector<double> b(n);
  A.apply(x_true, b);

  std::vector<double> x(n, 0.0);
  solve_linear(A, b, x, 1e-12, 1000);
  for (int k = 0; k < n; ++k) CHECK(x[k] == Approx(x_true[k]).margin(1e-8));
}

TEST_CASE("an exact initial guess returns untouched in zero iterations") {
  const int n = 64;
  for (const bool spd : {true, false}) {
    const LinearSystem A = spd ? shifted_poisson(n, 0.5) : advection(n);
    const std::vector<double> x_true = random_vec(n, 3);
    std::vector<double> b(n);
    A.apply(x_true, b);

    std::vector<double> x = x_true;
    const SolveResult res = solve_linear(A, b, x, 1e-10, 100);
    CHECK(res.iterations == 0);
    for (int k = 0; k < n; ++k) {
      CHECK(x[k] == x_true[k]);  // bitwise
    }
  }
}

TEST_CASE("zero right-hand side with zero guess is a fixed point") {
  const int n = 32;
  const LinearSystem A = shifted_poisson(n, 0.0);
  const std::vector<double> b(n, 0.0);
  std::vector<double> x(n, 0.0);
  const SolveResult res = solve_linear(A, b, x, 1e-10, 100);
  CHECK(res.iterations == 0);
  for (double v : x) CHECK(v == 0.0);
}

TEST_CASE("iteration budget exhaustion reports the residual") {
  const int n = 400;
  const LinearSystem A = shifted_poisson(n, 0.0);  // ill-conditioned enough
  const std::vector<double> b = random_vec(n, 4);
  std::vector<double> x(n, 0.0);
  try {
    solve_linear(A, b, x, 1e-14, 2);
    FAIL("expected SolveFailure");
  } catch (const SolveFailure& e) {
    CHECK(e.iterations >= 2);
    CHECK(e.residual > 0.0);
  }
}

TEST_CASE("extra residual predicate tightens acceptance") {
  const int n = 100;
  const LinearSystem A = shifted_poisson(n, 0.3);
  const std::vector<double> b = random_vec(n, 5);

  std::vector<double> loose(n, 0.0);
  const SolveResult r1 = solve_linear(A, b, loose, 1e-4, 1000);

  const double cap = 1e-10;
  ResidualPredicate tight = [cap](const std::vector<double>& r) {
    for (double v : r)
      if (std::fabs(v) > cap) return false;
    return true;
  };
  std::vector<double> x(n, 0.0);
  const SolveResult r2 = solve_linear(A, b, x, 1e-4, 1000, tight);
  CHECK(r2.iterations > r1.iterations);

  std::vector<double> y(A.n);
  A.apply(x, y);
  for (int k = 0; k < n; ++k) CHECK(std::fabs(y[k] - b[k]) <= cap);
}

TEST_CASE("size mismatches are rejected") {
  LinearSystem A = shifted_poisson(8, 0.1);
  std::vector<double> b(8, 1.0), x(7, 0.0);
  CHECK_THROWS_AS(solve_linear(A, b, x, 1e-8, 10), std::invalid_argument);
}
