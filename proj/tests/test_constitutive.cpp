#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "acns/params.hpp"

using acns::Branch;
using acns::Params;
using Catch::Approx;

TEST_CASE("density interpolates the two fluids") {
  Params p;
  CHECK(p.rho(-1.0) == 1.0);
  CHECK(p.rho(1.0) == 3.0);
  CHECK(p.rho_max() == p.rho2);
}

TEST_CASE("density minimum is the harmonic-type constant") {
  Params p;
  CHECK(p.rho_min() == Approx(0.75).margin(1e-15));

  const double phi_star = -(p.rho2 - p.rho1) / (p.rho1 + p.rho2);
  CHECK(p.rho(phi_star) == Approx(p.rho_min()).margin(1e-15));

  double sweep_min = p.rho(-1.0), sweep_max = p.rho(-1.0);
  for (int k = 0; k <= 2000; ++k) {
    const double v = p.rho(-1.0 + k * 1e-3);
    sweep_min = std::min(sweep_min, v);
    sweep_max = std::max(sweep_max, v);
  }
  CHECK(sweep_min >= p.rho_min() - 1e-12);
  CHECK(sweep_min <= p.rho_min() + 1e-6);
  CHECK(sweep_max <= p.rho_max() + 1e-12);
}

TEST_CASE("completed-square form agrees with the definition") {
  Params p;
  p.rho1 = 0.7;
  p.rho2 = 4.2;
  std::mt19937 eng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int k = 0; k < 1000; ++k) {
    const double phi = dist(eng);
    CHECK(p.rho_square_form(phi) == Approx(p.rho(phi)).epsilon(1e-13));
  }
}

TEST_CASE("double-well derivative at frozen points") {
  Params p;
  CHECK(p.f_prime(0.5) == Approx(-37.5).margin(1e-12));  // eps = 0.1
  CHECK(p.f_prime(1.0) == 0.0);
  CHECK(p.f_prime(-1.0) == 0.0);
  CHECK(p.f(0.0) == Approx(25.0).margin(1e-12));

  p.epsilon = 1.0;
  CHECK(p.f_prime(0.5) == Approx(-0.375).margin(1e-16));
  CHECK(p.f_prime(2.0) == Approx(6.0).margin(1e-12));
}

TEST_CASE("phi rho'(phi) is nonnegative outside [-1, 1]") {
  Params p;
  CHECK(2.0 * p.rho_prime(2.0) == Approx(10.0).margin(1e-12));
  for (int k = 0; k <= 300; ++k) {
    const double phi = 1.0 + k * 0.01;
    CHECK(phi * p.rho_prime(phi) >= 0.0);
    CHECK(-phi * p.rho_prime(-phi) >= 0.0);
  }
}

TEST_CASE("damping split of the potential derivative is exact") {
  for (const Branch b : {Branch::plus, Branch::minus}) {
    Params p;
    p.branch = b;
    const double s = acns::branch_sign(b);
    const double e2 = p.epsilon * p.epsilon;
    std::mt19937 eng(b == Branch::plus ? 1 : 2);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int k = 0; k < 10000; ++k) {
      const double v = dist(eng);
      const double lhs = p.f_prime(v + s);
      const double rhs = (2.0 / e2) * v + p.h(v);
      const double scale = std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("perturbation-side quantities") {
  Params plus;
  Params minus;
  minus.branch = Branch::minus;
  CHECK(plus.varrho(0.0) == 3.0);   // rho(+1)
  CHECK(minus.varrho(0.0) == 1.0);  // rho(-1)
  CHECK(plus.varrho_prime(0.0) == plus.rho_prime(1.0));
  CHECK(minus.varrho_prime(0.0) == minus.rho_prime(-1.0));

  Params unit;
  unit.gamma = unit.lambda = unit.epsilon = 1.0;
  CHECK(unit.mu0() == 3.0);
  CHECK(unit.mu1() == 4.0);
  CHECK(unit.mu2() == 3.0);
  CHECK(unit.h(1.0) == 4.0);  // (1 + 3)/1 on the plus branch
}

TEST_CASE("validation rejects bad parameter sets") {
  Params p;
  CHECK_NOTHROW(p.validate());

  p.rho1 = 3.0;
  p.rho2 = 1.0;
  CHECK_THROWS_WITH(p.validate(), "rho1 < rho2 required");

  p = Params{};
  p.mu = 0.0;
  CHECK_THROWS_WITH(p.validate(), "mu must be > 0");

  p = Params{};
  p.epsilon = -0.1;
  CHECK_THROWS_WITH(p.validate(), "epsilon must be > 0");
}
