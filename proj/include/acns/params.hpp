#pragma once

#include <stdexcept>
#include <string>

namespace acns {

// Which equilibrium the perturbed formulation expands around: phi = +1 or -1.
enum class Branch { plus, minus };

inline double branch_sign(Branch b) { return b == Branch::plus ? 1.0 : -1.0; }

// Physical constants of the diffuse-interface model.
//
//   rho(phi) = 1/4 rho1 (phi-1)^2 + 1/4 rho2 (phi+1)^2,  rho(-1) = rho1, rho(1) = rho2
//   f(phi)   = (phi^2 - 1)^2 / (4 eps^2)
//
// All functions are defined for every real phi; the discrete scheme may
// overshoot [-1, 1] slightly and s rho'(s) >= 0 outside keeps that benign.
struct Params {
  double rho1 = 1.0;     // density carried by phi = -1
  double rho2 = 3.0;     // density carried by phi = +1, rho1 < rho2
  double mu = 1.0;       // viscosity
  double lambda = 0.01;  // capillary energy coefficient
  double gamma = 1.0;    // phase relaxation coefficient
  double epsilon = 0.1;  // interface width
  double kappa = 1e-2;   // weight of the pressure term in D_0
  Branch branch = Branch::plus;

  bool operator==(const Params&) const = default;

  void validate() const {
    auto positive = [](double v, const char* name) {
      if (!(v > 0.0))
        throw std::invalid_argument(std::string(name) + " must be > 0");
    };
    positive(rho1, "rho1");
    positive(rho2, "rho2");
    positive(mu, "mu");
    positive(lambda, "lambda");
    positive(gamma, "gamma");
    positive(epsilon, "epsilon");
    positive(kappa, "kappa");
    if (!(rho1 < rho2)) throw std::invalid_argument("rho1 < rho2 required");
  }

  double rho(double phi) const {
    const double a = phi - 1.0, b = phi + 1.0;
    return 0.25 * (rho1 * a * a + rho2 * b * b);
  }

  double rho_prime(double phi) const {
    return 0.5 * rho1 * (phi - 1.0) + 0.5 * rho2 * (phi + 1.0);
  }

  // Completed-square form of the same parabola; equals rho() identically.
  double rho_square_form(double phi) const {
    const double c = (rho2 - rho1) / (rho1 + rho2);
    const double s = phi + c;
    return 0.25 * (rho1 + rho2) * s * s + rho_min();
  }

  // Infimum of rho over the reals, attained at phi = -(rho2-rho1)/(rho1+rho2)
  // which lies inside (-1, 0]; it is also the minimum over [-1, 1].
  double rho_min() const { return rho1 * rho2 / (rho1 + rho2); }

  // Supremum of rho over [-1, 1], attained at phi = +1.
  double rho_max() const { return rho2; }

  double f(double phi) const {
    const double w = phi * phi - 1.0;
    return w * w / (4.0 * epsilon * epsilon);
  }

  double f_prime(double phi) const {
    return (phi * phi - 1.0) * phi / (epsilon * epsilon);
  }

  // Cubic remainder of f' after the linear damping term is split off:
  //   f'(v +- 1) = (2/eps^2) v + h(v),   h(v) = (v^3 +- 3 v^2)/eps^2.
  double h(double v) const {
    const double s = branch_sign(branch);
    return (v * v * v + s * 3.0 * v * v) / (epsilon * epsilon);
  }

  // Density as seen by the perturbation: varrho(v) = rho(v +- 1).
  double varrho(double v) const { return rho(v + branch_sign(branch)); }
  double varrho_prime(double v) const { return rho_prime(v + branch_sign(branch)); }

  // Weights of the global perturbation functionals.
  double mu0() const { return 1.0 + 2.0 * gamma * lambda / (epsilon * epsilon); }
  double mu1() const { return mu0() + gamma * lambda; }
  double mu2() const { return gamma * lambda + 2.0 * gamma * lambda / (epsilon * epsilon); }
};

}  // namespace acns
