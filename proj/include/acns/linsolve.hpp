#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace acns {

class SolveFailure : public std::runtime_error {
 public:
  SolveFailure(const std::string& msg, double residual_, int iterations_)
      : std::runtime_error(msg + " (residual " + std::to_string(residual_) +
                           " after " + std::to_string(iterations_) + " iterations)"),
        residual(residual_), iterations(iterations_) {}
  double residual;
  int iterations;
};

struct SolveResult {
  int iterations = 0;
  double residual = 0.0;
};

// Matrix-free descriptor. apply computes y = A x; diag holds the Jacobi
// preconditioner; spd selects conjugate gradients vs BiCGStab.
struct LinearSystem {
  int n = 0;
  std::function<void(const std::vector<double>&, std::vector<double>&)> apply;
  std::vector<double> diag;
  bool spd = false;
};

// Optional extra acceptance test on the residual vector (used to enforce
// max-norm contracts on top of the relative L2 criterion).
using ResidualPredicate = std::function<bool(const std::vector<double>&)>;

namespace vec {
inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}
inline double nrm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }
}  // namespace vec

namespace detail {

inline bool accepted(const std::vector<double>& r, double rnorm, double target,
                     const ResidualPredicate& extra) {
  if (!(rnorm <= target)) return false;  // NaN residual is never accepted
  return !extra || extra(r);
}

inline SolveResult pcg(const LinearSystem& A, const std::vector<double>& b,
                       std::vector<double>& x, double tol, int max_iter,
                       const ResidualPredicate& extra) {
  const int n = A.n;
  std::vector<double> r(n), z(n), p(n), q(n);
  A.apply(x, q);
  for (int k = 0; k < n; ++k) r[k] = b[k] - q[k];
  const double target = tol * vec::nrm2(b);
  double rnorm = vec::nrm2(r);
  if (accepted(r, rnorm, target, extra)) return {0, rnorm};

  for (int k = 0; k < n; ++k) z[k] = r[k] / A.diag[k];
  p = z;
  double rz = vec::dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    A.apply(p, q);
    const double pq = vec::dot(p, q);
    if (pq == 0.0) throw SolveFailure("pcg breakdown", rnorm, it);
    const double alpha = rz / pq;
    for (int k = 0; k < n; ++k) x[k] += alpha * p[k];
    for (int k = 0; k < n; ++k) r[k] -= alpha * q[k];
    rnorm = vec::nrm2(r);
    if (accepted(r, rnorm, target, extra)) return {it, rnorm};
    for (int k = 0; k < n; ++k) z[k] = r[k] / A.diag[k];
    const double rz_new = vec::dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
  }
  throw SolveFailure("pcg did not converge", rnorm, max_iter);
}

inline SolveResult bicgstab(const LinearSystem& A, const std::vector<double>& b,
                            std::vector<double>& x, double tol, int max_iter,
                            const ResidualPredicate& extra) {
  const int n = A.n;
  std::vector<double> r(n), rhat(n), p(n, 0.0), v(n, 0.0), s(n), t(n), phat(n), shat(n);
  A.apply(x, t);
  for (int k = 0; k < n; ++k) r[k] = b[k] - t[k];
  const double target = tol * vec::nrm2(b);
  double rnorm = vec::nrm2(r);
  if (accepted(r, rnorm, target, extra)) return {0, rnorm};

  rhat = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double rho_new = vec::dot(rhat, r);
    if (rho_new == 0.0) throw SolveFailure("bicgstab breakdown", rnorm, it);
    const double beta = (rho_new / rho) * (alpha / omega);
    for (int k = 0; k < n; ++k) p[k] = r[k] + beta * (p[k] - omega * v[k]);
    for (int k = 0; k < n; ++k) phat[k] = p[k] / A.diag[k];
    A.apply(phat, v);
    const double rhv = vec::dot(rhat, v);
    if (rhv == 0.0) throw SolveFailure("bicgstab breakdown", rnorm, it);
    alpha = rho_new / rhv;
    for (int k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
    rnorm = vec::nrm2(s);
    if (accepted(s, rnorm, target, extra)) {
      for (int k = 0; k < n; ++k) x[k] += alpha * phat[k];
      return {it, rnorm};
    }
    for (int k = 0; k < n; ++k) shat[k] = s[k] / A.diag[k];
    A.apply(shat, t);
    const double tt = vec::dot(t, t);
    if (tt == 0.0) throw SolveFailure("bicgstab breakdown", rnorm, it);
    omega = vec::dot(t, s) / tt;
    for (int k = 0; k < n; ++k) x[k] += alpha * phat[k] + omega * shat[k];
    for (int k = 0; k < n; ++k) r[k] = s[k] - omega * t[k];
    rnorm = vec::nrm2(r);
    if (accepted(r, rnorm, target, extra)) return {it, rnorm};
    if (omega == 0.0) throw SolveFailure("bicgstab stagnation", rnorm, it);
    rho = rho_new;
  }
  throw SolveFailure("bicgstab did not converge", rnorm, max_iter);
}

}  // namespace detail

// Solves A x = b to ||b - A x|| <= tol ||b|| starting from the provided x.
// When the initial guess already satisfies the criterion, x is returned
// untouched (exact equilibria are bitwise fixed points of the stepper).
inline SolveResult solve_linear(const LinearSystem& A, const std::vector<double>& b,
                                std::vector<double>& x, double tol, int max_iter,
                                const ResidualPredicate& extra = {}) {
  if (static_cast<int>(b.size()) != A.n || static_cast<int>(x.size()) != A.n ||
      static_cast<int>(A.diag.size()) != A.n)
    throw std::invalid_argument("solve_linear: size mismatch");
  return A.spd ? detail::pcg(A, b, x, tol, max_iter, extra)
               : detail::bicgstab(A, b, x, tol, max_iter, extra);
}

}  // namespace acns
