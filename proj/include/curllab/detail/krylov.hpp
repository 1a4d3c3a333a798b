#pragma once

// Generic preconditioned Krylov solvers over any vector type with
// a + b, a - b, double * a and a caller-supplied inner product.

#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace curllab::detail {

struct KrylovReport {
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Conjugate gradients for a symmetric positive definite operator.
template <class Vec, class Op, class Prec, class Dot>
Vec pcg(const Op& op, const Prec& precond, const Dot& dot, const Vec& rhs, Vec x, double rel_tol, int max_iter,
        const std::string& what, KrylovReport* report = nullptr) {
  Vec r = rhs - op(x);
  const double bnorm = std::sqrt(dot(rhs, rhs));
  if (bnorm == 0.0) return x;
  Vec z = precond(r);
  Vec p = z;
  double rz = dot(r, z);
  double rnorm = std::sqrt(dot(r, r));
  int it = 0;
  for (; it < max_iter && rnorm > rel_tol * bnorm; ++it) {
    const Vec ap = op(p);
    const double denom = dot(p, ap);
    if (!(denom > 0.0)) break;
    const double step = rz / denom;
    x = x + step * p;
    r = r - step * ap;
    rnorm = std::sqrt(dot(r, r));
    if (rnorm <= rel_tol * bnorm) {
      ++it;
      break;
    }
    z = precond(r);
    const double rz_new = dot(r, z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  if (report) *report = {it, rnorm / bnorm};
  // Round-off can stall the residual slightly above very tight targets.
  if (rnorm > std::max(rel_tol, 1e-10) * bnorm)
    throw NonConvergence("conjugate gradients did not converge for " + what + " after " + std::to_string(it) +
                         " iterations (relative residual " + std::to_string(rnorm / bnorm) + ")");
  return x;
}

/// Preconditioned MINRES for a symmetric, possibly indefinite operator with a
/// symmetric positive definite preconditioner.
template <class Vec, class Op, class Prec, class Dot>
Vec minres(const Op& op, const Prec& precond, const Dot& dot, const Vec& rhs, double rel_tol, int max_iter,
           const std::string& what, KrylovReport* report = nullptr) {
  Vec x = 0.0 * rhs;
  Vec r1 = rhs;
  Vec y = precond(r1);
  const double beta1 = std::sqrt(std::max(0.0, dot(r1, y)));
  if (beta1 == 0.0) return x;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1;
  double cs = -1.0, sn = 0.0;
  Vec w = 0.0 * rhs, w2 = 0.0 * rhs;
  Vec r2 = r1;
  int it = 0;
  for (; it < max_iter; ++it) {
    const Vec v = (1.0 / beta) * y;
    y = op(v);
    if (it >= 1) y = y - (beta / oldb) * r1;
    const double alfa = dot(v, y);
    y = y - (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    y = precond(r2);
    oldb = beta;
    beta = std::sqrt(std::max(0.0, dot(r2, y)));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::min());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    const Vec w1 = w2;
    w2 = w;
    w = (1.0 / gamma) * (v - oldeps * w1 - delta * w2);
    x = x + phi * w;
    if (phibar <= rel_tol * beta1 || beta == 0.0) {
      ++it;
      break;
    }
  }
  if (report) *report = {it, phibar / beta1};
  if (phibar > std::max(rel_tol, 1e-10) * beta1)
    throw NonConvergence("MINRES did not converge for " + what + " after " + std::to_string(it) +
                         " iterations (relative residual " + std::to_string(phibar / beta1) + ")");
  return x;
}

}  // namespace curllab::detail
