#pragma once

// Exterior calculus on the flat-coordinate torus with a Fourier metric.
//
// Orientation is dx^dy^dz. With these conventions the flat curl of a 1-form
// coincides with the components of its exterior derivative, and
// *d alpha = lambda alpha is the usual curl eigenproblem for flat g.

#include "curllab/fourier_field.hpp"
#include "curllab/grid.hpp"
#include "curllab/metric.hpp"

#include <Eigen/Dense>

#include <memory>

namespace curllab::fields {

/// Exact exterior derivative in coefficient space (rank 0 or 1 input).
FourierField exterior_d(const FourierField& field);

/// Pointwise Hodge star between 1-forms and 2-forms, re-truncated to the
/// input truncation.
FourierField hodge(const MetricField& g, const FourierField& field);

/// Index raising g^{ij} a_j, re-truncated to the input truncation.
FourierField sharp(const MetricField& g, const FourierField& alpha);
/// Index lowering g_ij u^j. Exact: the output truncation is N + metric N.
FourierField flat(const MetricField& g, const FourierField& u);

/// Codifferential of a 1-form, defined weakly by <d phi, alpha> = <phi, delta alpha>
/// for every scalar phi of the same truncation. For constant metrics this is
/// the pointwise -(1/sqrt g) d_i(sqrt g g^{ij} a_j).
FourierField codifferential(const MetricField& g, const FourierField& alpha);

/// L2 inner product of 1-forms: int g^{ij} a_i b_j sqrt(det g) dx.
double l2_inner(const MetricField& g, const FourierField& a, const FourierField& b);
double l2_norm(const MetricField& g, const FourierField& a);
/// L2 inner product of scalars: int f h sqrt(det g) dx.
double scalar_inner(const MetricField& g, const FourierField& f, const FourierField& h);

/// min over the collocation grid of |alpha ^ d alpha / dx^dy^dz|.
double contact_defect(const FourierField& alpha);

/// alpha ^ d alpha / (dx^dy^dz) evaluated at a point.
double contact_density(const FourierField& alpha, const Eigen::Vector3d& x);

/// Gram operators of the weighted inner products, in coefficient space.
///
/// For 1-forms of truncation n, apply_one_form(a) returns the coefficients of
/// P_n[W a] with W = sqrt(det g) g^{-1}, so that
/// <b, a>_g = (2 pi)^3 Re sum conj(b_m) . apply_one_form(a)_m exactly, where
/// the inner product is the grid quadrature of l2_inner. Same for scalars with
/// weight sqrt(det g).
class GramOperator {
 public:
  GramOperator(const MetricField& g, int truncation);

  int truncation() const { return n_; }
  const CollocationGrid& grid() const { return grid_; }
  const MetricField& metric() const { return g_; }

  FourierField apply_one_form(const FourierField& a) const;
  FourierField apply_scalar(const FourierField& f) const;

  /// Solves apply_one_form(x) = rhs by preconditioned conjugate gradients.
  FourierField solve_one_form(const FourierField& rhs, double rel_tol = 1e-14) const;
  FourierField solve_scalar(const FourierField& rhs, double rel_tol = 1e-14) const;

  /// Grid Fourier coefficients of W_ij up to the given truncation, packed as
  /// in MetricField.
  std::array<FourierField, 6> weight_coefficients(int truncation) const;

  /// Mean of W, used as preconditioner.
  const Eigen::Matrix3d& weight_mean() const { return mean_weight_; }
  double sqrt_det_mean() const { return mean_sqrt_det_; }

 private:
  MetricField g_;
  int n_;
  CollocationGrid grid_;
  std::shared_ptr<const MetricSamples> samples_;
  bool constant_;
  Eigen::Matrix3d mean_weight_;
  double mean_sqrt_det_;
};

/// Real inner product Re sum conj(a) b over all coefficients.
double coefficient_dot(const FourierField& a, const FourierField& b);

}  // namespace curllab::fields
