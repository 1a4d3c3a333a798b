#pragma once

// Contact forms, Reeb fields and the Beltrami/Reeb correspondence.

#include "curllab/fields.hpp"
#include "curllab/grid.hpp"
#include "curllab/metric.hpp"
#include "curllab/vector_field.hpp"

#include <Eigen/Dense>

#include <functional>
#include <vector>

namespace curllab::contact {

using fields::FourierField;
using fields::MetricField;

/// A 1-form certified contact on the collocation grid.
class ContactForm {
 public:
  /// Throws NotContact when alpha ^ d alpha vanishes or changes sign on the
  /// grid.
  explicit ContactForm(FourierField alpha);

  const FourierField& form() const { return alpha_; }
  /// min |alpha ^ d alpha| over the grid.
  double defect() const { return defect_; }
  /// Sign of alpha ^ d alpha relative to dx^dy^dz.
  int orientation() const { return orientation_; }

 private:
  FourierField alpha_;
  double defect_ = 0.0;
  int orientation_ = 1;
};

/// sin(kz) dx + cos(kz) dy, k != 0.
ContactForm tight_form(int k);

/// Frame of ker alpha at a point: e1 is the unit projection of the
/// coordinate axis `axis` onto ker alpha, e2 = alpha x e1 / (alpha . curl alpha),
/// so that d alpha(e1, e2) = 1. `alpha` and `curl` are the pointwise values of
/// the form and of its exterior derivative.
struct KernelFrame {
  Eigen::Vector3d e1;
  Eigen::Vector3d e2;
};
KernelFrame kernel_frame(const Eigen::Vector3d& alpha, const Eigen::Vector3d& curl, int axis);

/// Axis (tried in the order z, x, y) whose projection onto ker alpha stays
/// furthest from zero over the given points, together with the smallest
/// sine of the angle between that axis and alpha.
std::pair<int, double> frame_axis(const fields::PointEvaluator& alpha, const std::vector<Eigen::Vector3d>& points);

/// Grid-sampled complex structure J on ker alpha, as 2x2 matrices acting on
/// the frame of kernel_frame with axis z (or the best axis over the grid).
class AlmostComplexStructure {
 public:
  using Generator = std::function<Eigen::Matrix2d(const Eigen::Vector3d&)>;

  AlmostComplexStructure(const ContactForm& alpha, int resolution, const Generator& j);
  /// Rotation by +90 degrees in the normalized frame.
  static AlmostComplexStructure standard(const ContactForm& alpha, int resolution);

  const fields::CollocationGrid& grid() const { return grid_; }
  int axis() const { return axis_; }
  const Eigen::Matrix2d& at(std::size_t point) const { return j_[point]; }
  /// max |J^2 + I| over the grid.
  double square_defect() const;
  /// min over the grid of the smallest eigenvalue of the symmetric part of
  /// the form (v, w) -> d alpha(v, J w); positive for compatible J.
  double taming() const;

 private:
  fields::CollocationGrid grid_;
  int axis_ = 2;
  std::vector<Eigen::Matrix2d> j_;
};

/// Pointwise Reeb field curl(alpha) / (alpha . curl(alpha)).
dynamics::VectorFieldPtr reeb_field(const ContactForm& alpha);

/// Max over the grid of |alpha(X) - 1| and |iota_X d alpha|.
struct ReebResidual {
  double normalization = 0.0;
  double contraction = 0.0;
  double max() const { return std::max(normalization, contraction); }
};
ReebResidual reeb_residual(const FourierField& alpha, const dynamics::VectorField& x, int resolution = 0);

struct BeltramiReeb {
  FourierField alpha;
  dynamics::VectorFieldPtr reeb;
  ReebResidual residual;
  double min_speed = 0.0;   // min |u|_g over the grid
  double mean_speed = 0.0;  // mean |u|_g over the grid
};

/// From a vector field u: alpha = flat(g, u) and X = u / |u|_g^2. Throws
/// HasZeros when min |u|_g <= 1e-6 mean |u|_g on the grid or the fixed-point
/// search finds a zero, and ReebMismatch when the Reeb
/// conditions fail by more than tol.
BeltramiReeb beltrami_to_reeb(const FourierField& u, const MetricField& g, double tol = 1e-8);
/// Same from the dual 1-form alpha of a curl eigenfield: u = g^{-1} alpha
/// pointwise.
BeltramiReeb beltrami_to_reeb_form(const FourierField& alpha, const MetricField& g, double tol = 1e-8);

struct AdaptedMetric {
  MetricField metric;
  double lambda = 0.0;     // Rayleigh quotient of curl on alpha
  double residual = 0.0;   // |*d alpha - lambda alpha| / |alpha|
  double asymmetry = 0.0;  // max |g - g^T| before symmetrization
  double reconstruction = 0.0;  // max deviation of the Fourier metric from the pointwise tensor
};

/// g(v, w) = alpha(v) alpha(w) + d alpha(v, J w), assembled in the frame
/// {X, e1, e2}, symmetrized and expanded to the given metric truncation
/// (0: twice the truncation of alpha). Throws IncompatibleStructure when J is
/// not compatible (asymmetry above 1e-8 or not positive definite).
AdaptedMetric adapted_metric(const ContactForm& alpha, const AlmostComplexStructure& j, int metric_truncation = 0);

}  // namespace curllab::contact
