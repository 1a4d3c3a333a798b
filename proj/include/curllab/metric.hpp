#pragma once

#include "curllab/fourier_field.hpp"
#include "curllab/grid.hpp"

#include <Eigen/Dense>

#include <array>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace curllab::fields {

/// Pointwise metric data on one collocation grid.
struct MetricSamples {
  int resolution = 0;
  std::vector<Eigen::Matrix3d> g;
  std::vector<Eigen::Matrix3d> ginv;
  std::vector<double> sqrt_det;
  /// sqrt(det g) g^{-1}: the weight of the L2 inner product on 1-forms.
  std::vector<Eigen::Matrix3d> weight;
  double min_eigenvalue = 0.0;
};

/// Metric value and first derivatives at a point.
struct MetricJet {
  Eigen::Matrix3d g;
  std::array<Eigen::Matrix3d, 3> dg;  // d g / d x_k
};

/// Riemannian metric g_ij on the torus given by six real trigonometric
/// polynomials (packed 11, 12, 13, 22, 23, 33).
///
/// Construction checks symmetry and positive definiteness on a verification
/// grid and throws DegenerateMetric with the offending point otherwise.
/// Instances are immutable; grid samples are computed once per resolution and
/// shared between copies.
class MetricField {
 public:
  static MetricField flat();
  /// c^2 times the Euclidean metric.
  static MetricField conformal(double c);
  static MetricField constant(const Eigen::Matrix3d& g);

  explicit MetricField(std::array<FourierField, 6> packed);

  int truncation() const { return n_; }
  const FourierField& packed(int index) const { return comps_[static_cast<std::size_t>(index)]; }
  const FourierField& component(int i, int j) const;
  const std::array<FourierField, 6>& packed_components() const { return comps_; }

  /// True when every nonconstant coefficient vanishes.
  bool is_constant() const;
  bool is_flat() const;

  Eigen::Matrix3d at(const Eigen::Vector3d& x) const;
  MetricJet jet(const Eigen::Vector3d& x) const;

  std::shared_ptr<const MetricSamples> samples(const CollocationGrid& grid) const;

  /// Multiplies every component by factor (c^2 for a conformal rescaling).
  MetricField scaled(double factor) const;
  /// this + eps * h for a symmetric tensor field h (packed like the metric).
  MetricField perturbed(const std::array<FourierField, 6>& h, double eps) const;

  /// Smallest eigenvalue over the verification grid.
  double min_eigenvalue() const { return min_eig_; }

  static int packed_index(int i, int j);

 private:
  struct Cache {
    std::mutex mutex;
    std::map<int, std::shared_ptr<const MetricSamples>> by_resolution;
  };

  void validate();
  std::shared_ptr<MetricSamples> compute_samples(const CollocationGrid& grid) const;

  std::array<FourierField, 6> comps_;
  int n_ = 0;
  double min_eig_ = 0.0;
  std::array<PointEvaluator, 2> eval_{PointEvaluator(FourierField(Rank::vector, 0)),
                                      PointEvaluator(FourierField(Rank::vector, 0))};
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace curllab::fields
