#pragma once

#include "curllab/fourier_field.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace curllab::fields {

/// Real samples of every component of a field on a collocation grid.
struct GridField {
  Rank rank = Rank::scalar;
  std::vector<std::vector<double>> comp;

  std::size_t size() const { return comp.empty() ? 0 : comp.front().size(); }
  Eigen::Vector3d at3(std::size_t p) const { return {comp[0][p], comp[1][p], comp[2][p]}; }
  void set3(std::size_t p, const Eigen::Vector3d& v) {
    comp[0][p] = v[0];
    comp[1][p] = v[1];
    comp[2][p] = v[2];
  }
};

GridField make_grid_field(Rank rank, std::size_t points);

/// Uniform tensor grid on [0, 2 pi)^3 with separable discrete Fourier
/// transforms. Point (i, j, k) has flat index (i n + j) n + k.
class CollocationGrid {
 public:
  explicit CollocationGrid(int resolution);

  /// Grid for pseudospectral products of truncation-n fields with a metric of
  /// truncation metric_n. Always at least 3n+1 points per axis (3/2 rule) and
  /// large enough that Gram-matrix entries up to wavevector 2n are resolved.
  static CollocationGrid dealiased(int n, int metric_n = 0);

  int resolution() const { return n_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }
  double spacing() const;
  /// Quadrature weight of every point, (2 pi / n)^3.
  double weight() const;
  Eigen::Vector3d point(std::size_t index) const;

  GridField synthesize(const FourierField& field) const;
  std::vector<double> synthesize_component(const FourierField& field, int component) const;

  /// Discrete Fourier coefficients up to the given truncation. The result is
  /// made exactly Hermitian.
  FourierField analyze(const GridField& samples, int truncation) const;
  FourierField analyze_scalar(const std::vector<double>& samples, int truncation) const;

  /// Quadrature of a sampled scalar over the torus.
  double integrate(const std::vector<double>& samples) const;

 private:
  void analyze_into(const std::vector<double>& samples, FourierField& out, int component) const;
  int n_;
};

}  // namespace curllab::fields
