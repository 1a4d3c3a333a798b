#pragma once

#include "curllab/curlspec.hpp"

#include <Eigen/Dense>

#include <vector>

namespace curllab::curlspec::detail {

/// Real basis of truncation-N 1-forms adapted to the Hodge splitting.
///
/// For every wavevector m of the half lattice with orthonormal frame
/// (e1, e2, m/|m|), the functions sqrt2 cos(m.x) e_i and sqrt2 sin(m.x) e_i
/// with i = 1, 2 span the flat-transverse part V; the m/|m| directions and
/// the three constants span the exact-plus-harmonic part K.
class SplitBasis {
 public:
  explicit SplitBasis(int truncation);

  int truncation() const { return n_; }
  int half_modes() const { return static_cast<int>(modes_.size()); }
  int v_dim() const { return 4 * half_modes(); }
  int k_dim() const { return 2 * half_modes() + 3; }
  const fields::Wavevector& mode(int a) const { return modes_[static_cast<std::size_t>(a)]; }
  /// Columns e1, e2, m/|m|.
  const Eigen::Matrix3d& frame(int a) const { return frames_[static_cast<std::size_t>(a)]; }

  /// Field with the given V and K coordinates (coefficients in the
  /// normalized real basis above).
  FourierField field(const Eigen::Ref<const Eigen::VectorXd>& v, const Eigen::Ref<const Eigen::VectorXd>& k) const;

 private:
  int n_;
  std::vector<fields::Wavevector> modes_;
  std::vector<Eigen::Matrix3d> frames_;
};

/// Dense generalized eigensystem B x = lambda M x restricted to the
/// M-orthogonal complement of K. Matrices omit the common (2 pi)^3 factor.
struct DenseSpectrum {
  SplitBasis basis{0};
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd v_coords;  // one column per eigenvalue
  Eigen::MatrixXd k_coords;

  /// Unit-norm eigenform for column j.
  FourierField field(int j) const;
};

DenseSpectrum dense_spectrum(const MetricField& g, int truncation, bool want_vectors);

struct RawPair {
  double lambda = 0.0;
  FourierField alpha;
};

/// Shift-invert block Krylov solve for all eigenvalues in [lower, upper].
std::vector<RawPair> krylov_interval(const MetricField& g, int truncation, double lower, double upper,
                                     const SpectrumOptions& options);

}  // namespace curllab::curlspec::detail
