#pragma once

// Truncated Fourier representation of fields on the torus R^3 / (2 pi Z)^3.
//
// A field of truncation N stores one complex coefficient per wavevector
// m in {-N..N}^3 and per component. Real fields satisfy
// coeff(-m) = conj(coeff(m)).
//
// Component conventions:
//   scalar    1 component
//   one_form  a_1 dx + a_2 dy + a_3 dz
//   two_form  F_1 dy^dz + F_2 dz^dx + F_3 dx^dy
//   vector    u^1 d/dx + u^2 d/dy + u^3 d/dz

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace curllab::fields {

using Complex = std::complex<double>;
using Wavevector = std::array<int, 3>;

enum class Rank { scalar, one_form, two_form, vector };

int component_count(Rank rank);
std::string to_string(Rank rank);
Rank rank_from_string(const std::string& name);

/// Number of wavevectors per axis for truncation n.
inline int side_length(int truncation) { return 2 * truncation + 1; }

class FourierField {
 public:
  FourierField() = default;
  FourierField(Rank rank, int truncation);

  Rank rank() const { return rank_; }
  int truncation() const { return n_; }
  int components() const { return component_count(rank_); }
  int side() const { return side_length(n_); }
  std::size_t mode_count() const { return modes_; }

  /// Coefficient lookup; wavevectors outside the truncation read as zero.
  Complex coeff(const Wavevector& m, int component) const;
  void set(const Wavevector& m, int component, Complex value);
  /// Sets coeff(m) = value and coeff(-m) = conj(value).
  void set_real(const Wavevector& m, int component, Complex value);

  std::size_t mode_index(const Wavevector& m) const;
  Wavevector wavevector(std::size_t mode) const;

  std::span<const Complex> component_data(int component) const;
  std::span<Complex> component_data(int component);
  std::span<const Complex> data() const { return coeffs_; }
  std::span<Complex> data() { return coeffs_; }

  /// Value at x as a vector of length components().
  Eigen::VectorXd eval(const Eigen::Vector3d& x) const;
  double eval_scalar(const Eigen::Vector3d& x) const;
  Eigen::Vector3d eval3(const Eigen::Vector3d& x) const;

  /// Largest |coeff(m) - conj(coeff(-m))|.
  double hermitian_defect() const;
  FourierField hermitianized() const;

  /// Copy at a different truncation (pads with zeros or drops modes).
  FourierField retruncated(int truncation) const;
  FourierField with_rank(Rank rank) const;

  /// Sqrt of sum |c|^2, i.e. the flat L2 norm divided by (2 pi)^{3/2}.
  double coefficient_norm() const;
  double max_abs_coeff() const;
  bool is_zero() const;

  FourierField& operator+=(const FourierField& other);
  FourierField& operator-=(const FourierField& other);
  FourierField& operator*=(double s);

 private:
  Rank rank_ = Rank::scalar;
  int n_ = 0;
  std::size_t modes_ = 1;
  std::vector<Complex> coeffs_ = std::vector<Complex>(1);
};

FourierField operator+(FourierField a, const FourierField& b);
FourierField operator-(FourierField a, const FourierField& b);
FourierField operator*(double s, FourierField a);

/// Largest coefficient difference; truncations may differ.
double max_coeff_difference(const FourierField& a, const FourierField& b);

/// Values and first/second derivatives of every component at one point.
struct FieldJet {
  Eigen::Vector3d value = Eigen::Vector3d::Zero();
  Eigen::Matrix3d gradient = Eigen::Matrix3d::Zero();  // (component, axis)
  std::array<Eigen::Matrix3d, 3> hessian{};             // per component
};

/// Fast repeated pointwise evaluation of a three-component field.
///
/// Keeps only the nonzero half-lattice coefficients and uses
/// f(x) = c_0 + 2 Re sum_{m in half} c_m e^{i m.x}.
class PointEvaluator {
 public:
  explicit PointEvaluator(const FourierField& field);

  Eigen::Vector3d value(const Eigen::Vector3d& x) const;
  /// order 1 fills value and gradient, order 2 also the Hessians.
  FieldJet jet(const Eigen::Vector3d& x, int order = 1) const;

  int truncation() const { return n_; }

 private:
  struct Term {
    Wavevector m;
    std::array<Complex, 3> c;
  };
  int n_ = 0;
  int components_ = 3;
  std::array<double, 3> constant_{};
  std::vector<Term> terms_;
};

// Common closed-form fields used throughout the project and its tests.

/// sin(kz) dx + cos(kz) dy.
FourierField tight_one_form(int k, int truncation);
/// Dual 1-form of the ABC flow
/// (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
FourierField abc_one_form(double a, double b, double c, int truncation);
/// Constant field with the given components.
FourierField constant_field(Rank rank, const Eigen::Vector3d& value,
                            int truncation);

}  // namespace curllab::fields
