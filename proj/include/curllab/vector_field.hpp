#pragma once

// Smooth vector fields on the torus (or on R^3 for linear test systems) with
// analytic Jacobians J(i, k) = d u_i / d x_k.

#include "curllab/fourier_field.hpp"
#include "curllab/metric.hpp"

#include <Eigen/Dense>

#include <memory>
#include <string>

namespace curllab::dynamics {

class VectorField {
 public:
  virtual ~VectorField() = default;
  virtual Eigen::Vector3d value(const Eigen::Vector3d& x) const = 0;
  virtual Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const = 0;
  /// False for fields on R^3 that do not descend to the torus.
  virtual bool periodic() const { return true; }
  virtual std::string name() const = 0;
};

using VectorFieldPtr = std::shared_ptr<const VectorField>;

/// (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x).
class AbcField : public VectorField {
 public:
  AbcField(double a, double b, double c) : a_(a), b_(b), c_(c) {}
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override;
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override;
  std::string name() const override;

 private:
  double a_, b_, c_;
};

class ConstantField : public VectorField {
 public:
  explicit ConstantField(const Eigen::Vector3d& v) : v_(v) {}
  Eigen::Vector3d value(const Eigen::Vector3d&) const override { return v_; }
  Eigen::Matrix3d jacobian(const Eigen::Vector3d&) const override { return Eigen::Matrix3d::Zero(); }
  std::string name() const override { return "constant"; }

 private:
  Eigen::Vector3d v_;
};

/// u(x) = A x + b on R^3.
class LinearField : public VectorField {
 public:
  explicit LinearField(const Eigen::Matrix3d& a, const Eigen::Vector3d& b = Eigen::Vector3d::Zero())
      : a_(a), b_(b) {}
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override { return a_ * x + b_; }
  Eigen::Matrix3d jacobian(const Eigen::Vector3d&) const override { return a_; }
  bool periodic() const override { return false; }
  std::string name() const override { return "linear"; }

 private:
  Eigen::Matrix3d a_;
  Eigen::Vector3d b_;
};

/// Any three-component Fourier field read as a vector field.
class FourierVectorField : public VectorField {
 public:
  explicit FourierVectorField(const fields::FourierField& f) : eval_(f) {}
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override { return eval_.value(x); }
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override { return eval_.jet(x, 1).gradient; }
  std::string name() const override { return "fourier"; }

 private:
  fields::PointEvaluator eval_;
};

/// u = g^{-1} alpha evaluated pointwise (no truncation).
class SharpField : public VectorField {
 public:
  SharpField(const fields::MetricField& g, const fields::FourierField& alpha);
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override;
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override;
  std::string name() const override { return "sharp"; }

 private:
  fields::MetricField g_;
  fields::PointEvaluator alpha_;
};

class ScaledField : public VectorField {
 public:
  ScaledField(VectorFieldPtr u, double c) : u_(std::move(u)), c_(c) {}
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override { return c_ * u_->value(x); }
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override { return c_ * u_->jacobian(x); }
  bool periodic() const override { return u_->periodic(); }
  std::string name() const override { return "scaled " + u_->name(); }

 private:
  VectorFieldPtr u_;
  double c_;
};

/// u / g(u, u).
class ReebRescaledField : public VectorField {
 public:
  ReebRescaledField(VectorFieldPtr u, const fields::MetricField& g) : u_(std::move(u)), g_(g) {}
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override;
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override;
  std::string name() const override { return "reeb-rescaled " + u_->name(); }

 private:
  VectorFieldPtr u_;
  fields::MetricField g_;
};

/// Reeb field of a contact form: curl(alpha) / (alpha . curl(alpha)).
class ReebField : public VectorField {
 public:
  explicit ReebField(const fields::FourierField& alpha);
  Eigen::Vector3d value(const Eigen::Vector3d& x) const override;
  Eigen::Matrix3d jacobian(const Eigen::Vector3d& x) const override;
  std::string name() const override { return "reeb"; }

 private:
  fields::PointEvaluator alpha_;
  fields::PointEvaluator curl_;
};

}  // namespace curllab::dynamics
