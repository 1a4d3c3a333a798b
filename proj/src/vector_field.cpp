#include "curllab/vector_field.hpp"

#include "curllab/fields.hpp"

#include <cmath>
#include <sstream>

namespace curllab::dynamics {

Eigen::Vector3d AbcField::value(const Eigen::Vector3d& x) const {
  return {a_ * std::sin(x[2]) + c_ * std::cos(x[1]), b_ * std::sin(x[0]) + a_ * std::cos(x[2]),
          c_ * std::sin(x[1]) + b_ * std::cos(x[0])};
}

Eigen::Matrix3d AbcField::jacobian(const Eigen::Vector3d& x) const {
  Eigen::Matrix3d j;
  j << 0.0, -c_ * std::sin(x[1]), a_ * std::cos(x[2]),  //
      b_ * std::cos(x[0]), 0.0, -a_ * std::sin(x[2]),    //
      -b_ * std::sin(x[0]), c_ * std::cos(x[1]), 0.0;
  return j;
}

std::string AbcField::name() const {
  std::ostringstream s;
  s << "abc:" << a_ << "," << b_ << "," << c_;
  return s.str();
}

SharpField::SharpField(const fields::MetricField& g, const fields::FourierField& alpha) : g_(g), alpha_(alpha) {}

Eigen::Vector3d SharpField::value(const Eigen::Vector3d& x) const {
  return g_.at(x).llt().solve(alpha_.value(x));
}

Eigen::Matrix3d SharpField::jacobian(const Eigen::Vector3d& x) const {
  const fields::MetricJet mj = g_.jet(x);
  const fields::FieldJet aj = alpha_.jet(x, 1);
  const Eigen::LLT<Eigen::Matrix3d> llt(mj.g);
  const Eigen::Vector3d u = llt.solve(aj.value);
  Eigen::Matrix3d j;
  for (int k = 0; k < 3; ++k) j.col(k) = llt.solve(aj.gradient.col(k) - mj.dg[static_cast<std::size_t>(k)] * u);
  return j;
}

Eigen::Vector3d ReebRescaledField::value(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d u = u_->value(x);
  return u / u.dot(g_.at(x) * u);
}

Eigen::Matrix3d ReebRescaledField::jacobian(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d u = u_->value(x);
  const Eigen::Matrix3d du = u_->jacobian(x);
  const fields::MetricJet mj = g_.jet(x);
  const double s = u.dot(mj.g * u);
  Eigen::RowVector3d ds;
  for (int k = 0; k < 3; ++k)
    ds[k] = 2.0 * u.dot(mj.g * du.col(k)) + u.dot(mj.dg[static_cast<std::size_t>(k)] * u);
  return du / s - u * ds / (s * s);
}

ReebField::ReebField(const fields::FourierField& alpha) : alpha_(alpha), curl_(fields::exterior_d(alpha)) {}

Eigen::Vector3d ReebField::value(const Eigen::Vector3d& x) const {
  const Eigen::Vector3d c = curl_.value(x);
  return c / alpha_.value(x).dot(c);
}

Eigen::Matrix3d ReebField::jacobian(const Eigen::Vector3d& x) const {
  const fields::FieldJet a = alpha_.jet(x, 1);
  const fields::FieldJet c = curl_.jet(x, 1);
  const double s = a.value.dot(c.value);
  const Eigen::RowVector3d ds = c.value.transpose() * a.gradient + a.value.transpose() * c.gradient;
  return c.gradient / s - c.value * ds / (s * s);
}

}  // namespace curllab::dynamics
