#include "curllab/contact.hpp"
#include "curllab/detail/ode.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace curllab::dynamics {

namespace {

constexpr double pi = std::numbers::pi;

/// Continuous lift of a sequence of angles.
std::vector<double> unwrap(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  if (raw.empty()) return out;
  out[0] = raw[0];
  for (std::size_t i = 1; i < raw.size(); ++i) {
    double d = raw[i] - raw[i - 1];
    d -= 2.0 * pi * std::round(d / (2.0 * pi));
    out[i] = out[i - 1] + d;
  }
  return out;
}

}  // namespace

int conley_zehnder_index(const std::vector<Eigen::Matrix2d>& path) {
  if (path.size() < 2) throw InvalidArgument("a symplectic path needs at least two samples");
  const Eigen::Matrix2d& end = path.back();
  const double tr = end.trace();
  if (std::abs((end - Eigen::Matrix2d::Identity()).determinant()) < 1e-10)
    throw DegenerateOrbit("the end point of the path has eigenvalue 1");

  if (std::abs(tr) > 2.0) {
    // Hyperbolic: half-turns of a real eigenvector.
    const double disc = std::sqrt(0.25 * tr * tr - end.determinant());
    const double mu = 0.5 * tr + disc;
    Eigen::Vector2d v(end(0, 1), mu - end(0, 0));
    if (v.norm() < 1e-12 * std::max(1.0, std::abs(mu))) v = Eigen::Vector2d(mu - end(1, 1), end(1, 0));
    if (v.norm() < 1e-12 * std::max(1.0, std::abs(mu))) v = Eigen::Vector2d(1.0, 0.0);
    std::vector<double> angles;
    angles.reserve(path.size());
    for (const auto& m : path) {
      const Eigen::Vector2d w = m * v;
      angles.push_back(std::atan2(w[1], w[0]));
    }
    const auto lift = unwrap(angles);
    return static_cast<int>(std::lround((lift.back() - lift.front()) / pi));
  }

  // Elliptic: rotation angle of the end point, on the branch selected by the
  // continuous polar angle of the path.
  std::vector<double> polar;
  polar.reserve(path.size());
  for (const auto& m : path) polar.push_back(std::atan2(m(1, 0) - m(0, 1), m(0, 0) + m(1, 1)));
  const auto lift = unwrap(polar);
  const double rho = lift.back() - lift.front();
  const double base = std::acos(std::clamp(0.5 * tr, -1.0, 1.0));
  const double theta_end = end(1, 0) >= 0.0 ? base : 2.0 * pi - base;
  const double theta = theta_end + 2.0 * pi * std::round((rho - theta_end) / (2.0 * pi));
  return 2 * static_cast<int>(std::floor(theta / (2.0 * pi))) + 1;
}

std::vector<Eigen::Matrix2d> transverse_path(const VectorField& u, const PeriodicOrbitRecord& orbit,
                                             const fields::FourierField& alpha, double tol) {
  const fields::PointEvaluator a(alpha);
  const fields::PointEvaluator c(fields::exterior_d(alpha));
  std::vector<Eigen::Vector3d> pts = orbit.samples;
  if (pts.empty()) pts.push_back(orbit.x);
  for (const auto& x : pts) {
    const double density = a.value(x).dot(c.value(x));
    if (!(std::abs(density) > 1e-10)) {
      std::ostringstream msg;
      msg << "alpha is not contact on the orbit (alpha ^ d alpha = " << density << ")";
      throw NotContact(msg.str());
    }
  }
  const auto [axis, sine] = contact::frame_axis(a, pts);
  if (sine < 1e-3) throw NotContact("no coordinate axis gives a frame of ker alpha along the orbit");

  auto frame_at = [&](const Eigen::Vector3d& x) {
    const contact::KernelFrame f = contact::kernel_frame(a.value(x), c.value(x), axis);
    Eigen::Matrix3d b;
    b << f.e1, f.e2, u.value(x);
    return b;
  };

  using State = Eigen::Matrix<double, 12, 1>;
  State y;
  y.head<3>() = orbit.x;
  Eigen::Map<Eigen::Matrix3d>(y.data() + 3) = Eigen::Matrix3d::Identity();
  const Eigen::Matrix3d b0 = frame_at(orbit.x);
  std::vector<Eigen::Matrix2d> path;
  auto record = [&](double, const State& s) {
    const Eigen::Vector3d x = s.head<3>();
    const Eigen::Matrix3d m = Eigen::Map<const Eigen::Matrix3d>(s.data() + 3);
    const Eigen::Matrix<double, 3, 2> v = m * b0.leftCols<2>();
    const Eigen::Matrix<double, 3, 2> coords = frame_at(x).partialPivLu().solve(v);
    path.push_back(coords.topRows<2>());
  };
  record(0.0, y);
  auto rhs = [&](double, const State& s) {
    State d;
    const Eigen::Vector3d x = s.head<3>();
    d.head<3>() = u.value(x);
    Eigen::Map<Eigen::Matrix3d>(d.data() + 3) = u.jacobian(x) * Eigen::Map<const Eigen::Matrix3d>(s.data() + 3);
    return d;
  };
  double h = 0.0;
  detail::dopri5<12>(rhs, 0.0, y, orbit.period, tol, record, h, std::min(0.02, orbit.period / 500.0));
  return path;
}

int conley_zehnder(const VectorField& u, const PeriodicOrbitRecord& orbit, const fields::FourierField& alpha) {
  if (!orbit.nondegenerate) throw DegenerateOrbit("the Conley-Zehnder index needs a nondegenerate orbit");
  return conley_zehnder_index(transverse_path(u, orbit, alpha));
}

}  // namespace curllab::dynamics
