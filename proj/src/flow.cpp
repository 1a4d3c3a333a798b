#include "curllab/dynamics.hpp"

#include "curllab/detail/ode.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace curllab::dynamics {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

using State12 = Eigen::Matrix<double, 12, 1>;

}  // namespace

Eigen::Vector3d wrap(const Eigen::Vector3d& x) {
  Eigen::Vector3d y;
  for (int i = 0; i < 3; ++i) {
    y[i] = std::fmod(x[i], two_pi);
    if (y[i] < 0.0) y[i] += two_pi;
    if (y[i] >= two_pi) y[i] = 0.0;
  }
  return y;
}

double torus_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Eigen::Vector3d d = a - b;
  for (int i = 0; i < 3; ++i) d[i] -= two_pi * std::round(d[i] / two_pi);
  return d.norm();
}

Winding Trajectory::winding(std::size_t i) const {
  Winding w{};
  for (int c = 0; c < 3; ++c)
    w[static_cast<std::size_t>(c)] =
        static_cast<int>(std::floor(lifted[i][c] / two_pi) - std::floor(lifted.front()[c] / two_pi));
  return w;
}

Trajectory flow(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol, double max_step) {
  if (T < 0.0) throw InvalidArgument("flow time must be nonnegative");
  Trajectory tr;
  tr.times.push_back(0.0);
  tr.lifted.push_back(x0);
  double h = 0.0;
  auto rhs = [&](double, const Eigen::Vector3d& x) { return u.value(x); };
  detail::dopri5<3>(
      rhs, 0.0, x0, T, tol,
      [&](double t, const Eigen::Vector3d& x) {
        tr.times.push_back(t);
        tr.lifted.push_back(x);
      },
      h, max_step);
  return tr;
}

Eigen::Vector3d flow_map(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol) {
  double h = 0.0;
  auto rhs = [&](double, const Eigen::Vector3d& x) { return u.value(x); };
  return detail::dopri5<3>(rhs, 0.0, x0, T, tol, [](double, const Eigen::Vector3d&) {}, h);
}

Linearization linearized_flow(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol) {
  State12 y;
  y.head<3>() = x0;
  Eigen::Map<Eigen::Matrix3d>(y.data() + 3) = Eigen::Matrix3d::Identity();
  auto rhs = [&](double, const State12& s) {
    State12 d;
    const Eigen::Vector3d x = s.head<3>();
    d.head<3>() = u.value(x);
    Eigen::Map<Eigen::Matrix3d>(d.data() + 3) = u.jacobian(x) * Eigen::Map<const Eigen::Matrix3d>(s.data() + 3);
    return d;
  };
  double h = 0.0;
  const State12 end = detail::dopri5<12>(rhs, 0.0, y, T, tol, [](double, const State12&) {}, h);
  return {end.head<3>(), Eigen::Map<const Eigen::Matrix3d>(end.data() + 3)};
}

// ---------------------------------------------------------------------------

std::string to_string(FixedPointClass c) {
  switch (c) {
    case FixedPointClass::saddle:
      return "saddle";
    case FixedPointClass::degenerate:
      return "degenerate";
    case FixedPointClass::non_hyperbolic:
      return "non-hyperbolic";
  }
  return "?";
}

FixedPointRecord classify_fixed_point(const VectorField& u, const Eigen::Vector3d& x, double eig_tol) {
  FixedPointRecord r;
  r.x = u.periodic() ? wrap(x) : x;
  r.jacobian = u.jacobian(x);
  r.residual = u.value(x).norm();
  r.trace = r.jacobian.trace();
  Eigen::EigenSolver<Eigen::Matrix3d> es(r.jacobian, false);
  std::array<std::complex<double>, 3> ev{es.eigenvalues()[0], es.eigenvalues()[1], es.eigenvalues()[2]};
  std::sort(ev.begin(), ev.end(), [](auto a, auto b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
  r.eigenvalues = ev;
  double smallest = std::abs(ev[0]);
  bool expanding = false, contracting = false;
  for (const auto& l : ev) {
    smallest = std::min(smallest, std::abs(l));
    expanding = expanding || l.real() > eig_tol;
    contracting = contracting || l.real() < -eig_tol;
  }
  r.nondegenerate = smallest > eig_tol;
  // Nondegenerate zeros without both expanding and contracting directions
  // (centres, and sources or sinks of non-conservative fields) share one class.
  if (!r.nondegenerate)
    r.type = FixedPointClass::degenerate;
  else if (expanding && contracting)
    r.type = FixedPointClass::saddle;
  else
    r.type = FixedPointClass::non_hyperbolic;
  return r;
}

FixedPointSearch find_fixed_points(const VectorField& u, const FixedPointOptions& options) {
  const int n = options.grid_density;
  if (n < 2) throw InvalidArgument("grid_density must be at least 2");
  const bool periodic = u.periodic();
  const double step = two_pi / n;
  auto point = [&](int i, int j, int k) { return Eigen::Vector3d((i + 0.5) * step, (j + 0.5) * step, (k + 0.5) * step); };
  std::vector<double> speed(static_cast<std::size_t>(n) * n * n);
  auto at = [&](int i, int j, int k) -> double& {
    return speed[(static_cast<std::size_t>(i) * n + static_cast<std::size_t>(j)) * n + static_cast<std::size_t>(k)];
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) at(i, j, k) = u.value(point(i, j, k)).squaredNorm();

  FixedPointSearch out;
  std::vector<Eigen::Vector3d> found;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double v = at(i, j, k);
        bool minimum = true;
        for (int di = -1; di <= 1 && minimum; ++di)
          for (int dj = -1; dj <= 1 && minimum; ++dj)
            for (int dk = -1; dk <= 1 && minimum; ++dk) {
              if (di == 0 && dj == 0 && dk == 0) continue;
              int a = i + di, b = j + dj, c = k + dk;
              if (periodic) {
                a = (a + n) % n;
                b = (b + n) % n;
                c = (c + n) % n;
              } else if (a < 0 || b < 0 || c < 0 || a >= n || b >= n || c >= n) {
                continue;
              }
              if (at(a, b, c) < v) minimum = false;
            }
        if (!minimum) continue;
        ++out.seeds;

        Eigen::Vector3d x = point(i, j, k);
        Eigen::Vector3d f = u.value(x);
        double res = f.norm();
        for (int it = 0; it < options.max_newton && res > 1e-2 * options.newton_tol; ++it) {
          const Eigen::Matrix3d jac = u.jacobian(x);
          const Eigen::Vector3d dx = jac.completeOrthogonalDecomposition().solve(-f);
          if (!dx.allFinite()) break;
          double t = 1.0;
          Eigen::Vector3d xn = x + dx;
          Eigen::Vector3d fn = u.value(xn);
          for (int half = 0; half < 12 && fn.norm() > res; ++half) {
            t *= 0.5;
            xn = x + t * dx;
            fn = u.value(xn);
          }
          if (fn.norm() > res) break;
          const double moved = (xn - x).norm();
          x = xn;
          f = fn;
          res = f.norm();
          if (moved < 1e-15 * std::max(1.0, x.norm())) break;
        }
        if (!(res <= options.newton_tol)) {
          std::ostringstream msg;
          msg << "seed (" << point(i, j, k).transpose() << ") discarded: Newton residual " << res;
          out.log.push_back(msg.str());
          continue;
        }
        const Eigen::Vector3d xw = periodic ? wrap(x) : x;
        bool duplicate = false;
        for (const auto& y : found)
          if ((periodic ? torus_distance(xw, y) : (xw - y).norm()) < options.dedup_tol) duplicate = true;
        if (duplicate) continue;
        found.push_back(xw);
        FixedPointRecord rec = classify_fixed_point(u, x, options.eig_tol);
        rec.x = xw;
        out.points.push_back(rec);
      }
  std::sort(out.points.begin(), out.points.end(), [](const auto& a, const auto& b) {
    return std::lexicographical_compare(a.x.data(), a.x.data() + 3, b.x.data(), b.x.data() + 3);
  });
  return out;
}

}  // namespace curllab::dynamics
