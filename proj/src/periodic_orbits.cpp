#include "curllab/contact.hpp"
#include "curllab/detail/parallel.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

namespace curllab::dynamics {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

Eigen::Vector3d lattice(const Winding& w) { return two_pi * Eigen::Vector3d(w[0], w[1], w[2]); }

/// Unit vectors spanning a plane transverse to u at x.
Eigen::Matrix<double, 3, 2> transverse_plane(const VectorField& u, const Eigen::Vector3d& x,
                                             const fields::FourierField* alpha) {
  Eigen::Matrix<double, 3, 2> e;
  if (alpha) {
    const fields::PointEvaluator a(*alpha);
    const fields::PointEvaluator c(fields::exterior_d(*alpha));
    const auto [axis, sine] = contact::frame_axis(a, {x});
    (void)sine;
    const contact::KernelFrame f = contact::kernel_frame(a.value(x), c.value(x), axis);
    e << f.e1, f.e2;
    return e;
  }
  const Eigen::Vector3d n = u.value(x).normalized();
  Eigen::Index axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Eigen::Vector3d e1 = (Eigen::Vector3d::Unit(axis) - n[axis] * n).normalized();
  e << e1, n.cross(e1);
  return e;
}

struct Candidate {
  Eigen::Vector3d x;
  double period;
  Winding w;
  double distance;
};

/// Close returns of one trajectory in the universal cover.
std::vector<Candidate> recurrence_scan(const VectorField& u, const Eigen::Vector3d& x0, const OrbitOptions& opt) {
  const Trajectory tr = flow(u, x0, opt.T_max, 1e-9, 0.05);
  const bool periodic = u.periodic();
  std::vector<Candidate> all;
  const std::size_t n = tr.size();
  double last_start = -1.0;
  for (std::size_t j = 0; j < n; ++j) {
    if (tr.times[j] - last_start < 0.25 && j > 0) continue;
    last_start = tr.times[j];
    std::vector<double> d(n, 1e300);
    std::vector<Winding> w(n);
    // A return counts only after the trajectory has left the neighborhood.
    bool departed = false;
    for (std::size_t i = j + 1; i < n; ++i) {
      const Eigen::Vector3d delta = tr.lifted[i] - tr.lifted[j];
      Winding wi{};
      if (periodic)
        for (int c = 0; c < 3; ++c) wi[static_cast<std::size_t>(c)] = static_cast<int>(std::lround(delta[c] / two_pi));
      const double di = (delta - lattice(wi)).norm();
      departed = departed || di >= 2.0 * opt.close_return;
      if (!departed || tr.times[i] - tr.times[j] < opt.min_period) continue;
      d[i] = di;
      w[i] = wi;
    }
    for (std::size_t i = j + 1; i + 1 < n; ++i) {
      if (d[i] >= opt.close_return || d[i] > d[i - 1] || d[i] > d[i + 1]) continue;
      all.push_back({tr.lifted[j], tr.times[i] - tr.times[j], w[i], d[i]});
    }
  }
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) { return a.distance < b.distance; });
  std::vector<Candidate> out;
  for (const auto& c : all) {
    bool seen = false;
    for (const auto& o : out)
      if (o.w == c.w && std::abs(o.period - c.period) < 0.1) seen = true;
    if (seen) continue;
    out.push_back(c);
    if (static_cast<int>(out.size()) >= opt.candidates_per_seed) break;
  }
  return out;
}

struct Shot {
  Eigen::Vector3d x;
  double period;
  Winding w;
  double residual;
};

double return_residual(const VectorField& u, const Eigen::Vector3d& x, double period, const Winding& w) {
  return (flow_map(u, x, period, 1e-12) - x - lattice(w)).norm();
}

/// Newton iteration on phi_T(x) - x - 2 pi w = 0 with the phase condition
/// u(x_ref) . (x - x_ref) = 0.
std::optional<Shot> shoot(const VectorField& u, const Candidate& cand, const OrbitOptions& opt, std::string& why) {
  Eigen::Vector3d x = cand.x;
  double period = cand.period;
  const Eigen::Vector3d x_ref = cand.x;
  const Eigen::Vector3d u_ref = u.value(x_ref);
  double res = 1e300;
  for (int it = 0; it < 40; ++it) {
    const Linearization lin = linearized_flow(u, x, period, 1e-12);
    const Eigen::Vector3d f = lin.x - x - lattice(cand.w);
    res = f.norm();
    if (res <= 1e-2 * opt.orbit_tol) break;
    Eigen::Matrix4d jac = Eigen::Matrix4d::Zero();
    jac.topLeftCorner<3, 3>() = lin.m - Eigen::Matrix3d::Identity();
    jac.topRightCorner<3, 1>() = u.value(lin.x);
    jac.bottomLeftCorner<1, 3>() = u_ref.transpose();
    Eigen::Vector4d rhs;
    rhs << -f, -u_ref.dot(x - x_ref);
    Eigen::Vector4d delta = jac.completeOrthogonalDecomposition().solve(rhs);
    if (!delta.allFinite()) break;
    const double len = delta.norm();
    if (len > 0.5) delta *= 0.5 / len;
    x += delta.head<3>();
    period += delta[3];
    if (period < 0.5 * opt.min_period || period > 2.0 * opt.T_max) {
      why = "period left the search range";
      return std::nullopt;
    }
    if (len < 1e-14 && res <= opt.orbit_tol) break;
  }
  res = return_residual(u, x, period, cand.w);
  if (!(res <= opt.orbit_tol)) {
    std::ostringstream msg;
    msg << "shooting did not converge (return residual " << res << ")";
    why = msg.str();
    return std::nullopt;
  }
  return Shot{x, period, cand.w, res};
}

/// Replaces an orbit traversed k times by its primitive period.
void reduce_to_primitive(const VectorField& u, Shot& s, const OrbitOptions& opt) {
  for (int k = 7; k >= 2; --k) {
    if (s.period / k < 0.5 * opt.min_period) continue;
    if (s.w[0] % k || s.w[1] % k || s.w[2] % k) continue;
    const Winding wk{s.w[0] / k, s.w[1] / k, s.w[2] / k};
    const double r = return_residual(u, s.x, s.period / k, wk);
    if (r <= opt.orbit_tol) {
      s.period /= k;
      s.w = wk;
      s.residual = r;
      reduce_to_primitive(u, s, opt);
      return;
    }
  }
}

/// Torus distance from y to the orbit through rec.x.
double distance_to_orbit(const VectorField& u, const PeriodicOrbitRecord& rec, const Eigen::Vector3d& y) {
  const std::size_t n = rec.samples.size();
  std::size_t best = 0;
  double best_d = 1e300;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = torus_distance(rec.samples[i], y);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  double tau = rec.period * double(best) / double(n);
  Eigen::Vector3d p = rec.samples[best];
  double d = best_d;
  for (int it = 0; it < 4; ++it) {
    const Eigen::Vector3d v = u.value(p);
    Eigen::Vector3d r = y - p;
    for (int c = 0; c < 3; ++c) r[c] -= two_pi * std::round(r[c] / two_pi);
    tau += r.dot(v) / v.squaredNorm();
    p = flow_map(u, rec.x, tau, 1e-12);
    d = torus_distance(p, y);
  }
  return std::min(d, best_d);
}

PeriodicOrbitRecord build_record(const VectorField& u, const Eigen::Vector3d& seed, const Shot& s,
                                 const OrbitOptions& opt) {
  PeriodicOrbitRecord r;
  r.seed = seed;
  r.x = u.periodic() ? wrap(s.x) : s.x;
  r.period = s.period;
  r.homology = s.w;
  r.return_residual = s.residual;
  const int ns = std::max(2, opt.sample_count);
  r.samples.reserve(static_cast<std::size_t>(ns));
  Eigen::Vector3d p = r.x;
  r.samples.push_back(p);
  for (int i = 1; i < ns; ++i) {
    p = flow_map(u, p, s.period / ns, 1e-12);
    r.samples.push_back(p);
  }
  const fields::FourierField* alpha = opt.contact_form ? &*opt.contact_form : nullptr;
  const Monodromy mono = monodromy(u, r.x, r.period, alpha);
  r.monodromy = mono.m;
  r.transverse = mono.p;
  r.transverse_det = mono.p.determinant();
  const Eigen::Vector3d v = u.value(r.x);
  r.flow_multiplier_error = (mono.m * v - v).norm() / v.norm();
  Eigen::EigenSolver<Eigen::Matrix2d> es(mono.p, false);
  r.multipliers = {es.eigenvalues()[0], es.eigenvalues()[1]};
  if (std::abs(r.multipliers[0]) < std::abs(r.multipliers[1])) std::swap(r.multipliers[0], r.multipliers[1]);
  r.type = classify_multipliers(mono.p, opt.mult_tol, &r.nondegenerate);
  return r;
}

}  // namespace

std::string to_string(OrbitType t) {
  switch (t) {
    case OrbitType::positive_hyperbolic:
      return "positive-hyperbolic";
    case OrbitType::negative_hyperbolic:
      return "negative-hyperbolic";
    case OrbitType::elliptic:
      return "elliptic";
    case OrbitType::degenerate:
      return "degenerate";
  }
  return "?";
}

OrbitType classify_multipliers(const Eigen::Matrix2d& p, double mult_tol, bool* nondegenerate) {
  Eigen::EigenSolver<Eigen::Matrix2d> es(p, false);
  const std::complex<double> a = es.eigenvalues()[0], b = es.eigenvalues()[1];
  const bool nd = std::abs(a - 1.0) > mult_tol && std::abs(b - 1.0) > mult_tol;
  if (nondegenerate) *nondegenerate = nd;
  if (!nd) return OrbitType::degenerate;
  const bool real = std::abs(a.imag()) <= mult_tol && std::abs(b.imag()) <= mult_tol;
  const double big = std::max(std::abs(a), std::abs(b));
  if (real && std::abs(big - 1.0) > mult_tol) {
    const double lead = std::abs(a) >= std::abs(b) ? a.real() : b.real();
    return lead > 0.0 ? OrbitType::positive_hyperbolic : OrbitType::negative_hyperbolic;
  }
  return OrbitType::elliptic;
}

Monodromy monodromy(const VectorField& u, const Eigen::Vector3d& x0, double period,
                    const fields::FourierField* alpha, double tol) {
  if (!(period > 0.0)) throw InvalidArgument("monodromy needs a positive period");
  Monodromy out;
  out.m = linearized_flow(u, x0, period, tol).m;
  const Eigen::Vector3d v = u.value(x0);
  const double speed = v.norm();
  if (!(speed > 1e-8)) throw DegenerateOrbit("|u| vanishes on the orbit; the transverse projection is ill-conditioned");
  const Eigen::Matrix<double, 3, 2> e = transverse_plane(u, x0, alpha);
  out.frame << e, v;
  // Sine of the angle between u and the plane, times the area of the frame.
  const double transversality = std::abs(out.frame.determinant()) / (speed * e.col(0).cross(e.col(1)).norm());
  if (!(transversality > 1e-8)) {
    std::ostringstream msg;
    msg << "transverse projection is ill-conditioned (u makes angle " << transversality << " with the plane)";
    throw DegenerateOrbit(msg.str());
  }
  const Eigen::Matrix<double, 3, 2> coords = out.frame.partialPivLu().solve(out.m * e);
  out.p = coords.topRows<2>();
  return out;
}

OrbitSearch find_periodic_orbits(const VectorField& u, const OrbitOptions& options) {
  if (!(options.T_max > options.min_period)) throw InvalidArgument("T_max must exceed min_period");
  std::vector<Eigen::Vector3d> seeds = options.seeds;
  if (seeds.empty()) {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> unif(0.0, two_pi);
    for (int i = 0; i < options.n_seeds; ++i) {
      const double a = unif(rng), b = unif(rng), c = unif(rng);
      seeds.emplace_back(a, b, c);
    }
  }

  struct PerSeed {
    std::vector<PeriodicOrbitRecord> found;
    std::vector<std::string> unresolved;
    int candidates = 0;
  };
  std::vector<PerSeed> per(seeds.size());
  detail::parallel_for(static_cast<int>(seeds.size()), options.threads, [&](int i) {
    PerSeed& out = per[static_cast<std::size_t>(i)];
    const Eigen::Vector3d& s = seeds[static_cast<std::size_t>(i)];
    std::vector<Candidate> cands;
    try {
      cands = recurrence_scan(u, s, options);
    } catch (const Error& e) {
      out.unresolved.push_back("seed " + std::to_string(i) + ": " + e.what());
      return;
    }
    out.candidates = static_cast<int>(cands.size());
    for (const auto& c : cands) {
      std::string why;
      try {
        auto shot = shoot(u, c, options, why);
        if (!shot) {
          std::ostringstream msg;
          msg << "seed " << i << ", candidate period " << c.period << ": " << why;
          out.unresolved.push_back(msg.str());
          continue;
        }
        reduce_to_primitive(u, *shot, options);
        out.found.push_back(build_record(u, s, *shot, options));
      } catch (const Error& e) {
        std::ostringstream msg;
        msg << "seed " << i << ", candidate period " << c.period << ": " << e.what();
        out.unresolved.push_back(msg.str());
      }
    }
  });

  OrbitSearch result;
  std::vector<std::pair<std::size_t, PeriodicOrbitRecord>> all;
  for (std::size_t i = 0; i < per.size(); ++i) {
    result.candidates += per[i].candidates;
    for (auto& m : per[i].unresolved) result.unresolved.push_back(std::move(m));
    for (auto& r : per[i].found) all.emplace_back(i, std::move(r));
  }
  std::stable_sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.second.period != b.second.period) return a.second.period < b.second.period;
    return a.first < b.first;
  });
  for (auto& [seed_index, rec] : all) {
    bool duplicate = false;
    for (const auto& kept : result.orbits) {
      if (kept.homology != rec.homology) continue;
      if (std::abs(kept.period - rec.period) > 1e-6 * std::max(1.0, rec.period)) continue;
      if (distance_to_orbit(u, kept, rec.x) <= options.dedup_tol) {
        duplicate = true;
        break;
      }
    }
    if (duplicate) continue;
    if (options.contact_form && rec.nondegenerate) {
      try {
        rec.cz_index = conley_zehnder(u, rec, *options.contact_form);
      } catch (const Error& e) {
        result.unresolved.push_back("Conley-Zehnder index of orbit with period " + std::to_string(rec.period) + ": " +
                                    e.what());
      }
    }
    result.orbits.push_back(std::move(rec));
  }
  return result;
}

}  // namespace curllab::dynamics
