#include "curllab/instability.hpp"

#include "curllab/contact.hpp"
#include "curllab/detail/ode.hpp"
#include "curllab/detail/parallel.hpp"
#include "curllab/error.hpp"
#include "curllab/io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace curllab::instability {

using dynamics::FixedPointClass;
using dynamics::OrbitType;

// ---------------------------------------------------------------------------
// WKB

WkbResult wkb_exponent(const dynamics::VectorField& u, const Eigen::Vector3d& x0, const Eigen::Vector3d& xi0, double T,
                       int n_amplitudes, const WkbOptions& options) {
  if (!(xi0.norm() > 0.0)) throw InvalidArgument("the initial wavevector must be nonzero");
  if (n_amplitudes < 1 || n_amplitudes > 2) throw InvalidArgument("n_amplitudes must be 1 or 2");
  if (!(T > 0.0)) throw InvalidArgument("the WKB horizon must be positive");

  using State = Eigen::Matrix<double, 12, 1>;
  const Eigen::Vector3d n = xi0.normalized();
  Eigen::Index axis = 0;
  n.cwiseAbs().minCoeff(&axis);
  const Eigen::Vector3d b1 = (Eigen::Vector3d::Unit(axis) - n[axis] * n).normalized();
  const Eigen::Vector3d b2 = n.cross(b1);

  State y;
  y << x0, n, b1, b2;
  // log of the factors removed from xi and from each amplitude.
  double log_xi = std::log(xi0.norm());
  std::array<double, 2> log_b{0.0, 0.0};
  std::array<double, 2> log_b_half{0.0, 0.0};
  double t_half = 0.0;
  const double c0 = xi0.dot(u.value(x0));
  const double u0 = u.value(x0).norm();

  auto rhs = [&](double, const State& s) {
    const Eigen::Vector3d x = s.segment<3>(0), xi = s.segment<3>(3);
    const Eigen::Matrix3d du = u.jacobian(x);
    State d;
    d.segment<3>(0) = u.value(x);
    d.segment<3>(3) = -du.transpose() * xi;
    const double xi2 = xi.squaredNorm();
    for (int a = 0; a < 2; ++a) {
      const Eigen::Vector3d dub = du * s.segment<3>(6 + 3 * a);
      d.segment<3>(6 + 3 * a) = -dub + (2.0 * xi.dot(dub) / xi2) * xi;
    }
    return d;
  };

  WkbResult out;
  auto observe = [&](double, const State& s) {
    const Eigen::Vector3d x = s.segment<3>(0), xi = s.segment<3>(3);
    const double xn = xi.norm();
    if (!(xn > 1e-250) || !std::isfinite(xn)) throw CausticError("the wavevector collapsed to zero");
    for (int a = 0; a < n_amplitudes; ++a) {
      const Eigen::Vector3d b = s.segment<3>(6 + 3 * a);
      out.orthogonality_drift = std::max(out.orthogonality_drift, std::abs(b.dot(xi)) / (b.norm() * xn));
    }
    const Eigen::Vector3d ux = u.value(x);
    const double scale = std::max({ux.norm(), u0, 1e-12});
    // xi is stored divided by exp(log_xi).
    const double c = xi.dot(ux);
    const double expected = c0 * std::exp(-log_xi);
    out.transport_drift = std::max(out.transport_drift, std::abs(c - expected) / (xn * scale));
  };

  double t = 0.0;
  double h = 0.0;
  while (t < T) {
    const double t_next = std::min(T, t + options.renormalize_every);
    y = detail::dopri5<12>(rhs, t, y, t_next, options.tol, observe, h);
    t = t_next;
    const double xn = y.segment<3>(3).norm();
    log_xi += std::log(xn);
    y.segment<3>(3) /= xn;
    for (int a = 0; a < 2; ++a) {
      const double bn = y.segment<3>(6 + 3 * a).norm();
      if (!(bn > 0.0) || !std::isfinite(bn)) throw CausticError("the WKB amplitude left the representable range");
      log_b[static_cast<std::size_t>(a)] += std::log(bn);
      y.segment<3>(6 + 3 * a) /= bn;
    }
    if (t <= 0.5 * T) {
      log_b_half = log_b;
      t_half = t;
    }
  }
  out.exponent = -std::numeric_limits<double>::infinity();
  out.sustained_exponent = -std::numeric_limits<double>::infinity();
  for (int a = 0; a < n_amplitudes; ++a) {
    const auto i = static_cast<std::size_t>(a);
    out.per_amplitude.push_back(log_b[i] / T);
    out.exponent = std::max(out.exponent, out.per_amplitude.back());
    const double late = (log_b[i] - log_b_half[i]) / (T - t_half);
    const double early = t_half > 0.0 ? log_b_half[i] / t_half : late;
    out.sustained_exponent = std::max(out.sustained_exponent, std::min(early, late));
  }
  out.final_state = {y.segment<3>(0), y.segment<3>(3), y.segment<3>(6)};
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(Mechanism m) {
  switch (m) {
    case Mechanism::saddle_fixed_point:
      return "saddle_fixed_point";
    case Mechanism::hyperbolic_orbit:
      return "hyperbolic_orbit";
    case Mechanism::positive_wkb_exponent:
      return "positive_wkb_exponent";
    case Mechanism::inconclusive:
      return "inconclusive";
  }
  return "?";
}

Mechanism mechanism_from_string(const std::string& name) {
  for (Mechanism m : {Mechanism::saddle_fixed_point, Mechanism::hyperbolic_orbit, Mechanism::positive_wkb_exponent,
                      Mechanism::inconclusive})
    if (to_string(m) == name) return m;
  throw InvalidArgument("unknown mechanism '" + name + "'");
}

Budget Budget::preset(const std::string& name) {
  Budget b;
  if (name == "default") return b;
  if (name == "quick") {
    b.T_max = 20.0;
    b.n_seeds = 8;
    b.wkb_samples = 8;
    return b;
  }
  throw InvalidArgument("unknown budget preset '" + name + "' (expected default or quick)");
}

namespace {

dynamics::OrbitOptions orbit_options(const Budget& budget, const fields::FourierField* alpha) {
  dynamics::OrbitOptions o = budget.orbits;
  o.T_max = budget.T_max;
  o.n_seeds = budget.n_seeds;
  o.seed = budget.seed;
  o.threads = budget.threads;
  if (alpha) o.contact_form = *alpha;
  return o;
}

double max_real_part(const dynamics::FixedPointRecord& r) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& l : r.eigenvalues) m = std::max(m, l.real());
  return m;
}

double orbit_exponent(const dynamics::PeriodicOrbitRecord& o) {
  return std::log(std::max(std::abs(o.multipliers[0]), std::abs(o.multipliers[1]))) / o.period;
}

bool is_hyperbolic(OrbitType t) { return t == OrbitType::positive_hyperbolic || t == OrbitType::negative_hyperbolic; }

nlohmann::json tolerance_record(const Budget& b) {
  return {{"newton_tol", b.fixed_points.newton_tol}, {"eig_tol", b.fixed_points.eig_tol},
          {"dedup_tol", b.fixed_points.dedup_tol},   {"orbit_tol", b.orbits.orbit_tol},
          {"mult_tol", b.orbits.mult_tol},           {"T_max", b.T_max},
          {"n_seeds", b.n_seeds},                    {"wkb_T", b.wkb_T},
          {"wkb_threshold", b.wkb_threshold},        {"reeb_tol", b.reeb_tol},
          {"seed", b.seed}};
}

void fixed_point_stage(const dynamics::VectorField& u, const Budget& budget, InstabilityCertificate& cert) {
  dynamics::FixedPointSearch fps;
  try {
    fps = dynamics::find_fixed_points(u, budget.fixed_points);
  } catch (const Error& e) {
    cert.diagnostics.push_back(std::string("fixed-point search: ") + e.what());
    return;
  }
  cert.fixed_points = static_cast<int>(fps.points.size());
  for (const auto& p : fps.points) {
    if (!p.nondegenerate) continue;
    ++cert.nondegenerate_fixed_points;
    if (cert.fixed_point) continue;
    if (p.type != FixedPointClass::saddle || !(max_real_part(p) > 0.0)) {
      std::ostringstream msg;
      msg << "nondegenerate zero at (" << p.x.transpose() << ") has no expanding direction";
      cert.diagnostics.push_back(msg.str());
      continue;
    }
    InstabilityCertificate trial;
    trial.mechanism = Mechanism::saddle_fixed_point;
    trial.fixed_point = p;
    if (!reverify(u, trial, budget)) {
      cert.diagnostics.push_back("saddle witness failed re-verification");
      continue;
    }
    cert.mechanism = Mechanism::saddle_fixed_point;
    cert.fixed_point = p;
    cert.exponent = max_real_part(p);
  }
}

void orbit_stage(const dynamics::VectorField& field, const std::string& field_name, const fields::FourierField* alpha,
                 const Budget& budget, InstabilityCertificate& cert) {
  dynamics::OrbitSearch search;
  try {
    search = dynamics::find_periodic_orbits(field, orbit_options(budget, alpha));
  } catch (const Error& e) {
    cert.diagnostics.push_back(std::string("periodic-orbit search: ") + e.what());
    return;
  }
  cert.recurrences = search.candidates;
  cert.orbits = static_cast<int>(search.orbits.size());
  if (!search.unresolved.empty())
    cert.diagnostics.push_back(std::to_string(search.unresolved.size()) + " orbit candidates unresolved");
  const dynamics::PeriodicOrbitRecord* best = nullptr;
  for (const auto& o : search.orbits) {
    if (!o.nondegenerate) continue;
    ++cert.nondegenerate_orbits;
    if (!is_hyperbolic(o.type)) continue;
    ++cert.hyperbolic_orbits;
    InstabilityCertificate trial;
    trial.mechanism = Mechanism::hyperbolic_orbit;
    trial.orbit = o;
    if (!reverify(field, trial, budget)) {
      cert.diagnostics.push_back("hyperbolic orbit with period " + std::to_string(o.period) +
                                 " failed re-verification");
      continue;
    }
    if (!best || orbit_exponent(o) > orbit_exponent(*best)) best = &o;
  }
  if (best) {
    cert.mechanism = Mechanism::hyperbolic_orbit;
    cert.orbit = *best;
    cert.orbit_field = field_name;
    cert.exponent = orbit_exponent(*best);
  } else if (cert.orbits > 0 && cert.nondegenerate_orbits == 0) {
    cert.diagnostics.push_back("every resolved orbit is degenerate");
  }
}

void wkb_stage(const dynamics::VectorField& u, const Budget& budget, InstabilityCertificate& cert) {
  const int n = budget.wkb_samples > 0 ? budget.wkb_samples : budget.n_seeds;
  std::mt19937_64 rng(budget.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<WkbWitness> starts(static_cast<std::size_t>(n));
  for (auto& s : starts) {
    const double two_pi = 2.0 * std::numbers::pi;
    s.x0 = Eigen::Vector3d(two_pi * unit(rng), two_pi * unit(rng), two_pi * unit(rng));
    Eigen::Vector3d xi;
    do {
      xi = Eigen::Vector3d(2 * unit(rng) - 1, 2 * unit(rng) - 1, 2 * unit(rng) - 1);
    } while (xi.norm() > 1.0 || xi.norm() < 1e-3);
    s.xi0 = xi.normalized();
    s.T = budget.wkb_T;
  }
  std::vector<std::string> errors(starts.size());
  std::vector<char> ok(starts.size(), 0);
  detail::parallel_for(n, budget.threads, [&](int i) {
    auto& s = starts[static_cast<std::size_t>(i)];
    try {
      s.exponent = wkb_exponent(u, s.x0, s.xi0, s.T).sustained_exponent;
      ok[static_cast<std::size_t>(i)] = 1;
    } catch (const Error& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  });
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (ok[i])
      order.push_back(i);
    else
      cert.diagnostics.push_back("WKB sample " + std::to_string(i) + ": " + errors[i]);
  }
  if (order.empty()) return;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return starts[a].exponent > starts[b].exponent; });
  cert.max_wkb_exponent = starts[order.front()].exponent;
  int rejected = 0;
  for (std::size_t i : order) {
    if (!(starts[i].exponent > budget.wkb_threshold)) break;
    InstabilityCertificate trial;
    trial.mechanism = Mechanism::positive_wkb_exponent;
    trial.wkb = starts[i];
    bool confirmed = false;
    try {
      confirmed = reverify(u, trial, budget);
    } catch (const Error& e) {
      cert.diagnostics.push_back(std::string("WKB re-verification: ") + e.what());
    }
    if (!confirmed) {
      ++rejected;
      continue;
    }
    cert.mechanism = Mechanism::positive_wkb_exponent;
    cert.wkb = starts[i];
    cert.exponent = starts[i].exponent;
    break;
  }
  if (rejected > 0)
    cert.diagnostics.push_back(std::to_string(rejected) +
                               " WKB samples above the threshold lost their growth at twice the horizon");
}

}  // namespace

bool reverify(const dynamics::VectorField& u, const InstabilityCertificate& cert, const Budget& budget) {
  switch (cert.mechanism) {
    case Mechanism::saddle_fixed_point: {
      if (!cert.fixed_point) return false;
      const auto& p = *cert.fixed_point;
      const auto r = dynamics::classify_fixed_point(u, p.x, 0.1 * budget.fixed_points.eig_tol);
      return r.residual <= 0.1 * budget.fixed_points.newton_tol && r.type == FixedPointClass::saddle &&
             max_real_part(r) > 0.0;
    }
    case Mechanism::hyperbolic_orbit: {
      if (!cert.orbit) return false;
      const auto& o = *cert.orbit;
      const Eigen::Vector3d w(o.homology[0], o.homology[1], o.homology[2]);
      const Eigen::Vector3d end = dynamics::flow_map(u, o.x, o.period, 1e-13);
      if ((end - o.x - 2.0 * std::numbers::pi * w).norm() > 0.1 * budget.orbits.orbit_tol) return false;
      const auto mono = dynamics::monodromy(u, o.x, o.period, nullptr, 1e-12);
      return is_hyperbolic(dynamics::classify_multipliers(mono.p, 0.1 * budget.orbits.mult_tol));
    }
    case Mechanism::positive_wkb_exponent: {
      if (!cert.wkb) return false;
      WkbOptions opt;
      opt.tol = 1e-11;
      return wkb_exponent(u, cert.wkb->x0, cert.wkb->xi0, 2.0 * cert.wkb->T, 2, opt).sustained_exponent >
             budget.wkb_threshold;
    }
    case Mechanism::inconclusive:
      return true;
  }
  return false;
}

InstabilityCertificate certify_field(const dynamics::VectorField& u, const fields::FourierField* alpha,
                                     const Budget& budget) {
  InstabilityCertificate cert;
  cert.tolerances = tolerance_record(budget);
  fixed_point_stage(u, budget, cert);
  if (cert.mechanism != Mechanism::inconclusive) return cert;
  orbit_stage(u, "velocity", alpha, budget, cert);
  if (cert.mechanism != Mechanism::inconclusive) return cert;
  wkb_stage(u, budget, cert);
  return cert;
}

double rms_speed(const dynamics::VectorField& u, const fields::MetricField& g, int n) {
  if (n < 1) throw InvalidArgument("rms_speed needs a positive grid size");
  const double h = 2.0 * M_PI / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Eigen::Vector3d x(h * i, h * j, h * k);
        const Eigen::Vector3d v = u.value(x);
        sum += v.dot(g.at(x) * v);
      }
  return std::sqrt(sum / (double(n) * n * n));
}

namespace {

fields::FourierField normalized_form(const fields::MetricField& g, const curlspec::EigenPair& pair, double& scale) {
  const double rms = rms_speed(dynamics::SharpField(g, pair.alpha), g);
  if (!(rms > 0.0) || !std::isfinite(rms)) throw InvalidArgument("certify needs a nonzero eigenform");
  scale = 1.0 / rms;
  fields::FourierField alpha = pair.alpha;
  alpha *= scale;
  return alpha;
}

}  // namespace

InstabilityCertificate certify(const fields::MetricField& g, const curlspec::EigenPair& pair, const Budget& budget,
                               const std::string& metric_id, const std::string& field_id) {
  if (pair.lambda == 0.0) throw InvalidArgument("certify needs a nonzero eigenvalue");
  InstabilityCertificate cert;
  const fields::FourierField alpha = normalized_form(g, pair, cert.field_scale);
  const dynamics::SharpField u(g, alpha);
  cert.lambda = pair.lambda;
  cert.metric_id = metric_id;
  cert.field_id = field_id;
  cert.tolerances = tolerance_record(budget);

  fixed_point_stage(u, budget, cert);
  if (cert.mechanism != Mechanism::inconclusive) return cert;

  std::optional<contact::BeltramiReeb> reeb;
  try {
    reeb = contact::beltrami_to_reeb_form(alpha, g, budget.reeb_tol);
  } catch (const Error& e) {
    cert.diagnostics.push_back(std::string("Reeb field: ") + e.what() + "; searching orbits of u instead");
  }
  if (reeb)
    orbit_stage(*reeb->reeb, "reeb", &alpha, budget, cert);
  else
    orbit_stage(u, "velocity", &alpha, budget, cert);
  if (cert.mechanism != Mechanism::inconclusive) return cert;

  wkb_stage(u, budget, cert);
  return cert;
}

dynamics::VectorFieldPtr witness_field(const fields::MetricField& g, const curlspec::EigenPair& pair,
                                       const InstabilityCertificate& cert, const Budget& budget) {
  fields::FourierField alpha = pair.alpha;
  alpha *= cert.field_scale;
  if (cert.orbit && cert.orbit_field == "reeb") return contact::beltrami_to_reeb_form(alpha, g, budget.reeb_tol).reeb;
  return std::make_shared<dynamics::SharpField>(g, alpha);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const InstabilityCertificate& c) {
  nlohmann::json j;
  j["mechanism"] = to_string(c.mechanism);
  j["exponent"] = c.exponent;
  j["lambda"] = c.lambda;
  j["field_scale"] = c.field_scale;
  j["metric"] = c.metric_id;
  j["field"] = c.field_id;
  nlohmann::json witness = nullptr;
  if (c.fixed_point) {
    witness = io::to_json(*c.fixed_point);
  } else if (c.orbit) {
    witness = io::to_json(*c.orbit);
    witness["field"] = c.orbit_field;
  } else if (c.wkb) {
    witness = {{"x0", io::to_json(c.wkb->x0)}, {"xi0", io::to_json(c.wkb->xi0)}, {"T", c.wkb->T},
               {"exponent", c.wkb->exponent}};
  }
  j["witness"] = witness;
  j["search"] = {{"fixed_points", c.fixed_points},
                 {"nondegenerate_fixed_points", c.nondegenerate_fixed_points},
                 {"orbits", c.orbits},
                 {"nondegenerate_orbits", c.nondegenerate_orbits},
                 {"hyperbolic_orbits", c.hyperbolic_orbits},
                 {"recurrences", c.recurrences},
                 {"max_wkb_exponent", c.max_wkb_exponent}};
  j["diagnostics"] = c.diagnostics;
  j["tolerances"] = c.tolerances;
  return j;
}

}  // namespace curllab::instability
