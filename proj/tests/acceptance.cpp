// Acceptance checks: one PASS/FAIL line per criterion. Exit status 0 iff all
// criteria pass.

#include "curllab/contact.hpp"
#include "curllab/curlspec.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"
#include "curllab/instability.hpp"
#include "curllab/io.hpp"
#include "curllab/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace curllab;
using fields::FourierField;
using fields::MetricField;
using fields::Rank;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& check) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!out.pass) ++failures;
  std::printf("%s %s: %s [%.1f s]\n", out.pass ? "PASS" : "FAIL", name.c_str(), out.detail.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Number of wavevectors in the box |m_i| <= n for each |m|^2.
std::map<int, int> lattice_shells(int n) {
  std::map<int, int> shells;
  for (int a = -n; a <= n; ++a)
    for (int b = -n; b <= n; ++b)
      for (int c = -n; c <= n; ++c) {
        const int s = a * a + b * b + c * c;
        if (s > 0) ++shells[s];
      }
  return shells;
}

/// Zeros of u located by a fine grid scan and finite-difference Newton.
std::vector<Eigen::Vector3d> grid_newton_zeros(const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& u,
                                               int n) {
  const double h = 2.0 * M_PI / n;
  std::vector<Eigen::Vector3d> found;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Eigen::Vector3d x((i + 0.5) * h, (j + 0.5) * h, (k + 0.5) * h);
        if (u(x).norm() > 0.6) continue;
        for (int it = 0; it < 50; ++it) {
          Eigen::Matrix3d jac;
          for (int d = 0; d < 3; ++d) {
            const Eigen::Vector3d e = 1e-6 * Eigen::Vector3d::Unit(d);
            jac.col(d) = (u(x + e) - u(x - e)) / 2e-6;
          }
          const Eigen::Vector3d step = jac.fullPivLu().solve(-u(x));
          x += step.norm() > 0.5 ? (0.5 / step.norm()) * step : step;
          if (step.norm() < 1e-14) break;
        }
        if (u(x).norm() > 1e-10) continue;
        for (int d = 0; d < 3; ++d) x[d] -= 2.0 * M_PI * std::floor(x[d] / (2.0 * M_PI));
        bool seen = false;
        for (const auto& y : found) seen = seen || dynamics::torus_distance(x, y) < 1e-6;
        if (!seen) found.push_back(x);
      }
  return found;
}

// ---------------------------------------------------------------------------

Outcome flat_spectrum() {
  const auto t0 = std::chrono::steady_clock::now();
  const int n = 3;
  const auto values = curlspec::full_spectrum(MetricField::flat(), n);
  const auto shells = lattice_shells(n);
  std::map<int, int> pos, neg;
  double worst = 0.0;
  int unmatched = 0;
  for (double v : values) {
    if (std::abs(v) < 1e-8) continue;
    const int s = static_cast<int>(std::lround(v * v));
    const double err = std::abs(std::abs(v) - std::sqrt(double(s)));
    if (!shells.count(s) || err > 1e-8) {
      ++unmatched;
      continue;
    }
    worst = std::max(worst, err);
    ++(v > 0 ? pos : neg)[s];
  }
  bool counts = true;
  for (const auto& [s, c] : shells) counts = counts && pos[s] == c && neg[s] == c;
  const double secs = elapsed(t0);
  const bool mult = pos[1] == 6 && pos[2] == 12 && pos[3] == 8 && neg[1] == 6 && neg[2] == 12 && neg[3] == 8;
  return {counts && mult && unmatched == 0 && worst <= 1e-8 && secs <= 60.0,
          fmt("N=3, max error %.2e, multiplicities %d/%d/%d (|m|^2=1/2/3), unmatched %d, all shells %s, %.1f s",
              worst, pos[1], pos[2], pos[3], unmatched, counts ? "match" : "differ", secs)};
}

Outcome eigenform_residual() {
  double worst = 0.0;
  for (int k : {1, 2, 3})
    worst = std::max(worst, curlspec::residual(MetricField::flat(), fields::tight_one_form(k, k), double(k)));
  return {worst <= 1e-10, fmt("max residual %.2e over k = 1, 2, 3", worst)};
}

Outcome self_adjointness() {
  double worst = 0.0;
  lab::Ensemble e;
  e.eps = 0.3;
  e.mode_cutoff = 2;
  e.seed = 2024;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto random_form = [&](int n) {
    FourierField f(Rank::one_form, n);
    for (std::size_t i = 0; i < f.mode_count(); ++i) {
      const auto m = f.wavevector(i);
      const std::size_t j = f.mode_index({-m[0], -m[1], -m[2]});
      if (j < i) continue;
      for (int c = 0; c < 3; ++c) f.set_real(m, c, {unit(rng), j == i ? 0.0 : unit(rng)});
    }
    return f;
  };
  for (int s = 0; s < 5; ++s) {
    const MetricField g = lab::sample_metric(e, static_cast<std::uint64_t>(s));
    const curlspec::CurlOperator op(g, 2);
    std::vector<FourierField> basis, images;
    for (int i = 0; i < 6; ++i) {
      basis.push_back(op.project_coexact(random_form(2)));
      images.push_back(op.apply(basis.back()));
    }
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const double a = fields::l2_inner(g, images[i], basis[j]);
        const double b = fields::l2_inner(g, basis[i], images[j]);
        const double scale = fields::l2_norm(g, images[i]) * fields::l2_norm(g, basis[j]) +
                             fields::l2_norm(g, basis[i]) * fields::l2_norm(g, images[j]);
        worst = std::max(worst, std::abs(a - b) / scale);
      }
  }
  return {worst <= 1e-8, fmt("max relative asymmetry %.2e over 5 random metrics at N=2", worst)};
}

Outcome conformal_covariance() {
  const auto flat = curlspec::full_spectrum(MetricField::flat(), 3);
  const auto conf = curlspec::full_spectrum(MetricField::conformal(2.0), 3);
  if (flat.size() != conf.size()) return {false, "spectra differ in size"};
  double worst = 0.0;
  for (std::size_t i = 0; i < flat.size(); ++i) worst = std::max(worst, std::abs(conf[i] - flat[i] / 2.0));
  return {worst <= 1e-8, fmt("c=2, N=3, max |lambda_c - lambda/c| = %.2e over %zu eigenvalues", worst, flat.size())};
}

Outcome genericity_splitting() {
  const auto t0 = std::chrono::steady_clock::now();
  lab::SweepConfig c;
  c.samples = 20;
  c.truncation = 3;
  c.ensemble.eps = 1e-2;
  c.ensemble.r = 2.0;
  c.ensemble.seed = 1;
  c.window_lower = 0.5;
  c.window_upper = 1.2;
  const auto records = lab::run_sweep(c);
  int split = 0;
  double smallest = 1e300;
  std::string bad;
  for (const auto& r : records) {
    std::vector<double> l;
    for (const auto& p : r.pairs) l.push_back(p.lambda);
    std::sort(l.begin(), l.end());
    double gap = 1e300;
    for (std::size_t i = 1; i < l.size(); ++i) gap = std::min(gap, l[i] - l[i - 1]);
    smallest = std::min(smallest, gap);
    if (!r.error && l.size() == 6 && gap > 1e-8 * c.ensemble.eps)
      ++split;
    else
      bad += " " + std::to_string(r.sample);
  }
  const double secs = elapsed(t0);
  return {split == 20 && secs <= 600.0,
          fmt("%d/20 samples split into 6 simple eigenvalues, smallest gap %.2e, ensemble seed %llu, config %s, %.1f s%s",
              split, smallest, static_cast<unsigned long long>(c.ensemble.seed), lab::config_hash(c).c_str(), secs,
              bad.empty() ? "" : (", failing samples:" + bad).c_str())};
}

Outcome abc_pipeline() {
  const MetricField g = MetricField::flat();
  curlspec::EigenPair pair;
  pair.lambda = 1.0;
  pair.alpha = fields::abc_one_form(1.0, 1.0, 1.0, 1);
  pair.residual = curlspec::residual(g, pair.alpha, 1.0);
  const dynamics::SharpField u(g, pair.alpha);
  const auto search = dynamics::find_fixed_points(u);
  const auto oracle = grid_newton_zeros(
      [](const Eigen::Vector3d& x) -> Eigen::Vector3d {
        return {std::sin(x[2]) + std::cos(x[1]), std::sin(x[0]) + std::cos(x[2]), std::sin(x[1]) + std::cos(x[0])};
      },
      24);
  int matched = 0;
  double trace = 0.0;
  bool nondeg = true;
  for (const auto& p : search.points) {
    trace = std::max(trace, std::abs(p.trace));
    nondeg = nondeg && p.nondegenerate;
    for (const auto& y : oracle)
      if (dynamics::torus_distance(p.x, y) < 1e-8) {
        ++matched;
        break;
      }
  }
  const auto cert = instability::certify(g, pair, instability::Budget::preset("quick"), "flat", "abc(1,1,1)");
  const bool ok = search.points.size() == 8 && oracle.size() == 8 && matched == 8 && trace <= 1e-8 && nondeg &&
                  cert.mechanism == instability::Mechanism::saddle_fixed_point && pair.residual <= 1e-10;
  return {ok, fmt("%zu fixed points (oracle %zu, matched %d), max |trace| %.2e, all nondegenerate %s, certificate %s "
                  "with exponent %.6f",
                  search.points.size(), oracle.size(), matched, trace, nondeg ? "yes" : "no",
                  instability::to_string(cert.mechanism).c_str(), cert.exponent)};
}

Outcome orbit_machinery() {
  const dynamics::AbcField u(1.0, 1.0, 1.0);
  dynamics::OrbitOptions opt;
  opt.T_max = 30.0;
  opt.n_seeds = 32;
  opt.seed = 7;
  opt.contact_form = fields::abc_one_form(1.0, 1.0, 1.0, 1);
  const auto search = dynamics::find_periodic_orbits(u, opt);
  double det = 0.0, flow = 0.0;
  int nondeg = 0, parity_ok = 0, hyperbolic = 0;
  for (const auto& o : search.orbits) {
    det = std::max(det, std::abs(o.transverse_det - 1.0));
    flow = std::max(flow, o.flow_multiplier_error);
    if (!o.nondegenerate) continue;
    ++nondeg;
    if (o.type != dynamics::OrbitType::elliptic) ++hyperbolic;
    if (!o.cz_index) continue;
    const bool even = *o.cz_index % 2 == 0;
    if (even == (o.type == dynamics::OrbitType::positive_hyperbolic)) ++parity_ok;
  }
  const bool ok = !search.orbits.empty() && det <= 1e-6 && flow <= 1e-6 && parity_ok == nondeg;
  return {ok, fmt("ABC(1,1,1), T_max=30: %zu orbits (%d nondegenerate, %d hyperbolic), max |det P - 1| %.2e, max "
                  "trivial-multiplier error %.2e, parity consistent on %d/%d, %zu unresolved candidates",
                  search.orbits.size(), nondeg, hyperbolic, det, flow, parity_ok, nondeg, search.unresolved.size())};
}

Outcome reeb_correspondence() {
  const MetricField g = MetricField::flat();
  double worst = 0.0;
  for (int k : {1, 2}) {
    const FourierField u = fields::tight_one_form(k, k).with_rank(Rank::vector);
    const auto br = contact::beltrami_to_reeb(u, g);
    const auto x = contact::reeb_field(contact::ContactForm(br.alpha));
    for (int i = 0; i < 6; ++i)
      for (int j = 0; j < 6; ++j)
        for (int l = 0; l < 6; ++l) {
          const Eigen::Vector3d p(1.05 * i + 0.1, 1.05 * j + 0.2, 1.05 * l + 0.3);
          const Eigen::Vector3d v(std::sin(k * p[2]), std::cos(k * p[2]), 0.0);
          worst = std::max(worst, (x->value(p) - v / v.squaredNorm()).norm());
        }
  }
  const auto a = contact::tight_form(1);
  const auto am = contact::adapted_metric(a, contact::AlmostComplexStructure::standard(a, 12));
  double flat_dev = 0.0, eq5 = 0.0;
  const Eigen::Matrix2d jstd = (Eigen::Matrix2d() << 0.0, -1.0, 1.0, 0.0).finished();
  for (int i = 0; i < 5; ++i) {
    const Eigen::Vector3d p(0.7 * i + 0.1, 1.3 * i + 0.2, 1.1 * i + 0.3);
    const Eigen::Matrix3d gp = am.metric.at(p);
    flat_dev = std::max(flat_dev, (gp - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    // g(v, w) = alpha(v) alpha(w) + d alpha(v, J w) on the frame {X, e1, e2}.
    const Eigen::Vector3d al(std::sin(p[2]), std::cos(p[2]), 0.0);
    const Eigen::Vector3d curl = al;
    const auto f = contact::kernel_frame(al, curl, 2);
    const std::array<Eigen::Vector3d, 3> frame{al, f.e1, f.e2};
    auto jmap = [&](int idx) -> Eigen::Vector3d {
      if (idx == 0) return Eigen::Vector3d::Zero();
      const Eigen::Vector2d c = jstd.col(idx - 1);
      return c[0] * f.e1 + c[1] * f.e2;
    };
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s) {
        const double rhs = al.dot(frame[r]) * al.dot(frame[s]) + curl.dot(frame[r].cross(jmap(s)));
        eq5 = std::max(eq5, std::abs(frame[r].dot(gp * frame[s]) - rhs));
      }
  }
  const bool ok = worst <= 1e-8 && flat_dev <= 1e-8 && std::abs(am.lambda - 1.0) <= 1e-8 && eq5 <= 1e-8 &&
                  am.residual <= 1e-8;
  return {ok, fmt("max |X - u/|u|^2| %.2e (k=1,2); adapted metric: max |g - I| %.2e, lambda %.12f, max defect of "
                  "g = alpha^2 + d alpha(., J .) %.2e, eigen-residual %.2e",
                  worst, flat_dev, am.lambda, eq5, am.residual)};
}

Outcome wkb() {
  const double nu = 0.7;
  Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
  a(0, 0) = nu;
  a(1, 1) = -nu;
  const dynamics::LinearField saddle(a);
  const auto r = instability::wkb_exponent(saddle, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), 50.0, 1);
  const double rel = std::abs(r.exponent - nu) / nu;
  const dynamics::ConstantField constant(Eigen::Vector3d(0.3, -0.2, 1.0));
  const auto c = instability::wkb_exponent(constant, Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(1, 1, 0), 50.0);
  double drift = 0.0;
  const dynamics::AbcField abc(1.0, 1.0, 1.0);
  const std::array<std::pair<Eigen::Vector3d, Eigen::Vector3d>, 3> starts{
      {{Eigen::Vector3d(0.4, 1.1, 2.3), Eigen::Vector3d(0.2, -0.5, 0.8)},
       {Eigen::Vector3d(3.0, 0.5, 5.1), Eigen::Vector3d(1.0, 0.0, 0.3)},
       {Eigen::Vector3d(5.5, 4.2, 0.9), Eigen::Vector3d(-0.4, 0.9, 0.1)}}};
  for (const auto& [x0, xi0] : starts) {
    const auto d = instability::wkb_exponent(abc, x0, xi0, 100.0);
    drift = std::max({drift, d.orthogonality_drift, d.transport_drift});
  }
  const auto d = instability::wkb_exponent(saddle, Eigen::Vector3d(0.1, 0.1, 0.1), Eigen::Vector3d(1, 1, 1), 100.0);
  drift = std::max({drift, d.orthogonality_drift, d.transport_drift});
  const bool ok = rel <= 1e-2 && std::abs(c.exponent) <= 1e-6 && drift <= 1e-6;
  return {ok, fmt("frozen saddle nu=%.1f: exponent %.6f (relative error %.2e); constant field %.2e; max drift over "
                  "T=100 %.2e",
                  nu, r.exponent, rel, c.exponent, drift)};
}

Outcome determinism() {
  lab::SweepConfig c;
  c.samples = 4;
  c.truncation = 2;
  c.ensemble.eps = 2e-2;
  c.ensemble.seed = 17;
  c.certify = true;
  c.budget = "quick";
  std::ostringstream one, eight;
  c.threads = 1;
  lab::run_sweep(c, &one);
  c.threads = 8;
  lab::run_sweep(c, &eight);
  const bool same = one.str() == eight.str();
  return {same && !one.str().empty(),
          fmt("%zu bytes of JSON lines with certification, 1 vs 8 threads %s, config %s", one.str().size(),
              same ? "identical" : "differ", lab::config_hash(c).c_str())};
}

}  // namespace

int main() {
  run("flat spectrum", flat_spectrum);
  run("eigenform residual", eigenform_residual);
  run("self-adjointness", self_adjointness);
  run("conformal covariance", conformal_covariance);
  run("genericity splitting", genericity_splitting);
  run("ABC pipeline", abc_pipeline);
  run("orbit machinery", orbit_machinery);
  run("Reeb correspondence", reeb_correspondence);
  run("WKB exponent", wkb);
  run("determinism", determinism);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
