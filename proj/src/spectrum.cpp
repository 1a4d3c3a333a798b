#include "spectrum_internal.hpp"

#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curllab::curlspec {

using fields::Complex;

Window Window::smallest(int count) {
  if (count <= 0) throw InvalidArgument("eigenvalue count must be positive");
  Window w;
  w.kind = Kind::count;
  w.count = count;
  return w;
}

Window Window::interval(double lower, double upper) {
  if (!(lower < upper)) throw InvalidArgument("eigenvalue interval must satisfy lower < upper");
  if (lower <= 0.0 && upper >= 0.0) throw InvalidArgument("eigenvalue window must exclude 0");
  Window w;
  w.kind = Kind::interval;
  w.lower = lower;
  w.upper = upper;
  return w;
}

std::string Window::describe() const {
  std::ostringstream s;
  if (kind == Kind::count)
    s << "count:" << count;
  else
    s << "interval:" << lower << "," << upper;
  return s.str();
}

namespace {

bool by_modulus(double a, double b) {
  if (std::abs(std::abs(a) - std::abs(b)) > 0.0) return std::abs(a) < std::abs(b);
  return a > b;
}

/// Flips alpha so that its first largest-modulus coefficient has positive
/// real part (imaginary part when the real part vanishes).
void fix_sign(FourierField& alpha) {
  const double big = alpha.max_abs_coeff();
  if (big == 0.0) return;
  for (const Complex c : alpha.data()) {
    if (std::abs(c) < big * (1.0 - 1e-8)) continue;
    const double key = std::abs(c.real()) > 1e-8 * big ? c.real() : c.imag();
    if (key < 0.0) alpha *= -1.0;
    return;
  }
}

struct Clusters {
  std::vector<int> multiplicity;
  std::vector<double> gap;
};

/// Cluster sizes and gaps of `values` relative to the full sorted spectrum.
Clusters cluster(const std::vector<double>& values, std::vector<double> spectrum, double gap_tol) {
  std::sort(spectrum.begin(), spectrum.end());
  Clusters c;
  for (double v : values) {
    const auto pos = std::lower_bound(spectrum.begin(), spectrum.end(), v - gap_tol);
    int mult = 0;
    for (auto it = pos; it != spectrum.end() && *it <= v + gap_tol; ++it) ++mult;
    double gap = std::numeric_limits<double>::infinity();
    bool self_seen = false;
    for (double s : spectrum) {
      if (!self_seen && s == v) {
        self_seen = true;
        continue;
      }
      gap = std::min(gap, std::abs(s - v));
    }
    c.multiplicity.push_back(std::max(1, mult));
    c.gap.push_back(gap);
  }
  return c;
}

EigenPair finish_pair(const MetricField& g, double lambda, FourierField alpha, const SpectrumOptions& options) {
  EigenPair p;
  p.lambda = lambda;
  const double norm = fields::l2_norm(g, alpha);
  alpha *= 1.0 / norm;
  alpha = alpha.hermitianized();
  fix_sign(alpha);
  p.residual = residual(g, alpha, lambda);
  p.tolerance = options.tolerance;
  const FourierField div = fields::codifferential(g, alpha);
  p.codifferential_residual = std::sqrt(std::max(0.0, fields::scalar_inner(g, div, div)));
  p.alpha = std::move(alpha);
  if (p.residual > options.tolerance) {
    std::ostringstream msg;
    msg << "eigenpair lambda = " << lambda << " has residual " << p.residual << " above tolerance "
        << options.tolerance;
    throw NonConvergence(msg.str());
  }
  return p;
}

bool use_dense(int truncation, const Window& window, const SpectrumOptions& options) {
  switch (options.solver) {
    case SolverKind::dense:
      return true;
    case SolverKind::krylov:
      if (window.kind == Window::Kind::count)
        throw InvalidArgument("the Krylov solver needs an interval window; use the dense solver for count windows");
      return false;
    case SolverKind::automatic:
      break;
  }
  return truncation <= options.dense_max_truncation || window.kind == Window::Kind::count;
}

}  // namespace

std::vector<double> full_spectrum(const MetricField& g, int truncation) {
  const auto d = detail::dense_spectrum(g, truncation, false);
  return {d.values.data(), d.values.data() + d.values.size()};
}

std::vector<EigenPair> eigenpairs(const MetricField& g, int truncation, const Window& window,
                                  const SpectrumOptions& options) {
  if (window.kind == Window::Kind::interval && window.lower <= 0.0 && window.upper >= 0.0)
    throw InvalidArgument("eigenvalue window must exclude 0");
  if (window.kind == Window::Kind::count && window.count <= 0) throw InvalidArgument("eigenvalue count must be positive");

  std::vector<double> lambdas;
  std::vector<FourierField> forms;
  std::vector<double> spectrum;
  if (use_dense(truncation, window, options)) {
    const auto d = detail::dense_spectrum(g, truncation, true);
    std::vector<int> idx(static_cast<std::size_t>(d.values.size()));
    for (int i = 0; i < d.values.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return by_modulus(d.values[a], d.values[b]); });
    for (int i : idx) {
      const double l = d.values[i];
      if (window.kind == Window::Kind::count) {
        if (static_cast<int>(lambdas.size()) >= window.count) break;
      } else if (l < window.lower || l > window.upper) {
        continue;
      }
      lambdas.push_back(l);
      forms.push_back(d.field(i));
    }
    spectrum.assign(d.values.data(), d.values.data() + d.values.size());
  } else {
    auto raw = detail::krylov_interval(g, truncation, window.lower, window.upper, options);
    std::stable_sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) { return by_modulus(a.lambda, b.lambda); });
    for (auto& r : raw) {
      lambdas.push_back(r.lambda);
      forms.push_back(std::move(r.alpha));
    }
    spectrum = lambdas;
  }

  double scale = 0.0;
  for (double l : lambdas) scale = std::max(scale, std::abs(l));
  const Clusters cl = cluster(lambdas, spectrum, options.gap_rel * scale);

  std::vector<EigenPair> out;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    EigenPair p = finish_pair(g, lambdas[i], std::move(forms[i]), options);
    p.index = static_cast<int>(i);
    p.multiplicity = cl.multiplicity[i];
    p.gap = cl.gap[i];
    out.push_back(std::move(p));
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

double overlap(const MetricField& g, const FourierField& a, const FourierField& b) {
  return std::abs(fields::l2_inner(g, a, b)) / (fields::l2_norm(g, a) * fields::l2_norm(g, b));
}

}  // namespace

TrackResult track_eigenvalue(const std::function<MetricField(double)>& path, const EigenPair& pair0, int steps,
                             const TrackOptions& options) {
  if (steps <= 0) throw InvalidArgument("track_eigenvalue needs at least one step");
  const int n = pair0.alpha.truncation();
  SpectrumOptions sopt;

  auto gap_at = [](const Eigen::VectorXd& values, int j) {
    double gap = std::numeric_limits<double>::infinity();
    for (int i = 0; i < values.size(); ++i)
      if (i != j) gap = std::min(gap, std::abs(values[i] - values[j]));
    return gap;
  };

  // Simplicity of the starting pair.
  {
    const auto d = detail::dense_spectrum(path(0.0), n, false);
    const double tol = sopt.gap_rel * d.values.cwiseAbs().maxCoeff();
    double gap = std::numeric_limits<double>::infinity();
    int self = -1;
    for (int i = 0; i < d.values.size(); ++i)
      if (self < 0 && std::abs(d.values[i] - pair0.lambda) <= tol)
        self = i;
      else
        gap = std::min(gap, std::abs(d.values[i] - pair0.lambda));
    if (self < 0) throw InvalidArgument("pair0 is not an eigenpair of path(0)");
    if (!(gap > tol)) throw InvalidArgument("pair0 is not simple at s = 0");
  }

  TrackResult result;
  double lambda = pair0.lambda;
  FourierField alpha = pair0.alpha;
  double s = 0.0;
  const double h0 = 1.0 / steps;
  double h = h0;
  {
    const auto d = detail::dense_spectrum(path(0.0), n, false);
    int self = 0;
    for (int i = 1; i < d.values.size(); ++i)
      if (std::abs(d.values[i] - lambda) < std::abs(d.values[self] - lambda)) self = i;
    result.points.push_back({0.0, lambda, gap_at(d.values, self)});
  }
  int refinements = 0;
  double slope = 0.0;
  while (s < 1.0 - 1e-14) {
    const double s_next = std::min(1.0, s + h);
    const MetricField g = path(s_next);
    const auto d = detail::dense_spectrum(g, n, true);

    // Candidates: the eigenvalues nearest to the linear prediction.
    const double predicted = lambda + slope * (s_next - s);
    std::vector<int> idx(static_cast<std::size_t>(d.values.size()));
    for (int i = 0; i < d.values.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
      return std::abs(d.values[a] - predicted) < std::abs(d.values[b] - predicted);
    });
    const std::size_t nc = std::min<std::size_t>(idx.size(), 8);
    std::vector<double> ov(nc);
    for (std::size_t c = 0; c < nc; ++c) ov[c] = overlap(g, alpha, d.field(idx[c]));
    const std::size_t best = static_cast<std::size_t>(std::max_element(ov.begin(), ov.end()) - ov.begin());
    double rival = 0.0;
    for (std::size_t c = 0; c < nc; ++c)
      if (c != best) rival = std::max(rival, ov[c]);
    const bool ok = ov[best] >= options.min_overlap && rival <= options.max_rival_overlap;
    if (!ok) {
      if (refinements >= options.max_refinements) {
        std::ostringstream msg;
        msg << "unresolved eigenvalue crossing near s = " << s_next << " (best overlap " << ov[best]
            << ", rival overlap " << rival << ")";
        throw BranchAmbiguity(msg.str(), s_next);
      }
      h *= 0.5;
      ++refinements;
      continue;
    }
    const int j = idx[best];
    FourierField next = d.field(j);
    if (fields::l2_inner(g, next, alpha) < 0.0) next *= -1.0;
    alpha = next;
    slope = (d.values[j] - lambda) / (s_next - s);
    lambda = d.values[j];
    s = s_next;
    result.points.push_back({s, lambda, gap_at(d.values, j)});
    refinements = 0;
    h = std::min(h0, 2.0 * h);
  }
  result.min_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : result.points) result.min_gap = std::min(result.min_gap, p.gap);
  result.final_pair = finish_pair(path(1.0), lambda, alpha, sopt);
  return result;
}

}  // namespace curllab::curlspec
