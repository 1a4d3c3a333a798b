#include "curllab/fields.hpp"

#include "curllab/detail/krylov.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>

namespace curllab::fields {

namespace {

constexpr double kTorusVolume = 8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi;

Eigen::Vector3cd mode_vector(const FourierField& f, std::size_t mode) {
  const std::size_t n = f.mode_count();
  const auto d = f.data();
  return {d[mode], d[n + mode], d[2 * n + mode]};
}

void set_mode_vector(FourierField& f, std::size_t mode, const Eigen::Vector3cd& v) {
  const std::size_t n = f.mode_count();
  auto d = f.data();
  d[mode] = v[0];
  d[n + mode] = v[1];
  d[2 * n + mode] = v[2];
}

// Eigen's cross() conjugates complex operands.
Eigen::Vector3cd cross(const Eigen::Vector3d& k, const Eigen::Vector3cd& v) {
  return {k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]};
}

Eigen::Vector3d as_vector(const Wavevector& m) { return {double(m[0]), double(m[1]), double(m[2])}; }

/// Multiplies every mode of a three-component field by a constant matrix.
FourierField constant_multiply(const FourierField& f, const Eigen::Matrix3d& a, Rank out_rank) {
  FourierField out(out_rank, f.truncation());
  for (std::size_t m = 0; m < f.mode_count(); ++m) set_mode_vector(out, m, a.cast<Complex>() * mode_vector(f, m));
  return out;
}

Eigen::Matrix3d constant_metric(const MetricField& g) { return g.at(Eigen::Vector3d::Zero()); }

/// Samples f on the grid, maps each point through op and analyzes the result.
FourierField pointwise(const MetricField& g, const FourierField& f, Rank out_rank, int out_n,
                       const std::function<Eigen::Vector3d(const MetricSamples&, std::size_t,
                                                           const Eigen::Vector3d&)>& op) {
  const CollocationGrid grid = CollocationGrid::dealiased(std::max(f.truncation(), out_n), g.truncation());
  const auto samples = g.samples(grid);
  GridField in = grid.synthesize(f);
  GridField out = make_grid_field(out_rank, grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) out.set3(p, op(*samples, p, in.at3(p)));
  return grid.analyze(out, out_n);
}

}  // namespace

double coefficient_dot(const FourierField& a, const FourierField& b) {
  if (a.truncation() != b.truncation() || a.components() != b.components())
    return coefficient_dot(a.retruncated(std::max(a.truncation(), b.truncation())),
                           b.retruncated(std::max(a.truncation(), b.truncation())));
  double s = 0.0;
  const auto x = a.data();
  const auto y = b.data();
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
  return s;
}

FourierField exterior_d(const FourierField& field) {
  const Complex I(0.0, 1.0);
  if (field.rank() == Rank::scalar) {
    FourierField out(Rank::one_form, field.truncation());
    for (std::size_t m = 0; m < field.mode_count(); ++m) {
      const Eigen::Vector3d k = as_vector(field.wavevector(m));
      const Complex c = field.data()[m];
      set_mode_vector(out, m, Eigen::Vector3cd(I * k[0] * c, I * k[1] * c, I * k[2] * c));
    }
    return out;
  }
  if (field.rank() == Rank::one_form) {
    FourierField out(Rank::two_form, field.truncation());
    for (std::size_t m = 0; m < field.mode_count(); ++m) {
      set_mode_vector(out, m, I * cross(as_vector(field.wavevector(m)), mode_vector(field, m)));
    }
    return out;
  }
  throw UnsupportedRank("exterior derivative supports scalar and one_form input, got " + to_string(field.rank()));
}

FourierField hodge(const MetricField& g, const FourierField& field) {
  if (field.rank() == Rank::one_form) {
    if (g.is_constant()) {
      const Eigen::Matrix3d gc = constant_metric(g);
      return constant_multiply(field, std::sqrt(gc.determinant()) * gc.inverse(), Rank::two_form);
    }
    return pointwise(g, field, Rank::two_form, field.truncation(),
                     [](const MetricSamples& s, std::size_t p, const Eigen::Vector3d& a) -> Eigen::Vector3d {
                       return s.weight[p] * a;
                     });
  }
  if (field.rank() == Rank::two_form) {
    if (g.is_constant()) {
      const Eigen::Matrix3d gc = constant_metric(g);
      return constant_multiply(field, gc / std::sqrt(gc.determinant()), Rank::one_form);
    }
    return pointwise(g, field, Rank::one_form, field.truncation(),
                     [](const MetricSamples& s, std::size_t p, const Eigen::Vector3d& f) -> Eigen::Vector3d {
                       return s.g[p] * f / s.sqrt_det[p];
                     });
  }
  throw UnsupportedRank("Hodge star supports one_form and two_form input, got " + to_string(field.rank()));
}

FourierField sharp(const MetricField& g, const FourierField& alpha) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("sharp expects a one_form");
  if (g.is_constant()) return constant_multiply(alpha, constant_metric(g).inverse(), Rank::vector);
  return pointwise(g, alpha, Rank::vector, alpha.truncation(),
                   [](const MetricSamples& s, std::size_t p, const Eigen::Vector3d& a) -> Eigen::Vector3d {
                     return s.ginv[p] * a;
                   });
}

FourierField flat(const MetricField& g, const FourierField& u) {
  if (u.rank() != Rank::vector) throw UnsupportedRank("flat expects a vector field");
  if (g.is_constant()) return constant_multiply(u, constant_metric(g), Rank::one_form);
  return pointwise(g, u, Rank::one_form, u.truncation() + g.truncation(),
                   [](const MetricSamples& s, std::size_t p, const Eigen::Vector3d& v) -> Eigen::Vector3d {
                     return s.g[p] * v;
                   });
}

FourierField codifferential(const MetricField& g, const FourierField& alpha) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("codifferential expects a one_form");
  const Complex I(0.0, 1.0);
  FourierField out(Rank::scalar, alpha.truncation());
  if (g.is_constant()) {
    const Eigen::Matrix3d gc = constant_metric(g);
    const double sd = std::sqrt(gc.determinant());
    const Eigen::Matrix3cd w = (sd * gc.inverse()).cast<Complex>();
    for (std::size_t m = 0; m < alpha.mode_count(); ++m) {
      const Eigen::Vector3cd k = as_vector(alpha.wavevector(m)).cast<Complex>();
      out.data()[m] = -I * k.dot(w * mode_vector(alpha, m)) / sd;
    }
    return out;
  }
  const GramOperator gram(g, alpha.truncation());
  const FourierField wa = gram.apply_one_form(alpha);
  FourierField rhs(Rank::scalar, alpha.truncation());
  for (std::size_t m = 0; m < alpha.mode_count(); ++m) {
    const Eigen::Vector3cd k = as_vector(alpha.wavevector(m)).cast<Complex>();
    rhs.data()[m] = -I * k.dot(mode_vector(wa, m));
  }
  return gram.solve_scalar(rhs);
}

double l2_inner(const MetricField& g, const FourierField& a, const FourierField& b) {
  if (a.rank() != Rank::one_form || b.rank() != Rank::one_form) throw UnsupportedRank("l2_inner expects one_forms");
  const int n = std::max(a.truncation(), b.truncation());
  if (g.is_constant()) {
    const Eigen::Matrix3d gc = constant_metric(g);
    const FourierField wb = constant_multiply(b.retruncated(n), std::sqrt(gc.determinant()) * gc.inverse(),
                                              Rank::one_form);
    return kTorusVolume * coefficient_dot(a.retruncated(n), wb);
  }
  const CollocationGrid grid = CollocationGrid::dealiased(n, g.truncation());
  const auto s = g.samples(grid);
  const GridField ga = grid.synthesize(a);
  const GridField gb = grid.synthesize(b);
  double sum = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) sum += ga.at3(p).dot(s->weight[p] * gb.at3(p));
  return sum * grid.weight();
}

double l2_norm(const MetricField& g, const FourierField& a) { return std::sqrt(std::max(0.0, l2_inner(g, a, a))); }

double scalar_inner(const MetricField& g, const FourierField& f, const FourierField& h) {
  if (f.rank() != Rank::scalar || h.rank() != Rank::scalar) throw UnsupportedRank("scalar_inner expects scalars");
  const int n = std::max(f.truncation(), h.truncation());
  if (g.is_constant()) {
    const double sd = std::sqrt(constant_metric(g).determinant());
    return kTorusVolume * sd * coefficient_dot(f.retruncated(n), h.retruncated(n));
  }
  const CollocationGrid grid = CollocationGrid::dealiased(n, g.truncation());
  const auto s = g.samples(grid);
  const auto gf = grid.synthesize_component(f, 0);
  const auto gh = grid.synthesize_component(h, 0);
  double sum = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) sum += gf[p] * gh[p] * s->sqrt_det[p];
  return sum * grid.weight();
}

double contact_defect(const FourierField& alpha) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("contact_defect expects a one_form");
  const CollocationGrid grid = CollocationGrid::dealiased(alpha.truncation());
  const GridField a = grid.synthesize(alpha);
  const GridField c = grid.synthesize(exterior_d(alpha));
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) lo = std::min(lo, std::abs(a.at3(p).dot(c.at3(p))));
  return lo;
}

double contact_density(const FourierField& alpha, const Eigen::Vector3d& x) {
  return alpha.eval3(x).dot(exterior_d(alpha).eval3(x));
}

// ---------------------------------------------------------------------------

GramOperator::GramOperator(const MetricField& g, int truncation)
    : g_(g),
      n_(truncation),
      grid_(CollocationGrid::dealiased(truncation, g.truncation())),
      constant_(g.is_constant()) {
  if (constant_) {
    const Eigen::Matrix3d gc = constant_metric(g_);
    mean_sqrt_det_ = std::sqrt(gc.determinant());
    mean_weight_ = mean_sqrt_det_ * gc.inverse();
    return;
  }
  samples_ = g_.samples(grid_);
  mean_weight_.setZero();
  mean_sqrt_det_ = 0.0;
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    mean_weight_ += samples_->weight[p];
    mean_sqrt_det_ += samples_->sqrt_det[p];
  }
  mean_weight_ /= static_cast<double>(grid_.size());
  mean_sqrt_det_ /= static_cast<double>(grid_.size());
}

FourierField GramOperator::apply_one_form(const FourierField& a) const {
  if (constant_) return constant_multiply(a.retruncated(n_), mean_weight_, a.rank());
  GridField s = grid_.synthesize(a);
  for (std::size_t p = 0; p < grid_.size(); ++p) s.set3(p, samples_->weight[p] * s.at3(p));
  return grid_.analyze(s, n_);
}

FourierField GramOperator::apply_scalar(const FourierField& f) const {
  if (constant_) {
    FourierField out = f.retruncated(n_);
    out *= mean_sqrt_det_;
    return out;
  }
  auto s = grid_.synthesize_component(f, 0);
  for (std::size_t p = 0; p < grid_.size(); ++p) s[p] *= samples_->sqrt_det[p];
  return grid_.analyze_scalar(s, n_);
}

namespace {

constexpr int kMaxCgIterations = 1000;

FourierField gram_cg(const std::function<FourierField(const FourierField&)>& op,
                     const std::function<FourierField(const FourierField&)>& precond, const FourierField& rhs,
                     double rel_tol, const char* what) {
  return detail::pcg(op, precond, coefficient_dot, rhs, FourierField(rhs.rank(), rhs.truncation()), rel_tol,
                     kMaxCgIterations, what);
}

}  // namespace

FourierField GramOperator::solve_one_form(const FourierField& rhs, double rel_tol) const {
  const Eigen::Matrix3d inv = mean_weight_.inverse();
  if (constant_) return constant_multiply(rhs.retruncated(n_), inv, rhs.rank());
  return gram_cg([this](const FourierField& v) { return apply_one_form(v); },
             [&inv](const FourierField& v) { return constant_multiply(v, inv, v.rank()); }, rhs.retruncated(n_),
             rel_tol, "the 1-form Gram system");
}

FourierField GramOperator::solve_scalar(const FourierField& rhs, double rel_tol) const {
  const double inv = 1.0 / mean_sqrt_det_;
  auto scale = [inv](const FourierField& v) {
    FourierField out = v;
    out *= inv;
    return out;
  };
  if (constant_) return scale(rhs.retruncated(n_));
  return gram_cg([this](const FourierField& v) { return apply_scalar(v); }, scale, rhs.retruncated(n_), rel_tol,
             "the scalar Gram system");
}

std::array<FourierField, 6> GramOperator::weight_coefficients(int truncation) const {
  std::array<FourierField, 6> out;
  if (constant_) {
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        FourierField f(Rank::scalar, truncation);
        f.set({0, 0, 0}, 0, mean_weight_(i, j));
        out[static_cast<std::size_t>(MetricField::packed_index(i, j))] = f;
      }
    return out;
  }
  std::vector<double> s(grid_.size());
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      for (std::size_t p = 0; p < grid_.size(); ++p) s[p] = samples_->weight[p](i, j);
      out[static_cast<std::size_t>(MetricField::packed_index(i, j))] = grid_.analyze_scalar(s, truncation);
    }
  return out;
}

}  // namespace curllab::fields
