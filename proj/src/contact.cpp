#include "curllab/contact.hpp"

#include "curllab/curlspec.hpp"
#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curllab::contact {

using fields::CollocationGrid;
using fields::GridField;
using fields::Rank;

ContactForm::ContactForm(FourierField alpha) : alpha_(std::move(alpha)) {
  if (alpha_.rank() != Rank::one_form) throw UnsupportedRank("a contact form must be a one_form");
  const CollocationGrid grid = CollocationGrid::dealiased(alpha_.truncation());
  const GridField a = grid.synthesize(alpha_);
  const GridField c = grid.synthesize(fields::exterior_d(alpha_));
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = a.at3(p).dot(c.at3(p));
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo > 0.0) && !(hi < 0.0)) {
    std::ostringstream msg;
    msg << "alpha ^ d alpha is not of one sign on the grid (range [" << lo << ", " << hi << "])";
    throw NotContact(msg.str());
  }
  orientation_ = lo > 0.0 ? 1 : -1;
  defect_ = lo > 0.0 ? lo : -hi;
}

ContactForm tight_form(int k) {
  if (k == 0) throw InvalidArgument("tight_form needs k != 0 (a closed form is not contact)");
  return ContactForm(fields::tight_one_form(k, std::abs(k)));
}

KernelFrame kernel_frame(const Eigen::Vector3d& alpha, const Eigen::Vector3d& curl, int axis) {
  const double a2 = alpha.squaredNorm();
  const Eigen::Vector3d ref = Eigen::Vector3d::Unit(axis);
  Eigen::Vector3d e1 = ref - (alpha.dot(ref) / a2) * alpha;
  const double len = e1.norm();
  const double density = alpha.dot(curl);
  if (!(len > 1e-12) || !(std::abs(density) > 0.0))
    throw NotContact("kernel frame undefined: axis parallel to alpha or alpha ^ d alpha = 0");
  e1 /= len;
  return {e1, alpha.cross(e1) / density};
}

std::pair<int, double> frame_axis(const fields::PointEvaluator& alpha, const std::vector<Eigen::Vector3d>& points) {
  int best = 2;
  double best_sine = -1.0;
  for (int axis : {2, 0, 1}) {
    double sine = 1.0;
    for (const auto& x : points) {
      const Eigen::Vector3d a = alpha.value(x);
      const double n = a.norm();
      if (n == 0.0) {
        sine = 0.0;
        break;
      }
      sine = std::min(sine, std::sqrt(std::max(0.0, 1.0 - (a[axis] / n) * (a[axis] / n))));
    }
    if (sine > best_sine + 1e-12) {
      best = axis;
      best_sine = sine;
    }
  }
  return {best, best_sine};
}

// ---------------------------------------------------------------------------

AlmostComplexStructure::AlmostComplexStructure(const ContactForm& alpha, int resolution, const Generator& j)
    : grid_(resolution) {
  const fields::PointEvaluator a(alpha.form());
  std::vector<Eigen::Vector3d> pts(grid_.size());
  for (std::size_t p = 0; p < grid_.size(); ++p) pts[p] = grid_.point(p);
  const auto [axis, sine] = frame_axis(a, pts);
  if (sine < 1e-3) throw NotContact("no coordinate axis gives a global frame of ker alpha on the grid");
  axis_ = axis;
  j_.resize(grid_.size());
  for (std::size_t p = 0; p < grid_.size(); ++p) j_[p] = j(pts[p]);
}

AlmostComplexStructure AlmostComplexStructure::standard(const ContactForm& alpha, int resolution) {
  return AlmostComplexStructure(alpha, resolution, [](const Eigen::Vector3d&) {
    Eigen::Matrix2d r;
    r << 0.0, -1.0, 1.0, 0.0;
    return r;
  });
}

double AlmostComplexStructure::square_defect() const {
  double worst = 0.0;
  for (const auto& j : j_) worst = std::max(worst, (j * j + Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff());
  return worst;
}

namespace {

/// Gram matrix of (v, w) -> d alpha(v, J w) on the normalized frame.
Eigen::Matrix2d taming_form(const Eigen::Matrix2d& j) {
  Eigen::Matrix2d g;
  g << j(1, 0), j(1, 1), -j(0, 0), -j(0, 1);
  return g;
}

}  // namespace

double AlmostComplexStructure::taming() const {
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& j : j_) {
    const Eigen::Matrix2d g = taming_form(j);
    const Eigen::Matrix2d s = 0.5 * (g + g.transpose());
    worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(s).eigenvalues()[0]);
  }
  return worst;
}

// ---------------------------------------------------------------------------

dynamics::VectorFieldPtr reeb_field(const ContactForm& alpha) {
  return std::make_shared<dynamics::ReebField>(alpha.form());
}

ReebResidual reeb_residual(const FourierField& alpha, const dynamics::VectorField& x, int resolution) {
  const CollocationGrid grid = resolution > 0 ? CollocationGrid(resolution)
                                              : CollocationGrid::dealiased(alpha.truncation());
  const GridField a = grid.synthesize(alpha);
  const GridField c = grid.synthesize(fields::exterior_d(alpha));
  ReebResidual r;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector3d v = x.value(grid.point(p));
    r.normalization = std::max(r.normalization, std::abs(a.at3(p).dot(v) - 1.0));
    r.contraction = std::max(r.contraction, c.at3(p).cross(v).norm());
  }
  return r;
}

namespace {

BeltramiReeb finish(FourierField alpha, dynamics::VectorFieldPtr u, const MetricField& g, int resolution,
                    double tol) {
  const CollocationGrid grid(resolution);
  BeltramiReeb out;
  out.min_speed = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector3d x = grid.point(p);
    const Eigen::Vector3d v = u->value(x);
    const double s = std::sqrt(std::max(0.0, v.dot(g.at(x) * v)));
    out.min_speed = std::min(out.min_speed, s);
    out.mean_speed += s;
  }
  out.mean_speed /= double(grid.size());
  if (!(out.min_speed > 1e-6 * out.mean_speed)) {
    std::ostringstream msg;
    msg << "the field has zeros (min |u|_g = " << out.min_speed << ", mean " << out.mean_speed << ")";
    throw HasZeros(msg.str());
  }
  const auto zeros = dynamics::find_fixed_points(*u);
  if (!zeros.points.empty()) {
    std::ostringstream msg;
    msg << "the field has " << zeros.points.size() << " zeros, the first at (" << zeros.points.front().x.transpose()
        << ")";
    throw HasZeros(msg.str());
  }
  out.reeb = std::make_shared<dynamics::ReebRescaledField>(std::move(u), g);
  out.residual = reeb_residual(alpha, *out.reeb, resolution);
  out.alpha = std::move(alpha);
  if (out.residual.max() > tol) {
    std::ostringstream msg;
    msg << "u / |u|^2 fails the Reeb conditions: |alpha(X) - 1| = " << out.residual.normalization
        << ", |iota_X d alpha| = " << out.residual.contraction << " (tolerance " << tol << ")";
    throw ReebMismatch(msg.str());
  }
  return out;
}

}  // namespace

BeltramiReeb beltrami_to_reeb(const FourierField& u, const MetricField& g, double tol) {
  if (u.rank() != Rank::vector) throw UnsupportedRank("beltrami_to_reeb expects a vector field");
  FourierField alpha = fields::flat(g, u);
  const int res = CollocationGrid::dealiased(alpha.truncation()).resolution();
  return finish(std::move(alpha), std::make_shared<dynamics::FourierVectorField>(u), g, res, tol);
}

BeltramiReeb beltrami_to_reeb_form(const FourierField& alpha, const MetricField& g, double tol) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("beltrami_to_reeb_form expects a one_form");
  const int res = CollocationGrid::dealiased(alpha.truncation()).resolution();
  return finish(alpha, std::make_shared<dynamics::SharpField>(g, alpha), g, res, tol);
}

// ---------------------------------------------------------------------------

AdaptedMetric adapted_metric(const ContactForm& alpha, const AlmostComplexStructure& j, int metric_truncation) {
  const int nm = metric_truncation > 0 ? metric_truncation : 2 * alpha.form().truncation();
  const CollocationGrid& grid = j.grid();
  if (grid.resolution() < 2 * nm + 1) {
    std::ostringstream msg;
    msg << "the complex structure grid (" << grid.resolution() << " points per axis) cannot resolve a metric of truncation "
        << nm;
    throw InvalidArgument(msg.str());
  }
  const GridField a = grid.synthesize(alpha.form());
  const GridField c = grid.synthesize(fields::exterior_d(alpha.form()));

  AdaptedMetric out{MetricField::flat()};
  std::array<std::vector<double>, 6> samples;
  for (auto& s : samples) s.resize(grid.size());
  std::vector<Eigen::Matrix3d> pointwise(grid.size());
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Eigen::Vector3d av = a.at3(p), cv = c.at3(p);
    const KernelFrame f = kernel_frame(av, cv, j.axis());
    Eigen::Matrix3d basis;
    basis << cv / av.dot(cv), f.e1, f.e2;
    Eigen::Matrix3d gf = Eigen::Matrix3d::Zero();
    gf(0, 0) = 1.0;
    gf.bottomRightCorner<2, 2>() = taming_form(j.at(p));
    const Eigen::Matrix3d inv = basis.inverse();
    const Eigen::Matrix3d raw = inv.transpose() * gf * inv;
    out.asymmetry = std::max(out.asymmetry, (raw - raw.transpose()).cwiseAbs().maxCoeff());
    const Eigen::Matrix3d sym = 0.5 * (raw + raw.transpose());
    if (!(Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(sym).eigenvalues()[0] > 0.0)) {
      std::ostringstream msg;
      msg << "adapted metric is not positive definite at (" << grid.point(p).transpose() << ")";
      throw IncompatibleStructure(msg.str());
    }
    pointwise[p] = sym;
    for (int r = 0; r < 3; ++r)
      for (int s = r; s < 3; ++s) samples[static_cast<std::size_t>(MetricField::packed_index(r, s))][p] = sym(r, s);
  }
  if (out.asymmetry > 1e-8) {
    std::ostringstream msg;
    msg << "complex structure is not compatible with d alpha (asymmetry " << out.asymmetry << ")";
    throw IncompatibleStructure(msg.str());
  }
  std::array<FourierField, 6> packed;
  for (std::size_t i = 0; i < 6; ++i) packed[i] = grid.analyze_scalar(samples[i], nm);
  out.metric = MetricField(packed);
  for (std::size_t p = 0; p < grid.size(); ++p)
    out.reconstruction =
        std::max(out.reconstruction, (out.metric.at(grid.point(p)) - pointwise[p]).cwiseAbs().maxCoeff());

  const curlspec::CurlOperator op(out.metric, alpha.form().truncation());
  const FourierField curl = op.apply(alpha.form());
  out.lambda = fields::l2_inner(out.metric, curl, alpha.form()) / fields::l2_inner(out.metric, alpha.form(), alpha.form());
  out.residual = curlspec::residual(out.metric, alpha.form(), out.lambda);
  return out;
}

}  // namespace curllab::contact
