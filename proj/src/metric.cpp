#include "curllab/metric.hpp"

#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace curllab::fields {

int MetricField::packed_index(int i, int j) {
  if (i > j) std::swap(i, j);
  static constexpr int table[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
  return table[i][j];
}

MetricField MetricField::flat() { return constant(Eigen::Matrix3d::Identity()); }

MetricField MetricField::conformal(double c) {
  if (!(c > 0.0)) throw InvalidArgument("conformal factor must be positive");
  return constant(c * c * Eigen::Matrix3d::Identity());
}

MetricField MetricField::constant(const Eigen::Matrix3d& g) {
  std::array<FourierField, 6> packed;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      FourierField f(Rank::scalar, 0);
      f.set({0, 0, 0}, 0, 0.5 * (g(i, j) + g(j, i)));
      packed[static_cast<std::size_t>(packed_index(i, j))] = f;
    }
  return MetricField(std::move(packed));
}

MetricField::MetricField(std::array<FourierField, 6> packed) : comps_(std::move(packed)) {
  n_ = 0;
  for (const auto& f : comps_) {
    if (f.rank() != Rank::scalar) throw UnsupportedRank("metric components must be scalar fields");
    n_ = std::max(n_, f.truncation());
  }
  for (auto& f : comps_) {
    if (f.hermitian_defect() > 1e-12 * std::max(1.0, f.max_abs_coeff()))
      throw InvalidArgument("metric component is not real-valued (Hermitian symmetry violated)");
    f = f.retruncated(n_).hermitianized();
  }
  FourierField first(Rank::vector, n_), second(Rank::vector, n_);
  for (std::size_t m = 0; m < first.mode_count(); ++m) {
    const Wavevector k = first.wavevector(m);
    first.set(k, 0, comps_[0].coeff(k, 0));
    first.set(k, 1, comps_[1].coeff(k, 0));
    first.set(k, 2, comps_[2].coeff(k, 0));
    second.set(k, 0, comps_[3].coeff(k, 0));
    second.set(k, 1, comps_[4].coeff(k, 0));
    second.set(k, 2, comps_[5].coeff(k, 0));
  }
  eval_ = {PointEvaluator(first), PointEvaluator(second)};
  validate();
}

const FourierField& MetricField::component(int i, int j) const {
  return comps_[static_cast<std::size_t>(packed_index(i, j))];
}

bool MetricField::is_constant() const {
  for (const auto& f : comps_)
    for (std::size_t m = 0; m < f.mode_count(); ++m) {
      const Wavevector k = f.wavevector(m);
      if (k != Wavevector{0, 0, 0} && f.coeff(k, 0) != Complex{}) return false;
    }
  return true;
}

bool MetricField::is_flat() const {
  if (!is_constant()) return false;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j)
      if (component(i, j).coeff({0, 0, 0}, 0) != Complex(i == j ? 1.0 : 0.0, 0.0)) return false;
  return true;
}

static Eigen::Matrix3d unpack(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  Eigen::Matrix3d g;
  g << a[0], a[1], a[2], a[1], b[0], b[1], a[2], b[1], b[2];
  return g;
}

Eigen::Matrix3d MetricField::at(const Eigen::Vector3d& x) const {
  return unpack(eval_[0].value(x), eval_[1].value(x));
}

MetricJet MetricField::jet(const Eigen::Vector3d& x) const {
  const FieldJet a = eval_[0].jet(x, 1);
  const FieldJet b = eval_[1].jet(x, 1);
  MetricJet out;
  out.g = unpack(a.value, b.value);
  for (int k = 0; k < 3; ++k) out.dg[static_cast<std::size_t>(k)] = unpack(a.gradient.col(k), b.gradient.col(k));
  return out;
}

void MetricField::validate() {
  const CollocationGrid grid(std::max(4 * n_ + 8, 8));
  if (is_constant()) {
    const Eigen::Matrix3d g = at(Eigen::Vector3d::Zero());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g, Eigen::EigenvaluesOnly);
    min_eig_ = es.eigenvalues()[0];
    if (!(min_eig_ > 0.0)) {
      std::ostringstream msg;
      msg << "metric is not positive definite (smallest eigenvalue " << min_eig_ << ")";
      throw DegenerateMetric(msg.str(), {0.0, 0.0, 0.0});
    }
    return;
  }
  std::array<std::vector<double>, 6> s;
  for (std::size_t i = 0; i < 6; ++i) s[i] = grid.synthesize_component(comps_[i], 0);
  min_eig_ = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < grid.size(); ++p) {
    Eigen::Matrix3d g;
    g << s[0][p], s[1][p], s[2][p], s[1][p], s[3][p], s[4][p], s[2][p], s[4][p], s[5][p];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()[0];
    if (!(lo > 0.0)) {
      const Eigen::Vector3d x = grid.point(p);
      std::ostringstream msg;
      msg << "metric is not positive definite at (" << x[0] << ", " << x[1] << ", " << x[2]
          << "): smallest eigenvalue " << lo;
      throw DegenerateMetric(msg.str(), {x[0], x[1], x[2]});
    }
    min_eig_ = std::min(min_eig_, lo);
  }
}

std::shared_ptr<MetricSamples> MetricField::compute_samples(const CollocationGrid& grid) const {
  auto out = std::make_shared<MetricSamples>();
  out->resolution = grid.resolution();
  const std::size_t np = grid.size();
  out->g.resize(np);
  out->ginv.resize(np);
  out->sqrt_det.resize(np);
  out->weight.resize(np);
  out->min_eigenvalue = std::numeric_limits<double>::infinity();

  std::array<std::vector<double>, 6> s;
  const bool constant = is_constant();
  for (std::size_t i = 0; i < 6; ++i) {
    if (constant)
      s[i].assign(np, comps_[i].coeff({0, 0, 0}, 0).real());
    else
      s[i] = grid.synthesize_component(comps_[i], 0);
  }
  for (std::size_t p = 0; p < np; ++p) {
    Eigen::Matrix3d g;
    g << s[0][p], s[1][p], s[2][p], s[1][p], s[3][p], s[4][p], s[2][p], s[4][p], s[5][p];
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
    es.computeDirect(g, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues()[0];
    if (!(lo > 0.0)) {
      const Eigen::Vector3d x = grid.point(p);
      std::ostringstream msg;
      msg << "metric is not positive definite at grid point (" << x[0] << ", " << x[1] << ", " << x[2] << ")";
      throw DegenerateMetric(msg.str(), {x[0], x[1], x[2]});
    }
    out->min_eigenvalue = std::min(out->min_eigenvalue, lo);
    out->g[p] = g;
    out->ginv[p] = g.inverse();
    out->sqrt_det[p] = std::sqrt(g.determinant());
    out->weight[p] = out->sqrt_det[p] * out->ginv[p];
  }
  return out;
}

std::shared_ptr<const MetricSamples> MetricField::samples(const CollocationGrid& grid) const {
  std::lock_guard<std::mutex> lock(cache_->mutex);
  auto it = cache_->by_resolution.find(grid.resolution());
  if (it != cache_->by_resolution.end()) return it->second;
  auto s = compute_samples(grid);
  cache_->by_resolution.emplace(grid.resolution(), s);
  return s;
}

MetricField MetricField::scaled(double factor) const {
  if (!(factor > 0.0)) throw InvalidArgument("metric scale factor must be positive");
  std::array<FourierField, 6> p = comps_;
  for (auto& f : p) f *= factor;
  return MetricField(std::move(p));
}

MetricField MetricField::perturbed(const std::array<FourierField, 6>& h, double eps) const {
  std::array<FourierField, 6> p = comps_;
  for (std::size_t i = 0; i < 6; ++i) {
    FourierField d = h[i];
    d *= eps;
    p[i] += d;
  }
  return MetricField(std::move(p));
}

}  // namespace curllab::fields
