#include "curllab/grid.hpp"

#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace curllab::fields {

GridField make_grid_field(Rank rank, std::size_t points) {
  GridField g;
  g.rank = rank;
  g.comp.assign(static_cast<std::size_t>(component_count(rank)), std::vector<double>(points, 0.0));
  return g;
}

CollocationGrid::CollocationGrid(int resolution) : n_(resolution) {
  if (resolution < 1) throw InvalidArgument("grid resolution must be positive");
}

CollocationGrid CollocationGrid::dealiased(int n, int metric_n) {
  const int three_halves = 3 * n + 1;
  const int gram = 4 * n + 4 * metric_n + 2;
  return CollocationGrid(std::max({three_halves, gram, 4}));
}

double CollocationGrid::spacing() const { return 2.0 * std::numbers::pi / n_; }

double CollocationGrid::weight() const {
  const double h = spacing();
  return h * h * h;
}

Eigen::Vector3d CollocationGrid::point(std::size_t index) const {
  const std::size_t n = static_cast<std::size_t>(n_);
  const double h = spacing();
  return {h * static_cast<double>(index / (n * n)), h * static_cast<double>((index / n) % n),
          h * static_cast<double>(index % n)};
}

namespace {

// table[(m + t) * n + j] = exp(i m x_j)
std::vector<Complex> phase_table(int truncation, int n) {
  const int s = side_length(truncation);
  std::vector<Complex> t(static_cast<std::size_t>(s) * static_cast<std::size_t>(n));
  const double h = 2.0 * std::numbers::pi / n;
  for (int m = -truncation; m <= truncation; ++m)
    for (int j = 0; j < n; ++j) {
      // Reduce m*j mod n first so large products keep full accuracy.
      const long r = ((static_cast<long>(m) * j) % n + n) % n;
      t[static_cast<std::size_t>(m + truncation) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)] =
          std::polar(1.0, h * static_cast<double>(r));
    }
  return t;
}

}  // namespace

std::vector<double> CollocationGrid::synthesize_component(const FourierField& field, int component) const {
  const int t = field.truncation();
  const std::size_t s = static_cast<std::size_t>(field.side());
  const std::size_t n = static_cast<std::size_t>(n_);
  const auto e = phase_table(t, n_);
  const auto c = field.component_data(component);

  std::vector<Complex> t1(s * s * n, Complex{});
  for (std::size_t a = 0; a < s * s; ++a)
    for (std::size_t k = 0; k < s; ++k) {
      const Complex v = c[a * s + k];
      if (v == Complex{}) continue;
      const Complex* row = &e[k * n];
      Complex* out = &t1[a * n];
      for (std::size_t j3 = 0; j3 < n; ++j3) out[j3] += v * row[j3];
    }

  std::vector<Complex> t2(s * n * n, Complex{});
  for (std::size_t i1 = 0; i1 < s; ++i1)
    for (std::size_t i2 = 0; i2 < s; ++i2) {
      const Complex* src = &t1[(i1 * s + i2) * n];
      for (std::size_t j2 = 0; j2 < n; ++j2) {
        const Complex w = e[i2 * n + j2];
        Complex* out = &t2[(i1 * n + j2) * n];
        for (std::size_t j3 = 0; j3 < n; ++j3) out[j3] += w * src[j3];
      }
    }

  std::vector<double> f(n * n * n, 0.0);
  for (std::size_t i1 = 0; i1 < s; ++i1)
    for (std::size_t j1 = 0; j1 < n; ++j1) {
      const Complex w = e[i1 * n + j1];
      const Complex* src = &t2[i1 * n * n];
      double* out = &f[j1 * n * n];
      for (std::size_t q = 0; q < n * n; ++q) out[q] += (w * src[q]).real();
    }
  return f;
}

GridField CollocationGrid::synthesize(const FourierField& field) const {
  GridField g;
  g.rank = field.rank();
  for (int c = 0; c < field.components(); ++c) g.comp.push_back(synthesize_component(field, c));
  return g;
}

void CollocationGrid::analyze_into(const std::vector<double>& f, FourierField& out, int component) const {
  const int t = out.truncation();
  const std::size_t s = static_cast<std::size_t>(out.side());
  const std::size_t n = static_cast<std::size_t>(n_);
  if (f.size() != n * n * n) throw InvalidArgument("sample count does not match grid");
  const auto e = phase_table(t, n_);

  // a1[j1][j2][k3]
  std::vector<Complex> a1(n * n * s, Complex{});
  for (std::size_t q = 0; q < n * n; ++q) {
    const double* src = &f[q * n];
    Complex* out3 = &a1[q * s];
    for (std::size_t k3 = 0; k3 < s; ++k3) {
      const Complex* row = &e[k3 * n];
      Complex acc{};
      for (std::size_t j3 = 0; j3 < n; ++j3) acc += src[j3] * std::conj(row[j3]);
      out3[k3] = acc;
    }
  }
  // a2[j1][k2][k3]
  std::vector<Complex> a2(n * s * s, Complex{});
  for (std::size_t j1 = 0; j1 < n; ++j1)
    for (std::size_t j2 = 0; j2 < n; ++j2) {
      const Complex* src = &a1[(j1 * n + j2) * s];
      for (std::size_t k2 = 0; k2 < s; ++k2) {
        const Complex w = std::conj(e[k2 * n + j2]);
        Complex* dst = &a2[(j1 * s + k2) * s];
        for (std::size_t k3 = 0; k3 < s; ++k3) dst[k3] += w * src[k3];
      }
    }
  auto data = out.component_data(component);
  const double scale = 1.0 / static_cast<double>(n * n * n);
  for (std::size_t k1 = 0; k1 < s; ++k1) {
    for (std::size_t q = 0; q < s * s; ++q) data[k1 * s * s + q] = Complex{};
    for (std::size_t j1 = 0; j1 < n; ++j1) {
      const Complex w = std::conj(e[k1 * n + j1]) * scale;
      const Complex* src = &a2[j1 * s * s];
      Complex* dst = &data[k1 * s * s];
      for (std::size_t q = 0; q < s * s; ++q) dst[q] += w * src[q];
    }
  }
  (void)t;
}

FourierField CollocationGrid::analyze(const GridField& samples, int truncation) const {
  FourierField out(samples.rank, truncation);
  for (int c = 0; c < out.components(); ++c) analyze_into(samples.comp[static_cast<std::size_t>(c)], out, c);
  return out.hermitianized();
}

FourierField CollocationGrid::analyze_scalar(const std::vector<double>& samples, int truncation) const {
  FourierField out(Rank::scalar, truncation);
  analyze_into(samples, out, 0);
  return out.hermitianized();
}

double CollocationGrid::integrate(const std::vector<double>& samples) const {
  double s = 0.0;
  for (double v : samples) s += v;
  return s * weight();
}

}  // namespace curllab::fields
