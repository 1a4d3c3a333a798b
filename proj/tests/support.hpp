#pragma once

#include "curllab/fourier_field.hpp"
#include "curllab/metric.hpp"

#include <cmath>
#include <random>

namespace test_support {

using curllab::fields::FourierField;
using curllab::fields::MetricField;
using curllab::fields::Rank;

/// Real random field with coefficients uniform in [-1, 1] + i[-1, 1].
inline FourierField random_field(Rank rank, int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierField f(rank, n);
  for (std::size_t m = 0; m < f.mode_count(); ++m) {
    const auto k = f.wavevector(m);
    const auto mk = curllab::fields::Wavevector{-k[0], -k[1], -k[2]};
    if (f.mode_index(mk) < m) continue;
    for (int c = 0; c < f.components(); ++c) {
      const bool self = (mk == k);
      const std::complex<double> v(u(rng), self ? 0.0 : u(rng));
      f.set_real(k, c, v);
    }
  }
  return f;
}

/// Identity plus a random symmetric perturbation of the given amplitude.
inline MetricField random_metric(int n, double amplitude, unsigned seed) {
  std::array<FourierField, 6> p;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      FourierField h = random_field(Rank::scalar, n, seed * 7919u + static_cast<unsigned>(3 * i + j));
      h *= amplitude / std::pow(double(2 * n + 1), 3.0);
      if (i == j) h.set({0, 0, 0}, 0, h.coeff({0, 0, 0}, 0) + 1.0);
      p[static_cast<std::size_t>(MetricField::packed_index(i, j))] = h;
    }
  return MetricField(p);
}

/// Midpoint-rule quadrature of f over the torus on an n^3 grid.
template <class F>
double torus_quadrature(int n, F&& f) {
  const double h = 2.0 * M_PI / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) s += f(Eigen::Vector3d(h * i, h * j, h * k));
  return s * h * h * h;
}

}  // namespace test_support
