#include "curllab/dynamics.hpp"
#include "curllab/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace curllab;
using namespace curllab::dynamics;
using fields::FourierField;
using fields::Rank;

namespace {

constexpr double pi = std::numbers::pi;

FourierField tight_vector(int k) { return fields::tight_one_form(k, std::abs(k)).with_rank(Rank::vector); }

Eigen::Matrix2d rotation(double t) {
  Eigen::Matrix2d r;
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

std::vector<Eigen::Matrix2d> sample_path(const std::function<Eigen::Matrix2d(double)>& f, int n = 400) {
  std::vector<Eigen::Matrix2d> p;
  for (int i = 0; i <= n; ++i) p.push_back(f(double(i) / n));
  return p;
}

/// Zeros of ABC(1,1,1) by an independent scan: grid points with small |u|,
/// Newton with a finite-difference Jacobian, deduplication.
std::vector<Eigen::Vector3d> abc_zero_oracle() {
  const AbcField u(1, 1, 1);
  const int n = 40;
  std::vector<Eigen::Vector3d> zeros;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        Eigen::Vector3d x(2 * pi * i / n, 2 * pi * j / n, 2 * pi * k / n);
        if (u.value(x).norm() > 0.3) continue;
        for (int it = 0; it < 30; ++it) {
          Eigen::Matrix3d jac;
          for (int c = 0; c < 3; ++c) {
            const Eigen::Vector3d h = 1e-6 * Eigen::Vector3d::Unit(c);
            jac.col(c) = (u.value(x + h) - u.value(x - h)) / 2e-6;
          }
          x -= jac.fullPivLu().solve(u.value(x));
        }
        if (u.value(x).norm() > 1e-9) continue;
        x = wrap(x);
        bool seen = false;
        for (const auto& z : zeros) seen = seen || torus_distance(z, x) < 1e-6;
        if (!seen) zeros.push_back(x);
      }
  return zeros;
}

}  // namespace

TEST_CASE("flow of the integrable field is a straight line") {
  const FourierVectorField u(tight_vector(1));
  const Trajectory tr = flow(u, Eigen::Vector3d::Zero(), 1.0, 1e-10);
  CHECK(std::abs(tr.end()[0]) < 1e-9);
  CHECK(std::abs(tr.end()[1] - 1.0) < 1e-9);

  const Eigen::Vector3d x0(0.3, 5.9, 1.1);
  const Trajectory longer = flow(u, x0, 40.0, 1e-10);
  double drift = 0.0;
  for (const auto& x : longer.lifted) drift = std::max(drift, std::abs(x[2] - x0[2]));
  CHECK(drift <= 1e-9);
  // Speed is 1, so 40 time units cross y = 2 pi k six times or more.
  const Winding w = longer.winding(longer.size() - 1);
  CHECK(std::abs(w[0]) + std::abs(w[1]) >= 5);
}

TEST_CASE("zero field leaves points fixed") {
  const ConstantField u(Eigen::Vector3d::Zero());
  const Eigen::Vector3d x0(1, 2, 3);
  CHECK((flow(u, x0, 5.0).end() - x0).norm() == 0.0);
}

TEST_CASE("ABC flow agrees with a tighter reference integration") {
  const AbcField u(1, 1, 1);
  const double tol = 1e-9;
  const Eigen::Vector3d a = flow_map(u, Eigen::Vector3d::Zero(), 2 * pi, tol);
  const Eigen::Vector3d b = flow_map(u, Eigen::Vector3d::Zero(), 2 * pi, tol / 100);
  CHECK((a - b).norm() <= 10 * tol);
}

TEST_CASE("fixed points") {
  SUBCASE("unit-speed field has none") {
    const FourierVectorField u(tight_vector(1));
    CHECK(find_fixed_points(u).points.empty());
  }
  SUBCASE("ABC(1,1,1) has eight nondegenerate saddles") {
    const AbcField u(1, 1, 1);
    const auto oracle = abc_zero_oracle();
    REQUIRE(oracle.size() == 8);
    const auto found = find_fixed_points(u);
    REQUIRE(found.points.size() == 8);
    for (const auto& p : found.points) {
      CHECK(p.residual <= 1e-10);
      CHECK(std::abs(p.trace) <= 1e-8);
      CHECK(p.nondegenerate);
      CHECK(p.type == FixedPointClass::saddle);
      double nearest = 1e9;
      for (const auto& z : oracle) nearest = std::min(nearest, torus_distance(z, p.x));
      CHECK(nearest < 1e-6);
    }
    // Stable under a tighter tolerance.
    FixedPointOptions tight;
    tight.newton_tol = 5e-11;
    const auto again = find_fixed_points(u, tight);
    REQUIRE(again.points.size() == 8);
    for (std::size_t i = 0; i < 8; ++i) CHECK(torus_distance(again.points[i].x, found.points[i].x) <= 1e-9);
  }
}

TEST_CASE("monodromy") {
  SUBCASE("constant field with rational direction") {
    const ConstantField u(Eigen::Vector3d(1.0, 2.0, 0.0));
    const Monodromy m = monodromy(u, Eigen::Vector3d(0.1, 0.2, 0.3), 2 * pi);
    CHECK((m.m - Eigen::Matrix3d::Identity()).norm() < 1e-12);
    CHECK((m.p - Eigen::Matrix2d::Identity()).norm() < 1e-12);
  }
  SUBCASE("frozen hyperbolic Jacobian") {
    const double nu = 0.3, T = 2 * pi;
    const LinearField u(Eigen::Vector3d(nu, -nu, 0.0).asDiagonal(), Eigen::Vector3d(0, 0, 1));
    const Monodromy m = monodromy(u, Eigen::Vector3d::Zero(), T);
    Eigen::EigenSolver<Eigen::Matrix2d> es(m.p);
    std::vector<double> mult{es.eigenvalues()[0].real(), es.eigenvalues()[1].real()};
    std::sort(mult.begin(), mult.end());
    CHECK(mult[0] == doctest::Approx(std::exp(-nu * T)).epsilon(1e-8));
    CHECK(mult[1] == doctest::Approx(std::exp(nu * T)).epsilon(1e-8));
    CHECK(classify_multipliers(m.p, 1e-4) == OrbitType::positive_hyperbolic);
  }
  SUBCASE("vanishing field is rejected") {
    const ConstantField u(Eigen::Vector3d::Zero());
    CHECK_THROWS_AS(monodromy(u, Eigen::Vector3d::Zero(), 1.0), DegenerateOrbit);
  }
}

TEST_CASE("Conley-Zehnder index of model paths") {
  for (double theta : {0.5, 2.0, 4.0, 6.0})
    CHECK(conley_zehnder_index(sample_path([&](double t) { return rotation(theta * t); })) == 1);
  CHECK(conley_zehnder_index(sample_path([](double t) { return rotation(8.0 * t); })) == 3);
  CHECK(conley_zehnder_index(sample_path([](double t) { return rotation(-2.0 * t); })) == -1);
  const double nu = 0.7;
  auto stretch = [&](double t) {
    Eigen::Matrix2d d = Eigen::Matrix2d::Zero();
    d(0, 0) = std::exp(nu * t);
    d(1, 1) = std::exp(-nu * t);
    return d;
  };
  CHECK(conley_zehnder_index(sample_path(stretch)) == 0);
  CHECK(conley_zehnder_index(sample_path([&](double t) { Eigen::Matrix2d r = rotation(2 * pi * t); return Eigen::Matrix2d(r * stretch(t)); })) == 2);
  CHECK(conley_zehnder_index(sample_path([&](double t) { Eigen::Matrix2d r = rotation(pi * t); return Eigen::Matrix2d(r * stretch(t)); })) == 1);
  CHECK_THROWS_AS(conley_zehnder_index(sample_path([](double t) { return rotation(2 * pi * t); })), DegenerateOrbit);
}

TEST_CASE("periodic orbits of the integrable field form families") {
  const FourierVectorField u(tight_vector(1));
  OrbitOptions opt;
  opt.T_max = 10.0;
  opt.seeds = {Eigen::Vector3d(0.0, 0.0, 0.0), Eigen::Vector3d(1.0, 2.0, 0.0), Eigen::Vector3d(3.0, 0.5, 0.0)};
  const OrbitSearch s = find_periodic_orbits(u, opt);
  REQUIRE(s.orbits.size() == 3);
  for (const auto& o : s.orbits) {
    CHECK(o.homology == Winding{0, 1, 0});
    CHECK(o.period == doctest::Approx(2 * pi).epsilon(1e-8));
    CHECK(o.type == OrbitType::degenerate);
    CHECK_FALSE(o.nondegenerate);
  }
}

TEST_CASE("periodic orbits of ABC(1,1,1)") {
  const AbcField u(1, 1, 1);
  OrbitOptions opt;
  opt.T_max = 30.0;
  opt.n_seeds = 16;
  opt.contact_form = fields::abc_one_form(1, 1, 1, 1);
  const OrbitSearch s = find_periodic_orbits(u, opt);
  MESSAGE("orbits: " << s.orbits.size() << ", candidates: " << s.candidates << ", unresolved: " << s.unresolved.size());
  int hyperbolic = 0;
  for (const auto& o : s.orbits) {
    CHECK(o.return_residual <= 1e-8);
    CHECK(std::abs(o.transverse_det - 1.0) <= 1e-6);
    CHECK(o.flow_multiplier_error <= 1e-6);
    CHECK(std::abs(std::abs(o.multipliers[0] * o.multipliers[1]) - 1.0) <= 1e-6);
    if (o.type == OrbitType::positive_hyperbolic || o.type == OrbitType::negative_hyperbolic) ++hyperbolic;
    if (o.nondegenerate) {
      REQUIRE(o.cz_index.has_value());
      CHECK((*o.cz_index % 2 == 0) == (o.type == OrbitType::positive_hyperbolic));
    }
  }
  CHECK(hyperbolic >= 1);
}
