#include "curllab/error.hpp"
#include "curllab/instability.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace curllab;
using namespace curllab::instability;

TEST_CASE("WKB exponent on model fields") {
  SUBCASE("constant field") {
    const dynamics::ConstantField u(Eigen::Vector3d(0.3, -0.2, 1.0));
    const WkbResult r = wkb_exponent(u, Eigen::Vector3d(0.1, 0.2, 0.3), Eigen::Vector3d(1, 1, 0), 50.0);
    CHECK(std::abs(r.exponent) <= 1e-6);
    CHECK(r.per_amplitude.size() == 2);
  }
  SUBCASE("frozen saddle") {
    const double nu = 0.7;
    Eigen::Matrix3d a = Eigen::Matrix3d::Zero();
    a(0, 0) = nu;
    a(1, 1) = -nu;
    const dynamics::LinearField u(a);
    const WkbResult r = wkb_exponent(u, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), 50.0, 1);
    CHECK(r.exponent == doctest::Approx(nu).epsilon(1e-2));
    const WkbResult r2 = wkb_exponent(u, Eigen::Vector3d::Zero(), Eigen::Vector3d::UnitX(), 100.0);
    CHECK(r2.orthogonality_drift <= 1e-6);
    CHECK(r2.transport_drift <= 1e-6);
  }
  SUBCASE("rescaling the field rescales the exponent") {
    const dynamics::AbcField u(1.0, 1.0, 1.0);
    const Eigen::Vector3d x0(0.4, 1.1, 2.3), xi0(0.2, -0.5, 0.8);
    const WkbResult r1 = wkb_exponent(u, x0, xi0, 40.0);
    const dynamics::ScaledField u2(std::make_shared<dynamics::AbcField>(1.0, 1.0, 1.0), 2.0);
    const WkbResult r2 = wkb_exponent(u2, x0, xi0, 20.0);
    CHECK(r2.exponent == doctest::Approx(2.0 * r1.exponent).epsilon(1e-5));
  }
  SUBCASE("ABC flow near a saddle") {
    const dynamics::AbcField u(1.0, 1.0, 1.0);
    const auto fps = dynamics::find_fixed_points(u);
    REQUIRE(!fps.points.empty());
    const auto& p = fps.points.front();
    // xi0 along the left eigenvector of the expanding eigenvalue.
    Eigen::EigenSolver<Eigen::Matrix3d> es(p.jacobian.transpose());
    Eigen::Index k = 0;
    es.eigenvalues().real().maxCoeff(&k);
    const Eigen::Vector3d xi0 = es.eigenvectors().col(k).real();
    const double rate = es.eigenvalues().real().maxCoeff();
    const WkbResult r = wkb_exponent(u, p.x + Eigen::Vector3d::Constant(1e-3), xi0, 5.0);
    CHECK(r.exponent > 0.1 * rate);
    CHECK(r.exponent < 1.5 * rate);
    CHECK(r.orthogonality_drift <= 1e-6);
  }
  SUBCASE("ABC drifts over a long run") {
    const dynamics::AbcField u(1.0, 1.0, 1.0);
    const WkbResult r = wkb_exponent(u, Eigen::Vector3d(0.4, 1.1, 2.3), Eigen::Vector3d(0.2, -0.5, 0.8), 100.0);
    CHECK(r.orthogonality_drift <= 1e-6);
    CHECK(r.transport_drift <= 1e-6);
    CHECK(r.sustained_exponent <= r.exponent + 1e-12);
  }
  SUBCASE("the shear flow grows only algebraically") {
    // u = (sin z, cos z, 0) with v . xi0 small: a long transient ramp.
    const dynamics::SharpField u(fields::MetricField::flat(), fields::tight_one_form(1, 1));
    const Eigen::Vector3d x0(7.36582, -0.101589, -1.6645), xi0(0.620393, 0.0531403, -1.83232);
    const WkbResult r = wkb_exponent(u, x0, xi0, 200.0);
    CHECK(r.exponent > 1e-2);
    CHECK(wkb_exponent(u, x0, xi0, 400.0).sustained_exponent < 1e-2);
  }
  CHECK_THROWS_AS(wkb_exponent(dynamics::ConstantField(Eigen::Vector3d::UnitX()), Eigen::Vector3d::Zero(),
                               Eigen::Vector3d::Zero(), 1.0),
                  InvalidArgument);
}

TEST_CASE("mechanism names") {
  for (Mechanism m : {Mechanism::saddle_fixed_point, Mechanism::hyperbolic_orbit, Mechanism::positive_wkb_exponent,
                      Mechanism::inconclusive})
    CHECK(mechanism_from_string(to_string(m)) == m);
  CHECK_THROWS_AS(mechanism_from_string("other"), InvalidArgument);
  CHECK_THROWS_AS(Budget::preset("other"), InvalidArgument);
}

TEST_CASE("certificates") {
  Budget budget = Budget::preset("quick");
  budget.threads = 2;
  SUBCASE("ABC certifies through a saddle") {
    const dynamics::AbcField u(1.0, 1.0, 1.0);
    const InstabilityCertificate c = certify_field(u, nullptr, budget);
    CHECK(c.mechanism == Mechanism::saddle_fixed_point);
    REQUIRE(c.fixed_point);
    CHECK(c.fixed_points == 8);
    CHECK(c.exponent > 0.0);
    CHECK(reverify(u, c, budget));
    const auto j = to_json(c);
    CHECK(j["mechanism"] == "saddle_fixed_point");
    CHECK(j["witness"]["x"].size() == 3);
  }
  SUBCASE("the tight eigenfield is inconclusive") {
    const auto g = fields::MetricField::flat();
    curlspec::EigenPair pair;
    pair.lambda = 1.0;
    pair.alpha = fields::tight_one_form(1, 1);
    Budget full = budget;
    full.wkb_samples = 64;
    const InstabilityCertificate c = certify(g, pair, full, "flat", "alpha_1");
    CHECK(c.mechanism == Mechanism::inconclusive);
    CHECK(c.fixed_points == 0);
    CHECK(c.hyperbolic_orbits == 0);
    CHECK(c.nondegenerate_orbits == 0);
    CHECK(c.max_wkb_exponent < full.wkb_threshold);
  }
  SUBCASE("eigenforms are normalized to unit RMS speed") {
    const auto g = fields::MetricField::flat();
    curlspec::EigenPair pair;
    pair.lambda = 1.0;
    pair.alpha = fields::abc_one_form(1.0, 1.0, 1.0, 1);
    pair.alpha *= 5.0;
    const InstabilityCertificate c = certify(g, pair, budget);
    CHECK(c.field_scale == doctest::Approx(1.0 / (5.0 * std::sqrt(3.0))).epsilon(1e-12));
    CHECK(c.mechanism == Mechanism::saddle_fixed_point);
    // The stagnation points of ABC(1,1,1) have leading real parts sqrt(2) or sqrt(2)/2.
    const double rate = c.exponent * std::sqrt(3.0);
    CHECK((std::abs(rate - std::sqrt(2.0)) <= 1e-8 || std::abs(rate - std::sqrt(0.5)) <= 1e-8));
    CHECK(reverify(*witness_field(g, pair, c, budget), c, budget));
    CHECK(to_json(c)["field_scale"] == c.field_scale);
  }
  SUBCASE("a witness from another field does not re-verify") {
    const dynamics::AbcField u(1.0, 1.0, 1.0);
    const InstabilityCertificate c = certify_field(u, nullptr, budget);
    CHECK_FALSE(reverify(dynamics::AbcField(1.0, 0.5, 0.3), c, budget));
  }
}
