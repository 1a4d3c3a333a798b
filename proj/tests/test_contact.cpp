#include "curllab/contact.hpp"
#include "curllab/error.hpp"

#include <doctest.h>

#include <cmath>

using namespace curllab;
using namespace curllab::contact;
using fields::Rank;

namespace {

double max_deviation(const dynamics::VectorField& x, const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& ref) {
  double worst = 0.0;
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      for (int k = 0; k < 7; ++k) {
        const Eigen::Vector3d p(0.9 * i, 0.9 * j + 0.1, 0.9 * k + 0.2);
        worst = std::max(worst, (x.value(p) - ref(p)).norm());
      }
  return worst;
}

}  // namespace

TEST_CASE("tight forms") {
  const ContactForm a1 = tight_form(1);
  CHECK(a1.defect() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a1.orientation() == 1);
  CHECK(a1.form().coeff({0, 0, 1}, 0) == std::complex<double>(0.0, -0.5));

  const ContactForm am2 = tight_form(-2);
  CHECK(am2.defect() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(am2.orientation() == -1);
  const Eigen::Vector3d p(0.2, 0.4, 0.7);
  CHECK(am2.form().eval3(p)[0] == doctest::Approx(std::sin(-2 * 0.7)));
  CHECK(am2.form().eval3(p)[1] == doctest::Approx(std::cos(-2 * 0.7)));

  CHECK_THROWS_AS(tight_form(0), InvalidArgument);
  CHECK_THROWS_AS(ContactForm(fields::constant_field(Rank::one_form, {1, 0, 0}, 1)), NotContact);
}

TEST_CASE("Reeb fields of the tight family") {
  for (int k : {1, 2, 3, -1}) {
    const auto x = reeb_field(tight_form(k));
    CHECK(max_deviation(*x, [k](const Eigen::Vector3d& p) -> Eigen::Vector3d {
            return Eigen::Vector3d(std::sin(k * p[2]), std::cos(k * p[2]), 0.0);
          }) <= 1e-12);
    CHECK(reeb_residual(tight_form(k).form(), *x).max() <= 1e-10);
  }
  // c alpha has Reeb field X / c.
  FourierField scaled = fields::tight_one_form(1, 1);
  scaled *= 3.0;
  const auto x = reeb_field(ContactForm(scaled));
  CHECK(max_deviation(*x, [](const Eigen::Vector3d& p) -> Eigen::Vector3d {
          return Eigen::Vector3d(std::sin(p[2]), std::cos(p[2]), 0.0) / 3.0;
        }) <= 1e-12);
}

TEST_CASE("Beltrami to Reeb") {
  const auto g = fields::MetricField::flat();
  for (int k : {1, 2}) {
    const FourierField u = fields::tight_one_form(k, k).with_rank(Rank::vector);
    const BeltramiReeb br = beltrami_to_reeb(u, g);
    CHECK(fields::max_coeff_difference(br.alpha.retruncated(k), fields::tight_one_form(k, k)) <= 1e-14);
    CHECK(br.residual.max() <= 1e-10);
    // Round trip with the Reeb field of the dual form.
    const auto x = reeb_field(ContactForm(br.alpha));
    CHECK(max_deviation(*x, [&](const Eigen::Vector3d& p) -> Eigen::Vector3d { return br.reeb->value(p); }) <= 1e-8);
  }
  FourierField u2 = fields::tight_one_form(1, 1).with_rank(Rank::vector);
  u2 *= 2.0;
  const BeltramiReeb br2 = beltrami_to_reeb(u2, g);
  CHECK(br2.alpha.coeff({0, 0, 1}, 0) == std::complex<double>(0.0, -1.0));
  CHECK(max_deviation(*br2.reeb, [](const Eigen::Vector3d& p) -> Eigen::Vector3d {
          return Eigen::Vector3d(std::sin(p[2]), std::cos(p[2]), 0.0) / 2.0;
        }) <= 1e-12);

  const FourierField abc = fields::abc_one_form(1, 1, 1, 1).with_rank(Rank::vector);
  CHECK_THROWS_AS(beltrami_to_reeb(abc, g), HasZeros);

  // Through the dual form under a conformal metric, where alpha_1 is still a
  // curl eigenform and its Reeb field is unchanged.
  const BeltramiReeb br3 = beltrami_to_reeb_form(fields::tight_one_form(1, 1), fields::MetricField::conformal(2.0));
  CHECK(br3.residual.max() <= 1e-12);
  CHECK(max_deviation(*br3.reeb, [](const Eigen::Vector3d& p) -> Eigen::Vector3d {
          return Eigen::Vector3d(std::sin(p[2]), std::cos(p[2]), 0.0);
        }) <= 1e-12);
}

TEST_CASE("adapted metric") {
  SUBCASE("alpha_1 with the standard structure gives the flat metric") {
    const ContactForm a = tight_form(1);
    const auto j = AlmostComplexStructure::standard(a, 12);
    CHECK(j.square_defect() <= 1e-10);
    CHECK(j.taming() > 0.0);
    const AdaptedMetric am = adapted_metric(a, j);
    CHECK(am.asymmetry <= 1e-8);
    CHECK(am.reconstruction <= 1e-8);
    for (int r = 0; r < 3; ++r)
      for (int s = 0; s < 3; ++s)
        CHECK(fields::max_coeff_difference(am.metric.component(r, s),
                                           fields::constant_field(Rank::scalar, {r == s ? 1.0 : 0.0, 0, 0}, 0)) <= 1e-12);
    CHECK(am.lambda == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(am.residual <= 1e-8);
  }
  SUBCASE("alpha_2: Reeb field has unit length and alpha is a curl eigenform") {
    const ContactForm a = tight_form(2);
    const AdaptedMetric am = adapted_metric(a, AlmostComplexStructure::standard(a, 12));
    const auto x = reeb_field(a);
    for (double z : {0.1, 0.7, 2.5}) {
      const Eigen::Vector3d p(0.3, 0.4, z);
      const Eigen::Vector3d v = x->value(p);
      CHECK(v.dot(am.metric.at(p) * v) == doctest::Approx(1.0).epsilon(1e-10));
    }
    CHECK(am.residual <= 1e-6);
    CHECK(am.lambda == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("orientation-reversing structure is rejected") {
    const ContactForm a = tight_form(1);
    const AlmostComplexStructure j(a, 12, [](const Eigen::Vector3d&) {
      Eigen::Matrix2d r;
      r << 0.0, 1.0, -1.0, 0.0;
      return r;
    });
    CHECK(j.taming() < 0.0);
    CHECK_THROWS_AS(adapted_metric(a, j), IncompatibleStructure);
  }
}
