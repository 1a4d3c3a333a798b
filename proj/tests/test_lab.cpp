#include "curllab/error.hpp"
#include "curllab/io.hpp"
#include "curllab/lab.hpp"

#include <doctest.h>

#include <sstream>

using namespace curllab;
using namespace curllab::lab;
using fields::Rank;

namespace {

/// Smallest eigenvalue of g over an n^3 grid.
double grid_min_eigenvalue(const MetricField& g, int n) {
  double worst = 1e300;
  const double h = 2.0 * M_PI / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Eigen::Matrix3d m = g.at(Eigen::Vector3d(h * i + 0.01, h * j + 0.02, h * k + 0.03));
        worst = std::min(worst, Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(m).eigenvalues()[0]);
      }
  return worst;
}

SweepRecord sample_record() {
  SweepRecord r;
  r.sample = 3;
  r.seed = 11;
  r.metric_min_eigenvalue = 0.97;
  r.min_gap = 1.0 / 3.0;
  PairRecord p;
  p.lambda = 1.0 + 1e-3 / 7.0;
  p.residual = 2.5e-12;
  p.gap = 0.1;
  p.fixed_points = 2;
  p.nondegenerate_fixed_points = 1;
  p.mechanism = "saddle_fixed_point";
  p.exponent = 0.123456789;
  p.certificate = {{"mechanism", "saddle_fixed_point"}, {"witness", {{"x", {0.1, 0.2, 0.3}}}}};
  r.pairs.push_back(p);
  p.multiplicity = 2;
  p.mechanism = "inconclusive";
  p.certificate = nullptr;
  p.orbits = 4;
  p.nondegenerate_orbits = 3;
  r.pairs.push_back(p);
  return r;
}

}  // namespace

TEST_CASE("field and metric files") {
  const auto f = fields::abc_one_form(1.0, 0.5, 0.25, 2);
  const auto back = io::field_from_json(io::to_json(f));
  CHECK(back.rank() == Rank::one_form);
  CHECK(back.truncation() == 2);
  CHECK(fields::max_coeff_difference(back, f) == 0.0);
  CHECK(io::to_json(back).dump() == io::to_json(f).dump());

  Ensemble e;
  e.eps = 0.05;
  const MetricField g = sample_metric(e, 4);
  const MetricField g2 = io::metric_from_json(io::to_json(g));
  for (int r = 0; r < 3; ++r)
    for (int s = 0; s < 3; ++s) CHECK(fields::max_coeff_difference(g.component(r, s), g2.component(r, s)) == 0.0);

  curlspec::EigenPair p;
  p.lambda = -2.5;
  p.alpha = fields::tight_one_form(2, 2);
  p.multiplicity = 3;
  const auto q = io::eigenpair_from_json(io::to_json(p));
  CHECK(q.lambda == -2.5);
  CHECK(q.multiplicity == 3);
  CHECK(fields::max_coeff_difference(q.alpha, p.alpha) == 0.0);

  // A lone coefficient without its conjugate is not a real field.
  const nlohmann::json bad = {{"rank", "scalar"}, {"N", 1}, {"coeffs", {{1, 0, 0, 0, 1.0, 0.0}}}};
  CHECK_THROWS_AS(io::field_from_json(bad), InvalidArgument);
  const nlohmann::json out_of_range = {{"rank", "scalar"}, {"N", 1}, {"coeffs", {{2, 0, 0, 0, 1.0, 0.0}}}};
  CHECK_THROWS_AS(io::field_from_json(out_of_range), InvalidArgument);
  CHECK_THROWS_AS(io::read_json("/nonexistent/path.json"), IoError);
}

TEST_CASE("named inputs") {
  CHECK(io::load_metric("flat").is_flat());
  const auto c = io::load_metric("conformal(2)");
  CHECK(c.at(Eigen::Vector3d(0.3, 0.2, 0.1))(0, 0) == doctest::Approx(4.0));
  CHECK(io::load_metric("conformal:3").at(Eigen::Vector3d::Zero())(2, 2) == doctest::Approx(9.0));
  const auto r1 = io::load_metric("random_cr(2, 0.01, 7)");
  const auto r2 = io::load_metric("random_cr(2, 0.01, 7)");
  CHECK(io::to_json(r1).dump() == io::to_json(r2).dump());
  CHECK_FALSE(r1.is_flat());
  CHECK_THROWS_AS(io::load_metric("conformal(-1)"), InvalidArgument);

  const auto abc = io::load_vector_field("abc:1,1,1", MetricField::flat());
  const Eigen::Vector3d x(0.3, 0.7, 1.1);
  CHECK((abc->value(x) - Eigen::Vector3d(std::sin(x[2]) + std::cos(x[1]), std::sin(x[0]) + std::cos(x[2]),
                                         std::sin(x[1]) + std::cos(x[0])))
            .norm() <= 1e-14);
  const auto xi = io::load_vector_field("xi:2", MetricField::flat());
  CHECK((xi->value(x) - Eigen::Vector3d(std::sin(2 * x[2]), std::cos(2 * x[2]), 0.0)).norm() <= 1e-14);
  CHECK(io::load_form("xi:1").rank() == Rank::one_form);
  CHECK(io::load_form("abc:1,1,1", 3).truncation() == 3);
}

TEST_CASE("metric ensemble") {
  Ensemble e;
  e.eps = 0.0;
  CHECK(sample_metric(e, 5).is_flat());

  e.eps = 1e-2;
  const auto a = sample_metric(e, 2);
  const auto b = sample_metric(e, 2);
  const auto c = sample_metric(e, 3);
  CHECK(io::to_json(a).dump() == io::to_json(b).dump());
  CHECK(io::to_json(a).dump() != io::to_json(c).dump());
  for (int s = 0; s < 5; ++s) CHECK(grid_min_eigenvalue(sample_metric(e, static_cast<std::uint64_t>(s)), 16) >= 0.9);

  // Coefficients decay like (1 + |m|)^(-r - 2).
  const auto h00 = a.component(0, 0);
  CHECK(std::abs(h00.coeff({2, 2, 2}, 0)) <= 1e-2 * std::pow(1.0 + std::sqrt(12.0), -4.0) * std::sqrt(2.0) + 1e-18);

  e.eps = 50.0;
  e.max_retries = 3;
  CHECK_THROWS_AS(sample_metric(e, 0), EpsilonTooLarge);
}

TEST_CASE("sweep configs") {
  SweepConfig c;
  c.samples = 7;
  c.ensemble.eps = 3e-3;
  c.window_lower = 0.25;
  const auto back = config_from_json(to_json(c));
  CHECK(to_json(back).dump() == to_json(c).dump());
  CHECK(config_hash(back) == config_hash(c));
  SweepConfig d = c;
  d.threads = 8;
  d.jsonl_path = "x.jsonl";
  CHECK(config_hash(d) == config_hash(c));
  d.ensemble.seed = 2;
  CHECK(config_hash(d) != config_hash(c));
  CHECK(config_hash(c).size() == 16);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"budget", "slow"}}), InvalidArgument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"window", {2.0, 1.0}}}), InvalidArgument);
}

TEST_CASE("reports") {
  std::ostringstream empty;
  emit_report({}, ReportFormat::csv, empty);
  CHECK(empty.str() == "sample,gap,frac_simple,frac_nondeg_fp,frac_nondeg_orbits,frac_certified\n");

  SweepRecord r = sample_record();
  SweepRecord q = r;
  q.sample = 1;
  q.pairs.clear();
  q.min_gap.reset();
  q.error = "sample failed";
  std::ostringstream csv;
  emit_report({r, q}, ReportFormat::csv, csv);
  std::istringstream lines(csv.str());
  std::string header, row1, row2, extra;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK_FALSE(std::getline(lines, extra));
  CHECK(row1 == "3,0.33333333333333331,0.5,0.5,0.75,0.5");
  CHECK(row2 == "1,,1,1,1,1");

  std::ostringstream jsonl;
  emit_report({r, q}, ReportFormat::jsonl, jsonl);
  std::istringstream in(jsonl.str());
  const auto back = read_records(in);
  REQUIRE(back.size() == 2);
  std::ostringstream again;
  emit_report(back, ReportFormat::jsonl, again);
  CHECK(again.str() == jsonl.str());
}

TEST_CASE("sweeps") {
  SweepConfig c;
  c.samples = 3;
  c.truncation = 2;
  c.window_lower = 0.5;
  c.window_upper = 1.2;
  SUBCASE("the unperturbed cluster stays degenerate") {
    c.ensemble.eps = 0.0;
    c.samples = 1;
    const auto records = run_sweep(c);
    REQUIRE(records.size() == 1);
    CHECK(records[0].pairs.size() == 6);
    REQUIRE(records[0].min_gap);
    CHECK(*records[0].min_gap <= 1e-10);
    CHECK(records[0].frac_simple() == 0.0);
  }
  SUBCASE("streamed output is independent of the thread count") {
    c.ensemble.eps = 1e-2;
    c.threads = 1;
    std::ostringstream one;
    const auto r1 = run_sweep(c, &one);
    c.threads = 4;
    std::ostringstream four;
    run_sweep(c, &four);
    CHECK(one.str() == four.str());
    std::istringstream in(one.str());
    std::string header;
    std::getline(in, header);
    CHECK(nlohmann::json::parse(header)["config_hash"] == config_hash(c));
    for (const auto& r : r1) {
      CHECK(r.pairs.size() == 6);
      CHECK(r.frac_simple() == 1.0);
      CHECK_FALSE(r.error);
    }
  }
}
