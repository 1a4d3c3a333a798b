#include "curllab/io.hpp"

#include "curllab/error.hpp"
#include "curllab/lab.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

namespace curllab::io {

using fields::Rank;

namespace {

Rank rank_from_string(const std::string& s) {
  for (Rank r : {Rank::scalar, Rank::one_form, Rank::two_form, Rank::vector})
    if (fields::to_string(r) == s) return r;
  throw InvalidArgument("unknown rank '" + s + "'");
}

nlohmann::json coefficient_list(const std::vector<const FourierField*>& comps, bool packed) {
  nlohmann::json list = nlohmann::json::array();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const FourierField& f = *comps[i];
    for (int c = 0; c < f.components(); ++c) {
      const auto data = f.component_data(c);
      for (std::size_t m = 0; m < f.mode_count(); ++m) {
        const auto z = data[m];
        if (z == fields::Complex(0.0, 0.0)) continue;
        const auto k = f.wavevector(m);
        list.push_back({k[0], k[1], k[2], packed ? int(i) : c, z.real(), z.imag()});
      }
    }
  }
  return list;
}

int read_truncation(const nlohmann::json& j) {
  const int n = j.at("N").get<int>();
  if (n < 0) throw InvalidArgument("negative truncation in field file");
  return n;
}

void read_coefficient(const nlohmann::json& row, int n, int components, fields::Wavevector& k, int& comp,
                      fields::Complex& z) {
  if (!row.is_array() || row.size() != 6) throw InvalidArgument("coefficient rows are [m1, m2, m3, component, re, im]");
  k = {row[0].get<int>(), row[1].get<int>(), row[2].get<int>()};
  for (int v : k)
    if (std::abs(v) > n) throw InvalidArgument("wavevector outside the truncation in field file");
  comp = row[3].get<int>();
  if (comp < 0 || comp >= components) throw InvalidArgument("component index out of range in field file");
  z = {row[4].get<double>(), row[5].get<double>()};
}

void require_real(const FourierField& f) {
  if (f.hermitian_defect() > 1e-12) throw InvalidArgument("field file does not describe a real field");
}

}  // namespace

nlohmann::json to_json(const FourierField& f) {
  return {{"rank", fields::to_string(f.rank())}, {"N", f.truncation()}, {"coeffs", coefficient_list({&f}, false)}};
}

FourierField field_from_json(const nlohmann::json& j) {
  try {
    const Rank rank = rank_from_string(j.at("rank").get<std::string>());
    const int n = read_truncation(j);
    FourierField f(rank, n);
    for (const auto& row : j.at("coeffs")) {
      fields::Wavevector k;
      int c = 0;
      fields::Complex z;
      read_coefficient(row, n, f.components(), k, c, z);
      f.set(k, c, z);
    }
    require_real(f);
    return f;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed field document: ") + e.what());
  }
}

nlohmann::json to_json(const MetricField& g) {
  std::vector<const FourierField*> comps;
  for (const auto& c : g.packed_components()) comps.push_back(&c);
  return {{"rank", "metric"}, {"N", g.truncation()}, {"coeffs", coefficient_list(comps, true)}};
}

MetricField metric_from_json(const nlohmann::json& j) {
  try {
    if (j.at("rank").get<std::string>() != "metric") throw InvalidArgument("expected a document of rank 'metric'");
    const int n = read_truncation(j);
    std::array<FourierField, 6> packed;
    for (auto& p : packed) p = FourierField(Rank::scalar, n);
    for (const auto& row : j.at("coeffs")) {
      fields::Wavevector k;
      int c = 0;
      fields::Complex z;
      read_coefficient(row, n, 6, k, c, z);
      packed[static_cast<std::size_t>(c)].set(k, 0, z);
    }
    for (const auto& p : packed) require_real(p);
    return MetricField(packed);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed metric document: ") + e.what());
  }
}

nlohmann::json to_json(const curlspec::EigenPair& p) {
  return {{"index", p.index},
          {"lambda", p.lambda},
          {"residual", p.residual},
          {"tolerance", p.tolerance},
          {"codifferential_residual", p.codifferential_residual},
          {"multiplicity", p.multiplicity},
          {"gap", p.gap},
          {"alpha", to_json(p.alpha)}};
}

curlspec::EigenPair eigenpair_from_json(const nlohmann::json& j) {
  try {
    curlspec::EigenPair p;
    p.index = j.value("index", 0);
    p.lambda = j.at("lambda").get<double>();
    p.residual = j.value("residual", 0.0);
    p.tolerance = j.value("tolerance", 0.0);
    p.codifferential_residual = j.value("codifferential_residual", 0.0);
    p.multiplicity = j.value("multiplicity", 1);
    p.gap = j.value("gap", 0.0);
    p.alpha = field_from_json(j.at("alpha"));
    if (p.alpha.rank() != Rank::one_form) throw InvalidArgument("an eigenpair holds a one_form");
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed eigenpair document: ") + e.what());
  }
}

namespace {

nlohmann::json matrix(const Eigen::MatrixXd& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(row);
  }
  return rows;
}

nlohmann::json complex(std::complex<double> z) { return {z.real(), z.imag()}; }

}  // namespace

nlohmann::json to_json(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }

nlohmann::json to_json(const dynamics::FixedPointRecord& r) {
  return {{"x", to_json(r.x)},
          {"jacobian", matrix(r.jacobian)},
          {"eigenvalues", {complex(r.eigenvalues[0]), complex(r.eigenvalues[1]), complex(r.eigenvalues[2])}},
          {"type", dynamics::to_string(r.type)},
          {"nondegenerate", r.nondegenerate},
          {"residual", r.residual},
          {"trace", r.trace}};
}

nlohmann::json to_json(const dynamics::PeriodicOrbitRecord& r) {
  return {{"seed", to_json(r.seed)},
          {"x", to_json(r.x)},
          {"period", r.period},
          {"homology", r.homology},
          {"monodromy", matrix(r.monodromy)},
          {"transverse", matrix(r.transverse)},
          {"multipliers", {complex(r.multipliers[0]), complex(r.multipliers[1])}},
          {"type", dynamics::to_string(r.type)},
          {"nondegenerate", r.nondegenerate},
          {"cz_index", r.cz_index ? nlohmann::json(*r.cz_index) : nlohmann::json(nullptr)},
          {"return_residual", r.return_residual},
          {"flow_multiplier_error", r.flow_multiplier_error},
          {"transverse_det", r.transverse_det}};
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

namespace {

std::vector<double> numbers(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str()) throw InvalidArgument("expected a number, got '" + item + "'");
    while (*end == ' ') ++end;
    if (*end != '\0') throw InvalidArgument("expected a number, got '" + item + "'");
    out.push_back(v);
  }
  return out;
}

bool named(const std::string& spec, const std::string& name, std::vector<double>& args) {
  const std::regex call("^" + name + R"(\s*[\(:]\s*([^\)]*)\)?\s*$)");
  std::smatch m;
  if (!std::regex_match(spec, m, call)) return false;
  args = numbers(m[1].str());
  return true;
}

int integer(double v, const std::string& what) {
  if (v != std::round(v)) throw InvalidArgument(what + " must be an integer");
  return static_cast<int>(v);
}

}  // namespace

MetricField load_metric(const std::string& spec) {
  std::vector<double> a;
  if (spec == "flat") return MetricField::flat();
  if (named(spec, "conformal", a)) {
    if (a.size() != 1 || !(a[0] > 0.0)) throw InvalidArgument("conformal(c) needs one positive factor");
    return MetricField::conformal(a[0]);
  }
  if (named(spec, "random_cr", a)) {
    if (a.size() != 3) throw InvalidArgument("random_cr(r, eps, seed) needs three arguments");
    lab::Ensemble e;
    e.r = a[0];
    e.eps = a[1];
    e.seed = static_cast<std::uint64_t>(integer(a[2], "the seed"));
    return lab::sample_metric(e, 0);
  }
  return metric_from_json(read_json(spec));
}

FourierField load_form(const std::string& spec, int truncation) {
  std::vector<double> a;
  FourierField f;
  if (named(spec, "xi", a)) {
    if (a.size() != 1) throw InvalidArgument("xi:k needs one integer");
    const int k = integer(a[0], "k");
    f = fields::tight_one_form(k, std::abs(k));
  } else if (named(spec, "abc", a)) {
    if (a.size() != 3) throw InvalidArgument("abc:A,B,C needs three numbers");
    f = fields::abc_one_form(a[0], a[1], a[2], 1);
  } else {
    const nlohmann::json j = read_json(spec);
    f = j.contains("alpha") ? eigenpair_from_json(j).alpha : field_from_json(j);
    if (f.rank() != Rank::one_form) throw UnsupportedRank("'" + spec + "' does not hold a one_form");
  }
  return truncation > 0 ? f.retruncated(truncation) : f;
}

dynamics::VectorFieldPtr load_vector_field(const std::string& spec, const MetricField& g) {
  std::vector<double> a;
  if (named(spec, "abc", a)) {
    if (a.size() != 3) throw InvalidArgument("abc:A,B,C needs three numbers");
    return std::make_shared<dynamics::AbcField>(a[0], a[1], a[2]);
  }
  if (named(spec, "xi", a)) {
    if (a.size() != 1) throw InvalidArgument("xi:k needs one integer");
    const int k = integer(a[0], "k");
    return std::make_shared<dynamics::FourierVectorField>(
        fields::tight_one_form(k, std::abs(k)).with_rank(Rank::vector));
  }
  const nlohmann::json j = read_json(spec);
  if (j.contains("alpha")) return std::make_shared<dynamics::SharpField>(g, eigenpair_from_json(j).alpha);
  const FourierField f = field_from_json(j);
  if (f.rank() == Rank::vector) return std::make_shared<dynamics::FourierVectorField>(f);
  if (f.rank() == Rank::one_form) return std::make_shared<dynamics::SharpField>(g, f);
  throw UnsupportedRank("'" + spec + "' holds neither a vector field nor a one_form");
}

}  // namespace curllab::io
