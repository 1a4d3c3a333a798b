#include "curllab/lab.hpp"

#include "curllab/detail/parallel.hpp"
#include "curllab/error.hpp"
#include "curllab/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <random>
#include <sstream>

namespace curllab::lab {

using fields::FourierField;
using fields::Rank;

namespace {

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

FourierField random_component(std::mt19937_64& rng, int cutoff, double r) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  FourierField f(Rank::scalar, cutoff);
  for (std::size_t i = 0; i < f.mode_count(); ++i) {
    const fields::Wavevector m = f.wavevector(i);
    const fields::Wavevector neg{-m[0], -m[1], -m[2]};
    const std::size_t j = f.mode_index(neg);
    if (j < i) continue;
    const double norm = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    const double scale = std::pow(1.0 + norm, -r - 2.0);
    const double re = unit(rng);
    const double im = j == i ? 0.0 : unit(rng);
    f.set_real(m, 0, scale * fields::Complex(re, im));
  }
  return f;
}

}  // namespace

nlohmann::json to_json(const Ensemble& e) {
  return {{"base", e.base},   {"r", e.r},   {"eps", e.eps}, {"mode_cutoff", e.mode_cutoff},
          {"seed", e.seed}, {"max_retries", e.max_retries}};
}

Ensemble ensemble_from_json(const nlohmann::json& j) {
  Ensemble e;
  e.base = j.value("base", e.base);
  e.r = j.value("r", e.r);
  e.eps = j.value("eps", e.eps);
  e.mode_cutoff = j.value("mode_cutoff", e.mode_cutoff);
  e.seed = j.value("seed", e.seed);
  e.max_retries = j.value("max_retries", e.max_retries);
  if (e.mode_cutoff < 0 || e.max_retries < 1 || !(e.eps >= 0.0))
    throw InvalidArgument("ensemble needs mode_cutoff >= 0, max_retries >= 1 and eps >= 0");
  return e;
}

MetricField sample_metric(const Ensemble& ensemble, std::uint64_t sample_id) {
  const MetricField base = io::load_metric(ensemble.base);
  if (ensemble.eps == 0.0) return base;
  const std::uint64_t key = fnv1a(to_json(ensemble).dump());
  std::seed_seq seq{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32),
                    static_cast<std::uint32_t>(sample_id), static_cast<std::uint32_t>(sample_id >> 32)};
  std::mt19937_64 rng(seq);
  std::string last;
  for (int attempt = 0; attempt < ensemble.max_retries; ++attempt) {
    std::array<FourierField, 6> h;
    for (auto& c : h) c = random_component(rng, ensemble.mode_cutoff, ensemble.r);
    try {
      return base.perturbed(h, ensemble.eps);
    } catch (const DegenerateMetric& e) {
      last = e.what();
    }
  }
  throw EpsilonTooLarge("no positive definite sample in " + std::to_string(ensemble.max_retries) +
                        " draws at eps = " + std::to_string(ensemble.eps) + " (" + last + ")");
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const SweepConfig& c) {
  return {{"ensemble", to_json(c.ensemble)},
          {"samples", c.samples},
          {"truncation", c.truncation},
          {"window", {c.window_lower, c.window_upper}},
          {"certify", c.certify},
          {"budget", c.budget},
          {"threads", c.threads},
          {"output", {{"jsonl", c.jsonl_path}, {"csv", c.csv_path}}}};
}

SweepConfig config_from_json(const nlohmann::json& j) {
  try {
    SweepConfig c;
    if (j.contains("ensemble")) c.ensemble = ensemble_from_json(j.at("ensemble"));
    c.samples = j.value("samples", c.samples);
    c.truncation = j.value("truncation", c.truncation);
    if (j.contains("window")) {
      const auto& w = j.at("window");
      if (!w.is_array() || w.size() != 2) throw InvalidArgument("window must be [lower, upper]");
      c.window_lower = w[0].get<double>();
      c.window_upper = w[1].get<double>();
    }
    c.certify = j.value("certify", c.certify);
    c.budget = j.value("budget", c.budget);
    c.threads = j.value("threads", c.threads);
    if (j.contains("output")) {
      c.jsonl_path = j.at("output").value("jsonl", c.jsonl_path);
      c.csv_path = j.at("output").value("csv", c.csv_path);
    }
    if (c.samples < 0 || c.truncation < 1 || !(c.window_lower < c.window_upper))
      throw InvalidArgument("sweep needs samples >= 0, truncation >= 1 and a nonempty window");
    instability::Budget::preset(c.budget);
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sweep config: ") + e.what());
  }
}

nlohmann::json canonical_config(const SweepConfig& c) {
  nlohmann::json j = to_json(c);
  j.erase("threads");
  j.erase("output");
  return j;
}

std::string config_hash(const SweepConfig& c) { return hex(fnv1a(canonical_config(c).dump())); }

// ---------------------------------------------------------------------------

namespace {

double ratio(int num, int den) { return den == 0 ? 1.0 : double(num) / double(den); }

}  // namespace

double SweepRecord::frac_simple() const {
  int n = 0;
  for (const auto& p : pairs) n += p.multiplicity == 1;
  return ratio(n, static_cast<int>(pairs.size()));
}

double SweepRecord::frac_nondegenerate_fixed_points() const {
  int num = 0, den = 0;
  for (const auto& p : pairs) {
    num += p.nondegenerate_fixed_points;
    den += p.fixed_points;
  }
  return ratio(num, den);
}

double SweepRecord::frac_nondegenerate_orbits() const {
  int num = 0, den = 0;
  for (const auto& p : pairs) {
    num += p.nondegenerate_orbits;
    den += p.orbits;
  }
  return ratio(num, den);
}

double SweepRecord::frac_certified() const {
  int n = 0;
  for (const auto& p : pairs) n += !p.mechanism.empty() && p.mechanism != "inconclusive";
  return ratio(n, static_cast<int>(pairs.size()));
}

nlohmann::json to_json(const SweepRecord& r) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& p : r.pairs)
    pairs.push_back({{"lambda", p.lambda},
                     {"residual", p.residual},
                     {"multiplicity", p.multiplicity},
                     {"gap", p.gap},
                     {"fixed_points", p.fixed_points},
                     {"nondegenerate_fixed_points", p.nondegenerate_fixed_points},
                     {"orbits", p.orbits},
                     {"nondegenerate_orbits", p.nondegenerate_orbits},
                     {"hyperbolic_orbits", p.hyperbolic_orbits},
                     {"recurrences", p.recurrences},
                     {"mechanism", p.mechanism},
                     {"exponent", p.exponent},
                     {"certificate", p.certificate}});
  return {{"sample", r.sample},
          {"seed", r.seed},
          {"metric_min_eigenvalue", r.metric_min_eigenvalue},
          {"min_gap", r.min_gap ? nlohmann::json(*r.min_gap) : nlohmann::json(nullptr)},
          {"pairs", pairs},
          {"error", r.error ? nlohmann::json(*r.error) : nlohmann::json(nullptr)}};
}

SweepRecord record_from_json(const nlohmann::json& j) {
  try {
    SweepRecord r;
    r.sample = j.at("sample").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.metric_min_eigenvalue = j.at("metric_min_eigenvalue").get<double>();
    if (!j.at("min_gap").is_null()) r.min_gap = j.at("min_gap").get<double>();
    if (!j.at("error").is_null()) r.error = j.at("error").get<std::string>();
    for (const auto& q : j.at("pairs")) {
      PairRecord p;
      p.lambda = q.at("lambda").get<double>();
      p.residual = q.at("residual").get<double>();
      p.multiplicity = q.at("multiplicity").get<int>();
      p.gap = q.at("gap").get<double>();
      p.fixed_points = q.at("fixed_points").get<int>();
      p.nondegenerate_fixed_points = q.at("nondegenerate_fixed_points").get<int>();
      p.orbits = q.at("orbits").get<int>();
      p.nondegenerate_orbits = q.at("nondegenerate_orbits").get<int>();
      p.hyperbolic_orbits = q.at("hyperbolic_orbits").get<int>();
      p.recurrences = q.at("recurrences").get<int>();
      p.mechanism = q.at("mechanism").get<std::string>();
      p.exponent = q.at("exponent").get<double>();
      p.certificate = q.at("certificate");
      r.pairs.push_back(std::move(p));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed sweep record: ") + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

SweepRecord process_sample(const SweepConfig& config, int sample, int inner_threads) {
  SweepRecord rec;
  rec.sample = sample;
  rec.seed = config.ensemble.seed;
  try {
    const MetricField g = sample_metric(config.ensemble, static_cast<std::uint64_t>(sample));
    rec.metric_min_eigenvalue = g.min_eigenvalue();
    const auto pairs = curlspec::eigenpairs(g, config.truncation,
                                            curlspec::Window::interval(config.window_lower, config.window_upper));
    instability::Budget budget = instability::Budget::preset(config.budget);
    budget.threads = inner_threads;
    budget.seed = config.ensemble.seed;
    for (const auto& pair : pairs) {
      PairRecord p;
      p.lambda = pair.lambda;
      p.residual = pair.residual;
      p.multiplicity = pair.multiplicity;
      p.gap = pair.gap;
      rec.min_gap = std::min(rec.min_gap.value_or(std::numeric_limits<double>::infinity()), pair.gap);
      if (config.certify) {
        const auto cert = instability::certify(g, pair, budget, "sample:" + std::to_string(sample),
                                               "pair:" + std::to_string(pair.index));
        p.fixed_points = cert.fixed_points;
        p.nondegenerate_fixed_points = cert.nondegenerate_fixed_points;
        p.orbits = cert.orbits;
        p.nondegenerate_orbits = cert.nondegenerate_orbits;
        p.hyperbolic_orbits = cert.hyperbolic_orbits;
        p.recurrences = cert.recurrences;
        p.mechanism = instability::to_string(cert.mechanism);
        p.exponent = cert.exponent;
        p.certificate = instability::to_json(cert);
      }
      rec.pairs.push_back(std::move(p));
    }
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

std::vector<SweepRecord> run_sweep(const SweepConfig& config, std::ostream* jsonl) {
  const int threads = config.threads > 0 ? config.threads : detail::default_threads();
  const int inner = threads > 1 ? 1 : 0;
  const auto n = static_cast<std::size_t>(config.samples);
  std::vector<std::optional<SweepRecord>> done(n);
  std::vector<SweepRecord> out(n);
  std::mutex writer;
  std::size_t next = 0;
  if (jsonl) {
    *jsonl << nlohmann::json{{"config_hash", config_hash(config)}, {"config", canonical_config(config)}}.dump() << '\n';
    jsonl->flush();
  }
  detail::parallel_for(config.samples, threads, [&](int i) {
    SweepRecord rec = process_sample(config, i, inner);
    std::lock_guard lock(writer);
    done[static_cast<std::size_t>(i)] = std::move(rec);
    while (next < n && done[next]) {
      if (jsonl) {
        *jsonl << to_json(*done[next]).dump() << '\n';
        jsonl->flush();
      }
      out[next] = std::move(*done[next]);
      ++next;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------

namespace {

std::string number(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace

void emit_report(const std::vector<SweepRecord>& records, ReportFormat format, std::ostream& out) {
  if (format == ReportFormat::jsonl) {
    for (const auto& r : records) out << to_json(r).dump() << '\n';
    return;
  }
  out << "sample,gap,frac_simple,frac_nondeg_fp,frac_nondeg_orbits,frac_certified\n";
  for (const auto& r : records)
    out << r.sample << ',' << (r.min_gap ? number(*r.min_gap) : std::string()) << ',' << number(r.frac_simple())
        << ',' << number(r.frac_nondegenerate_fixed_points()) << ',' << number(r.frac_nondegenerate_orbits()) << ','
        << number(r.frac_certified()) << '\n';
}

void emit_report(const std::vector<SweepRecord>& records, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  emit_report(records, format, out);
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<SweepRecord> read_records(std::istream& in) {
  std::vector<SweepRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidArgument(std::string("malformed JSON line: ") + e.what());
    }
    if (j.contains("config_hash")) continue;
    out.push_back(record_from_json(j));
  }
  return out;
}

}  // namespace curllab::lab
