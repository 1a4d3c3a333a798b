#pragma once

// Genericity sweeps over random metric perturbations: reproducible configs,
// streamed JSON-lines records and CSV summaries.

#include "curllab/curlspec.hpp"
#include "curllab/instability.hpp"
#include "curllab/metric.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace curllab::lab {

using fields::MetricField;

/// g = base + eps h with h a random symmetric trigonometric polynomial whose
/// coefficients at wavevector m (|m|_inf <= mode_cutoff) are uniform in
/// [-1, 1] + i [-1, 1] scaled by (1 + |m|)^(-r-2).
struct Ensemble {
  std::string base = "flat";
  double r = 2.0;
  double eps = 1e-2;
  int mode_cutoff = 2;
  std::uint64_t seed = 1;
  int max_retries = 16;
};

nlohmann::json to_json(const Ensemble& e);
Ensemble ensemble_from_json(const nlohmann::json& j);

/// Sample `sample_id` of the ensemble. The generator is keyed by the hash of
/// the ensemble and the sample id. Throws EpsilonTooLarge when no draw in
/// max_retries is positive definite.
MetricField sample_metric(const Ensemble& ensemble, std::uint64_t sample_id = 0);

struct SweepConfig {
  Ensemble ensemble;
  int samples = 20;
  int truncation = 3;
  double window_lower = 0.5;
  double window_upper = 1.2;
  /// Run certify() on every eigenpair.
  bool certify = false;
  std::string budget = "quick";
  /// Worker threads (0: CURLLAB_THREADS or the hardware concurrency). Not
  /// part of the config hash.
  int threads = 0;
  /// Output paths (empty: not written). Not part of the config hash.
  std::string jsonl_path;
  std::string csv_path;
};

nlohmann::json to_json(const SweepConfig& c);
SweepConfig config_from_json(const nlohmann::json& j);
/// The config without threads and output paths.
nlohmann::json canonical_config(const SweepConfig& c);
/// FNV-1a 64 of the canonical dump of the config without threads and paths,
/// as 16 hex digits.
std::string config_hash(const SweepConfig& c);

struct PairRecord {
  double lambda = 0.0;
  double residual = 0.0;
  int multiplicity = 1;
  double gap = 0.0;
  int fixed_points = 0;
  int nondegenerate_fixed_points = 0;
  int orbits = 0;
  int nondegenerate_orbits = 0;
  int hyperbolic_orbits = 0;
  int recurrences = 0;
  /// Empty when certification was not requested.
  std::string mechanism;
  double exponent = 0.0;
  /// Full certificate document (null when not certified).
  nlohmann::json certificate;
};

struct SweepRecord {
  int sample = 0;
  std::uint64_t seed = 0;
  double metric_min_eigenvalue = 0.0;
  /// Smallest distance between an eigenvalue in the window and any other
  /// computed eigenvalue (null when the window is empty).
  std::optional<double> min_gap;
  std::vector<PairRecord> pairs;
  /// Set when the sample failed; the sweep continues.
  std::optional<std::string> error;

  double frac_simple() const;
  double frac_nondegenerate_fixed_points() const;
  double frac_nondegenerate_orbits() const;
  double frac_certified() const;
};

nlohmann::json to_json(const SweepRecord& r);
SweepRecord record_from_json(const nlohmann::json& j);

/// Processes the samples on a worker pool. When `jsonl` is given, a header
/// line {"config_hash", "config": canonical_config} is written first and every record is
/// streamed as soon as all records of smaller sample id are out.
std::vector<SweepRecord> run_sweep(const SweepConfig& config, std::ostream* jsonl = nullptr);

enum class ReportFormat { csv, jsonl };
/// csv columns: sample, gap, frac_simple, frac_nondeg_fp, frac_nondeg_orbits,
/// frac_certified. Fractions over an empty set are 1.
void emit_report(const std::vector<SweepRecord>& records, ReportFormat format, std::ostream& out);
/// Writes to a file; throws IoError naming the path.
void emit_report(const std::vector<SweepRecord>& records, ReportFormat format, const std::string& path);
/// Parses JSON lines as written by emit_report or run_sweep (header lines
/// are skipped).
std::vector<SweepRecord> read_records(std::istream& in);

}  // namespace curllab::lab
