#pragma once

// Linear instability certificates: saddle fixed points, hyperbolic periodic
// orbits, or positive growth of the short-wavelength (WKB) amplitude
// transported along a flowline.

#include "curllab/curlspec.hpp"
#include "curllab/dynamics.hpp"

#include <Eigen/Dense>
#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace curllab::instability {

// ---------------------------------------------------------------------------
// WKB transport
//
//   x'  = u(x)
//   xi' = -Du(x)^T xi
//   b'  = -Du(x) b + 2 (xi . Du(x) b) xi / |xi|^2
//
// b . xi and xi . u(x) are conserved. Norms are Euclidean in coordinates.

struct WkbState {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Vector3d xi = Eigen::Vector3d::UnitZ();
  Eigen::Vector3d b = Eigen::Vector3d::UnitX();
};

struct WkbOptions {
  double tol = 1e-10;
  /// Renormalization interval for b and xi.
  double renormalize_every = 1.0;
};

struct WkbResult {
  /// max over the initial amplitudes of log(|b(T)| / |b(0)|) / T.
  double exponent = 0.0;
  std::vector<double> per_amplitude;
  /// max over the initial amplitudes of the smaller of the growth rates over
  /// the two halves of [0, T]. Exponential growth shows in both halves; a
  /// transient burst shows in one, and algebraic growth t^p gives about
  /// 2 p log(2) / T.
  double sustained_exponent = 0.0;
  /// max over the run of |b . xi| / (|b| |xi|).
  double orthogonality_drift = 0.0;
  /// max over the run of |xi . u - xi0 . u0| / (|xi| max(|u|, |u0|)).
  double transport_drift = 0.0;
  WkbState final_state;  // xi and b renormalized to unit length
};

/// Integrates the transport system from n_amplitudes (1 or 2) orthonormal
/// initial amplitudes b perpendicular to xi0. Throws StiffnessError from the
/// integrator and CausticError when xi collapses to zero.
WkbResult wkb_exponent(const dynamics::VectorField& u, const Eigen::Vector3d& x0, const Eigen::Vector3d& xi0, double T,
                       int n_amplitudes = 2, const WkbOptions& options = {});

// ---------------------------------------------------------------------------
// Certificates

enum class Mechanism { saddle_fixed_point, hyperbolic_orbit, positive_wkb_exponent, inconclusive };
std::string to_string(Mechanism m);
Mechanism mechanism_from_string(const std::string& name);

struct Budget {
  double T_max = 50.0;
  int n_seeds = 64;
  double wkb_T = 200.0;
  double wkb_threshold = 1e-2;
  /// WKB samples in the last stage (0: n_seeds).
  int wkb_samples = 0;
  double reeb_tol = 1e-8;
  std::uint64_t seed = 1;
  int threads = 0;
  dynamics::FixedPointOptions fixed_points;
  dynamics::OrbitOptions orbits;

  /// "default" (the values above) or "quick" (T_max 20, 8 orbit seeds, 8 WKB samples).
  static Budget preset(const std::string& name);
};

struct WkbWitness {
  Eigen::Vector3d x0 = Eigen::Vector3d::Zero();
  Eigen::Vector3d xi0 = Eigen::Vector3d::UnitZ();
  double T = 0.0;
  double exponent = 0.0;  // sustained exponent over [0, T]
};

struct InstabilityCertificate {
  Mechanism mechanism = Mechanism::inconclusive;
  double exponent = 0.0;
  double lambda = 0.0;
  /// Factor c applied to the eigenform before the search: the witness and the
  /// exponent refer to g^{-1}(c alpha), whose RMS speed is 1.
  double field_scale = 1.0;
  std::string metric_id;
  std::string field_id;
  std::optional<dynamics::FixedPointRecord> fixed_point;
  std::optional<dynamics::PeriodicOrbitRecord> orbit;
  /// Field whose flow the orbit witness belongs to: "reeb" or "velocity".
  std::string orbit_field;
  std::optional<WkbWitness> wkb;
  int fixed_points = 0;
  int nondegenerate_fixed_points = 0;
  int orbits = 0;
  int nondegenerate_orbits = 0;
  int hyperbolic_orbits = 0;
  /// Close-return candidates of the orbit stage (0 when it did not run).
  int recurrences = 0;
  double max_wkb_exponent = 0.0;
  std::vector<std::string> diagnostics;
  nlohmann::json tolerances;
};

/// Root mean square of |u|_g over a uniform n^3 grid.
double rms_speed(const dynamics::VectorField& u, const fields::MetricField& g, int n = 16);

/// Runs the criterion chain on u = g^{-1}(c alpha), c normalizing u to unit
/// RMS speed, for the eigenpair: saddle
/// fixed point, then hyperbolic periodic orbit of the Reeb field (or of u
/// when the Reeb construction fails), then the WKB exponent. Errors of the
/// individual stages are folded into the diagnostics.
InstabilityCertificate certify(const fields::MetricField& g, const curlspec::EigenPair& pair,
                               const Budget& budget = {}, const std::string& metric_id = "",
                               const std::string& field_id = "");

/// Same on an arbitrary vector field; `alpha` (optional) is the contact form
/// used for the transverse plane and the Conley-Zehnder index.
InstabilityCertificate certify_field(const dynamics::VectorField& u, const fields::FourierField* alpha,
                                     const Budget& budget = {});

/// Re-checks the witness of a certificate at a tenth of the tolerances it was
/// produced with; WKB witnesses are also rerun over twice their horizon.
/// `u` is the field the witness belongs to (see orbit_field).
bool reverify(const dynamics::VectorField& u, const InstabilityCertificate& cert, const Budget& budget = {});

/// The field a certificate of `certify` for this eigenpair refers to: the
/// normalized velocity field or its Reeb field, per orbit_field.
dynamics::VectorFieldPtr witness_field(const fields::MetricField& g, const curlspec::EigenPair& pair,
                                       const InstabilityCertificate& cert, const Budget& budget = {});

nlohmann::json to_json(const InstabilityCertificate& cert);

}  // namespace curllab::instability
