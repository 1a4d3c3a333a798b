#pragma once

// Flowlines, fixed points, periodic orbits and their linearization.

#include "curllab/fourier_field.hpp"
#include "curllab/vector_field.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace curllab::dynamics {

using Winding = std::array<int, 3>;

/// Reduces each coordinate to [0, 2 pi).
Eigen::Vector3d wrap(const Eigen::Vector3d& x);
/// Euclidean distance on the flat torus.
double torus_distance(const Eigen::Vector3d& a, const Eigen::Vector3d& b);

/// Accepted integration steps in lifted (universal cover) coordinates.
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::Vector3d> lifted;

  std::size_t size() const { return times.size(); }
  Eigen::Vector3d wrapped(std::size_t i) const { return wrap(lifted[i]); }
  /// Number of times each coordinate crossed 2 pi Z since the start.
  Winding winding(std::size_t i) const;
  const Eigen::Vector3d& end() const { return lifted.back(); }
};

/// Integrates x' = u(x) for time T >= 0 with local error <= tol.
Trajectory flow(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol = 1e-10,
                double max_step = 0.0);

/// End point of the flow (lifted coordinates).
Eigen::Vector3d flow_map(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol = 1e-10);

/// End point and fundamental matrix of the variational equation v' = Du v.
struct Linearization {
  Eigen::Vector3d x;
  Eigen::Matrix3d m;
};
Linearization linearized_flow(const VectorField& u, const Eigen::Vector3d& x0, double T, double tol = 1e-11);

// ---------------------------------------------------------------------------
// Fixed points

enum class FixedPointClass { saddle, degenerate, non_hyperbolic };
std::string to_string(FixedPointClass c);

struct FixedPointRecord {
  Eigen::Vector3d x = Eigen::Vector3d::Zero();
  Eigen::Matrix3d jacobian = Eigen::Matrix3d::Zero();
  std::array<std::complex<double>, 3> eigenvalues{};
  FixedPointClass type = FixedPointClass::degenerate;
  bool nondegenerate = false;
  double residual = 0.0;  // |u(x)|
  double trace = 0.0;     // trace of the Jacobian
};

struct FixedPointOptions {
  int grid_density = 16;
  double newton_tol = 1e-10;
  double eig_tol = 1e-6;
  double dedup_tol = 1e-5;
  int max_newton = 60;
};

struct FixedPointSearch {
  std::vector<FixedPointRecord> points;
  int seeds = 0;
  std::vector<std::string> log;  // discarded seeds
};

/// Newton refinement of the local minima of |u| on a uniform grid.
FixedPointSearch find_fixed_points(const VectorField& u, const FixedPointOptions& options = {});

FixedPointRecord classify_fixed_point(const VectorField& u, const Eigen::Vector3d& x, double eig_tol = 1e-6);

// ---------------------------------------------------------------------------
// Periodic orbits

enum class OrbitType { positive_hyperbolic, negative_hyperbolic, elliptic, degenerate };
std::string to_string(OrbitType t);

struct Monodromy {
  Eigen::Matrix3d m = Eigen::Matrix3d::Identity();
  Eigen::Matrix2d p = Eigen::Matrix2d::Identity();
  /// Columns e1, e2 spanning the transverse plane at x0, then u(x0).
  Eigen::Matrix3d frame = Eigen::Matrix3d::Identity();
};

/// M from the variational equation over one period; P is M restricted to
/// the transverse plane (ker alpha when a contact form is given, else the
/// plane normal to u) and projected along u.
Monodromy monodromy(const VectorField& u, const Eigen::Vector3d& x0, double period,
                    const fields::FourierField* alpha = nullptr, double tol = 1e-11);

struct PeriodicOrbitRecord {
  Eigen::Vector3d seed = Eigen::Vector3d::Zero();
  Eigen::Vector3d x = Eigen::Vector3d::Zero();  // point on the orbit, in [0, 2 pi)^3
  double period = 0.0;
  Winding homology{};
  std::vector<Eigen::Vector3d> samples;  // lifted, uniform in time over one period
  Eigen::Matrix3d monodromy = Eigen::Matrix3d::Identity();
  Eigen::Matrix2d transverse = Eigen::Matrix2d::Identity();
  std::array<std::complex<double>, 2> multipliers{};
  OrbitType type = OrbitType::degenerate;
  bool nondegenerate = false;
  std::optional<int> cz_index;
  double return_residual = 0.0;
  double flow_multiplier_error = 0.0;  // |M u - u| / |u|
  double transverse_det = 1.0;
};

struct OrbitOptions {
  double T_max = 50.0;
  int n_seeds = 64;
  double orbit_tol = 1e-8;
  double mult_tol = 1e-4;
  double dedup_tol = 1e-5;
  double flow_tol = 1e-10;
  double min_period = 0.5;
  /// Torus distance below which a pair of trajectory points is a close return,
  /// counted once the trajectory has been 2 close_return away from the start.
  double close_return = 0.1;
  int candidates_per_seed = 4;
  std::uint64_t seed = 1;
  /// Explicit seed points; random ones are drawn when empty.
  std::vector<Eigen::Vector3d> seeds;
  /// Transverse plane and Conley-Zehnder frame.
  std::optional<fields::FourierField> contact_form;
  int sample_count = 256;
  int threads = 0;  // 0: CURLLAB_THREADS or hardware concurrency
};

struct OrbitSearch {
  std::vector<PeriodicOrbitRecord> orbits;
  int candidates = 0;
  std::vector<std::string> unresolved;
};

/// Recurrence scan in the universal cover, Newton shooting on (x, T) with a
/// phase condition, primitive-period reduction, deduplication and
/// classification.
OrbitSearch find_periodic_orbits(const VectorField& u, const OrbitOptions& options = {});

/// Classifies the transverse map. Nondegenerate iff no multiplier is within
/// mult_tol of 1.
OrbitType classify_multipliers(const Eigen::Matrix2d& p, double mult_tol, bool* nondegenerate = nullptr);

// ---------------------------------------------------------------------------
// Conley-Zehnder index

/// Index of a sampled path in Sp(2) starting near the identity, from the
/// winding of an eigenvector (hyperbolic end point) or the rotation angle
/// (elliptic end point).
int conley_zehnder_index(const std::vector<Eigen::Matrix2d>& path);

/// Linearized flow along the orbit restricted to ker alpha in a frame
/// normalized to d alpha(e1, e2) = 1, as a path in Sp(2).
std::vector<Eigen::Matrix2d> transverse_path(const VectorField& u, const PeriodicOrbitRecord& orbit,
                                             const fields::FourierField& alpha, double tol = 1e-11);

/// Conley-Zehnder index of a nondegenerate orbit in the trivialization of
/// ker alpha given by transverse_path.
int conley_zehnder(const VectorField& u, const PeriodicOrbitRecord& orbit, const fields::FourierField& alpha);

}  // namespace curllab::dynamics
