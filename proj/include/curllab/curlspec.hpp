#pragma once

// The curl operator *d on coexact 1-forms and its spectrum.
//
// The operator is discretized by Galerkin projection in the metric inner
// product: for 1-forms of truncation N, A alpha is the unique truncation-N
// form with <A alpha, beta>_g = int (d alpha) ^ beta for every beta. The
// right-hand side does not depend on g and is symmetric in (alpha, beta), so A
// is self-adjoint in <.,.>_g to round-off for every metric. For constant
// metrics A coincides with the pointwise *d.

#include "curllab/fields.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace curllab::curlspec {

using fields::FourierField;
using fields::MetricField;

class CurlOperator {
 public:
  CurlOperator(const MetricField& g, int truncation);

  const MetricField& metric() const { return gram_.metric(); }
  int truncation() const { return gram_.truncation(); }
  const fields::GramOperator& gram() const { return gram_; }

  /// *d alpha in the Galerkin sense (see file comment).
  FourierField apply(const FourierField& alpha) const;

  /// Metric-independent right-hand side: coefficients of the flat curl of
  /// alpha, read as a 1-form.
  static FourierField curl_coefficients(const FourierField& alpha);

  /// Removes the exact and harmonic parts of alpha by orthogonal projection
  /// in <.,.>_g.
  FourierField project_coexact(const FourierField& alpha) const;

 private:
  fields::GramOperator gram_;
};

CurlOperator assemble(const MetricField& g, int truncation);
FourierField coexact_project(const MetricField& g, const FourierField& alpha);

/// ||*d alpha - lambda alpha||_2 / ||alpha||_2.
double residual(const MetricField& g, const FourierField& alpha, double lambda);

/// Eigenvalue window: the `count` eigenvalues of smallest modulus, or every
/// eigenvalue in [lower, upper].
struct Window {
  enum class Kind { count, interval };
  Kind kind = Kind::count;
  int count = 0;
  double lower = 0.0;
  double upper = 0.0;

  static Window smallest(int count);
  static Window interval(double lower, double upper);
  std::string describe() const;
};

struct EigenPair {
  double lambda = 0.0;
  FourierField alpha;
  double residual = 0.0;
  /// Residual bound the pair was accepted with.
  double tolerance = 0.0;
  /// ||delta alpha||_2.
  double codifferential_residual = 0.0;
  /// Position in the returned list.
  int index = 0;
  /// Size of the cluster containing lambda (1 for a simple eigenvalue).
  int multiplicity = 1;
  /// Distance to the nearest other computed eigenvalue.
  double gap = 0.0;
};

enum class SolverKind { automatic, dense, krylov };

struct SpectrumOptions {
  SolverKind solver = SolverKind::automatic;
  /// Largest truncation handled by the dense solver in automatic mode.
  int dense_max_truncation = 5;
  /// Clusters are eigenvalues closer than gap_rel * max|lambda|.
  double gap_rel = 1e-6;
  /// Accepted residual bound.
  double tolerance = 1e-8;
  /// Krylov controls.
  int max_iterations = 60;
  unsigned seed = 1;
};

/// Eigenpairs of *d in the window, sorted by |lambda| with positive
/// eigenvalues first on ties. Every alpha has unit norm, is coexact and has a
/// fixed sign: its first largest-modulus coefficient has positive real part.
std::vector<EigenPair> eigenpairs(const MetricField& g, int truncation, const Window& window,
                                  const SpectrumOptions& options = {});

/// All eigenvalues of the discretized operator, ascending (dense path).
std::vector<double> full_spectrum(const MetricField& g, int truncation);

struct TrackPoint {
  double s = 0.0;
  double lambda = 0.0;
  double gap = 0.0;
};

struct TrackResult {
  std::vector<TrackPoint> points;
  double min_gap = 0.0;
  EigenPair final_pair;
};

struct TrackOptions {
  /// Step halvings allowed before a crossing is declared unresolved.
  int max_refinements = 6;
  /// Minimum normalized overlap for a match.
  double min_overlap = 0.8;
  /// Maximum normalized overlap with any other candidate.
  double max_rival_overlap = 0.6;
};

/// Follows pair0 along the metric path s -> path(s), s in [0, 1], with
/// `steps` uniform steps refined by halving when the match is ambiguous.
/// Throws BranchAmbiguity with the offending s when a crossing cannot be
/// resolved.
TrackResult track_eigenvalue(const std::function<MetricField(double)>& path, const EigenPair& pair0, int steps,
                             const TrackOptions& options = {});

}  // namespace curllab::curlspec
