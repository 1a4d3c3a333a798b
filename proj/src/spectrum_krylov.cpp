#include "spectrum_internal.hpp"

#include "curllab/detail/krylov.hpp"
#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace curllab::curlspec::detail {

using fields::Complex;
using fields::Rank;
using fields::Wavevector;

namespace {

Eigen::Matrix3cd curl_symbol(const Wavevector& m) {
  const Complex I(0.0, 1.0);
  Eigen::Matrix3cd s;
  s << 0.0, -I * double(m[2]), I * double(m[1]), I * double(m[2]), 0.0, -I * double(m[0]), -I * double(m[1]),
      I * double(m[0]), 0.0;
  return s;
}

/// Per-mode inverse of |curl - sigma W| for the mean weight W.
class ShiftPreconditioner {
 public:
  ShiftPreconditioner(int truncation, const Eigen::Matrix3d& wbar, double sigma) {
    FourierField shape(Rank::one_form, truncation);
    blocks_.resize(shape.mode_count());
    for (std::size_t m = 0; m < shape.mode_count(); ++m) {
      const Eigen::Matrix3cd h = curl_symbol(shape.wavevector(m)) - sigma * wbar.cast<Complex>();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3cd> es(h);
      const Eigen::Vector3d inv = es.eigenvalues().cwiseAbs().cwiseInverse();
      blocks_[m] = es.eigenvectors() * inv.cast<Complex>().asDiagonal() * es.eigenvectors().adjoint();
    }
  }

  FourierField operator()(const FourierField& r) const {
    FourierField out(r.rank(), r.truncation());
    const std::size_t n = r.mode_count();
    for (std::size_t m = 0; m < n; ++m) {
      const Eigen::Vector3cd v(r.data()[m], r.data()[n + m], r.data()[2 * n + m]);
      const Eigen::Vector3cd z = blocks_[m] * v;
      for (int c = 0; c < 3; ++c) out.data()[static_cast<std::size_t>(c) * n + m] = z[c];
    }
    return out;
  }

 private:
  std::vector<Eigen::Matrix3cd> blocks_;
};

struct ModelSpectrum {
  int count = 0;
  int max_cluster = 0;
};

/// Eigenvalue count and largest cluster of the constant-weight model in a
/// neighbourhood of [lower, upper].
ModelSpectrum model_spectrum(int truncation, const Eigen::Matrix3d& wbar, double lower, double upper) {
  FourierField shape(Rank::one_form, truncation);
  const double pad = 0.2 * (upper - lower);
  std::vector<double> values;
  for (std::size_t m = 0; m < shape.mode_count(); ++m) {
    const Wavevector k = shape.wavevector(m);
    if (k == Wavevector{0, 0, 0}) continue;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::Matrix3cd> es(curl_symbol(k), wbar.cast<Complex>());
    for (int i = 0; i < 3; ++i) {
      const double l = es.eigenvalues()[i];
      if (std::abs(l) > 1e-9 && l >= lower - pad && l <= upper + pad) values.push_back(l);
    }
  }
  std::sort(values.begin(), values.end());
  ModelSpectrum out;
  out.count = static_cast<int>(values.size());
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] - values[i] <= 1e-6 * std::max(1.0, std::abs(values[i]))) ++j;
    out.max_cluster = std::max(out.max_cluster, static_cast<int>(j - i));
    i = j;
  }
  return out;
}

FourierField random_form(int truncation, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierField f(Rank::one_form, truncation);
  for (std::size_t m = 0; m < f.mode_count(); ++m) {
    const Wavevector k = f.wavevector(m);
    const Wavevector mk{-k[0], -k[1], -k[2]};
    if (f.mode_index(mk) < m) continue;
    for (int c = 0; c < 3; ++c) {
      const double re = u(rng);
      const double im = (mk == k) ? 0.0 : u(rng);
      f.set_real(k, c, Complex(re, im));
    }
  }
  return f;
}

}  // namespace

std::vector<RawPair> krylov_interval(const MetricField& g, int truncation, double lower, double upper,
                                     const SpectrumOptions& options) {
  const CurlOperator op(g, truncation);
  const auto& gram = op.gram();
  const double sigma = 0.5 * (lower + upper);
  const ShiftPreconditioner precond(truncation, gram.weight_mean(), sigma);
  auto mass = [&](const FourierField& x) { return gram.apply_one_form(x); };
  auto shifted = [&](const FourierField& x) { return CurlOperator::curl_coefficients(x) - sigma * mass(x); };
  int inner = 0;
  // T = (B - sigma M)^{-1} M on coexact forms; self-adjoint in the M inner
  // product, with the wanted eigenvalues 1 / (lambda - sigma) extremal.
  auto apply_t = [&](const FourierField& x) {
    curllab::detail::KrylovReport rep;
    FourierField y = curllab::detail::minres(shifted, precond, fields::coefficient_dot, mass(x), 1e-11, 5000,
                                             "the shift-invert system", &rep);
    inner += rep.iterations;
    return op.project_coexact(y);
  };

  const ModelSpectrum model = model_spectrum(truncation, gram.weight_mean(), lower, upper);
  const int block = std::max(4, model.max_cluster + 2);
  const int full_dim = 2 * (static_cast<int>(FourierField(Rank::one_form, truncation).mode_count()) - 1);
  const int max_dim = std::min(full_dim, std::max(400, 6 * model.count + 10 * block));
  const double wanted = 2.0 / (upper - lower);  // |theta| of the interval edges

  std::mt19937_64 rng(options.seed);
  std::vector<FourierField> q, mq, tq;
  auto orthonormalize_into = [&](std::vector<FourierField> cand) {
    int added = 0;
    for (auto& v : cand) {
      const double n0 = std::sqrt(std::max(0.0, fields::coefficient_dot(v, mass(v))));
      if (n0 == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (std::size_t j = 0; j < q.size(); ++j) v -= fields::coefficient_dot(mq[j], v) * q[j];
      FourierField mv = mass(v);
      const double n1 = std::sqrt(std::max(0.0, fields::coefficient_dot(v, mv)));
      if (n1 < 1e-8 * n0) continue;
      v *= 1.0 / n1;
      mv *= 1.0 / n1;
      q.push_back(std::move(v));
      mq.push_back(std::move(mv));
      ++added;
    }
    return added;
  };

  std::vector<FourierField> start;
  for (int i = 0; i < block; ++i) start.push_back(op.project_coexact(random_form(truncation, rng)));
  orthonormalize_into(std::move(start));

  int previous_count = -1;
  int stable = 0;
  double worst = 0.0;
  std::size_t done = 0;
  while (true) {
    std::vector<FourierField> next;
    for (; done < q.size(); ++done) {
      tq.push_back(apply_t(q[done]));
      next.push_back(tq.back());
    }
    const int dim = static_cast<int>(q.size());
    Eigen::MatrixXd h(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = i; j < dim; ++j)
        h(i, j) = h(j, i) =
            0.5 * (fields::coefficient_dot(mq[static_cast<std::size_t>(i)], tq[static_cast<std::size_t>(j)]) +
                   fields::coefficient_dot(mq[static_cast<std::size_t>(j)], tq[static_cast<std::size_t>(i)]));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success) throw NonConvergence("Rayleigh-Ritz step failed");

    auto combine = [&](const std::vector<FourierField>& basis, int k) {
      FourierField z(Rank::one_form, truncation);
      for (int i = 0; i < dim; ++i) z += es.eigenvectors()(i, k) * basis[static_cast<std::size_t>(i)];
      return z;
    };

    std::vector<RawPair> inside;
    bool converged = true;
    worst = 0.0;
    for (int k = 0; k < dim; ++k) {
      const double theta = es.eigenvalues()[k];
      if (std::abs(theta) < wanted * (1.0 - 1e-9)) continue;
      const double lambda = sigma + 1.0 / theta;
      if (lambda < lower || lambda > upper) continue;
      const FourierField z = combine(q, k);
      const FourierField r = combine(tq, k) - theta * z;
      const double rt = std::sqrt(std::max(0.0, fields::coefficient_dot(r, mass(r)))) / std::abs(theta);
      worst = std::max(worst, rt);
      if (rt > 1e-10) converged = false;
      inside.push_back({lambda, z});
    }
    const int count = static_cast<int>(inside.size());
    stable = (count == previous_count) ? stable + 1 : 0;
    previous_count = count;
    if (converged && stable >= 1 && dim >= count + 2 * block) {
      bool verified = true;
      for (const auto& p : inside) {
        const double res = residual(g, p.alpha, p.lambda);
        worst = std::max(worst, res);
        if (res > 0.1 * options.tolerance) verified = false;
      }
      if (verified) return inside;
    }
    if (dim >= max_dim || dim >= full_dim) break;
    if (orthonormalize_into(std::move(next)) == 0) {
      std::vector<FourierField> fresh;
      for (int i = 0; i < block; ++i) fresh.push_back(op.project_coexact(random_form(truncation, rng)));
      if (orthonormalize_into(std::move(fresh)) == 0) break;
    }
  }
  std::ostringstream msg;
  msg << "shift-invert Krylov solver did not converge: subspace dimension " << q.size() << ", block size " << block
      << ", " << inner << " inner MINRES iterations, worst residual " << worst;
  throw NonConvergence(msg.str());
}

}  // namespace curllab::curlspec::detail
