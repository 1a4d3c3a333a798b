#include "curllab/curlspec.hpp"
#include "curllab/detail/krylov.hpp"
#include "curllab/error.hpp"

#include <cmath>

namespace curllab::curlspec {

using fields::Complex;
using fields::Rank;

namespace {

// Coordinates of the exact-plus-harmonic subspace: alpha = d phi + h.
struct KernelVec {
  FourierField phi;
  Eigen::Vector3d h = Eigen::Vector3d::Zero();
};

KernelVec operator+(KernelVec a, const KernelVec& b) {
  a.phi += b.phi;
  a.h += b.h;
  return a;
}
KernelVec operator-(KernelVec a, const KernelVec& b) {
  a.phi -= b.phi;
  a.h -= b.h;
  return a;
}
KernelVec operator*(double s, KernelVec a) {
  a.phi *= s;
  a.h *= s;
  return a;
}

double kernel_dot(const KernelVec& a, const KernelVec& b) { return fields::coefficient_dot(a.phi, b.phi) + a.h.dot(b.h); }

FourierField embed(const KernelVec& k) {
  FourierField out = fields::exterior_d(k.phi);
  const std::size_t zero = out.mode_index({0, 0, 0});
  for (int c = 0; c < 3; ++c) out.component_data(c)[zero] += k.h[c];
  return out;
}

// Adjoint of embed in the coefficient inner product.
KernelVec restrict_to_kernel(const FourierField& beta) {
  KernelVec k;
  k.phi = FourierField(Rank::scalar, beta.truncation());
  const Complex I(0.0, 1.0);
  for (std::size_t m = 0; m < beta.mode_count(); ++m) {
    const auto w = beta.wavevector(m);
    Complex s{};
    for (int c = 0; c < 3; ++c) s += -I * double(w[static_cast<std::size_t>(c)]) * beta.component_data(c)[m];
    k.phi.data()[m] = s;
  }
  const std::size_t zero = beta.mode_index({0, 0, 0});
  k.phi.data()[zero] = 0.0;
  for (int c = 0; c < 3; ++c) k.h[c] = beta.component_data(c)[zero].real();
  return k;
}

}  // namespace

CurlOperator::CurlOperator(const MetricField& g, int truncation) : gram_(g, truncation) {
  if (truncation < 0) throw InvalidArgument("truncation must be non-negative");
}

FourierField CurlOperator::curl_coefficients(const FourierField& alpha) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("curl operator acts on one_forms");
  return fields::exterior_d(alpha).with_rank(Rank::one_form);
}

FourierField CurlOperator::apply(const FourierField& alpha) const {
  const FourierField rhs = curl_coefficients(alpha.retruncated(truncation()));
  return gram_.solve_one_form(rhs);
}

FourierField CurlOperator::project_coexact(const FourierField& alpha) const {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("coexact projection acts on one_forms");
  const FourierField a = alpha.retruncated(truncation());
  const Eigen::Matrix3d wbar = gram_.weight_mean();
  const Eigen::Matrix3d wbar_inv = wbar.inverse();

  auto normal = [this](const KernelVec& k) { return restrict_to_kernel(gram_.apply_one_form(embed(k))); };
  auto precond = [&](const KernelVec& k) {
    KernelVec out;
    out.phi = k.phi;
    for (std::size_t m = 0; m < out.phi.mode_count(); ++m) {
      const auto w = out.phi.wavevector(m);
      const Eigen::Vector3d v(w[0], w[1], w[2]);
      const double d = v.dot(wbar * v);
      out.phi.data()[m] = d > 0.0 ? out.phi.data()[m] / d : Complex{};
    }
    out.h = wbar_inv * k.h;
    return out;
  };
  const KernelVec rhs = restrict_to_kernel(gram_.apply_one_form(a));
  KernelVec x0;
  x0.phi = FourierField(Rank::scalar, truncation());
  const KernelVec k = detail::pcg(normal, precond, kernel_dot, rhs, x0, 1e-14, 2000, "the coexact projection");
  FourierField out = a - embed(k);
  return out.hermitianized();
}

CurlOperator assemble(const MetricField& g, int truncation) { return CurlOperator(g, truncation); }

FourierField coexact_project(const MetricField& g, const FourierField& alpha) {
  return CurlOperator(g, alpha.truncation()).project_coexact(alpha);
}

double residual(const MetricField& g, const FourierField& alpha, double lambda) {
  if (alpha.rank() != Rank::one_form) throw UnsupportedRank("residual expects a one_form");
  const double norm = fields::l2_norm(g, alpha);
  if (!(norm > 0.0)) throw InvalidArgument("residual of the zero form is undefined");
  const CurlOperator op(g, alpha.truncation());
  FourierField r = op.apply(alpha);
  r -= lambda * alpha;
  return fields::l2_norm(g, r) / norm;
}

}  // namespace curllab::curlspec
