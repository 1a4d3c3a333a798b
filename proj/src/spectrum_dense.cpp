#include "spectrum_internal.hpp"

#include "curllab/error.hpp"

#include <cmath>
#include <numbers>

namespace curllab::curlspec::detail {

using fields::Complex;
using fields::Rank;
using fields::Wavevector;

namespace {

bool in_half_lattice(const Wavevector& m) {
  for (int c : m)
    if (c != 0) return c > 0;
  return false;
}

Eigen::Matrix3d adapted_frame(const Wavevector& m) {
  const Eigen::Vector3d k(m[0], m[1], m[2]);
  const Eigen::Vector3d n = k.normalized();
  int axis = 0;
  for (int i = 1; i < 3; ++i)
    if (std::abs(n[i]) < std::abs(n[axis])) axis = i;
  const Eigen::Vector3d e1 = Eigen::Vector3d::Unit(axis).cross(n).normalized();
  const Eigen::Vector3d e2 = n.cross(e1);
  Eigen::Matrix3d f;
  f << e1, e2, n;
  return f;
}

class WeightTable {
 public:
  WeightTable(const fields::GramOperator& gram, int truncation)
      : n_(2 * truncation), coeffs_(gram.weight_coefficients(2 * truncation)) {}

  Eigen::Matrix3cd at(const Wavevector& k) const {
    Eigen::Matrix3cd w;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        w(i, j) = coeffs_[static_cast<std::size_t>(MetricField::packed_index(i, j))].coeff(k, 0);
    return w;
  }

 private:
  int n_;
  std::array<FourierField, 6> coeffs_;
};

}  // namespace

SplitBasis::SplitBasis(int truncation) : n_(truncation) {
  for (int a = -n_; a <= n_; ++a)
    for (int b = -n_; b <= n_; ++b)
      for (int c = -n_; c <= n_; ++c) {
        const Wavevector m{a, b, c};
        if (!in_half_lattice(m)) continue;
        modes_.push_back(m);
        frames_.push_back(adapted_frame(m));
      }
}

FourierField SplitBasis::field(const Eigen::Ref<const Eigen::VectorXd>& v,
                               const Eigen::Ref<const Eigen::VectorXd>& k) const {
  FourierField out(Rank::one_form, n_);
  const double r2 = std::sqrt(0.5);
  for (int a = 0; a < half_modes(); ++a) {
    const Eigen::Matrix3d& f = frame(a);
    const Eigen::Vector3d cosv = f * Eigen::Vector3d(v[4 * a], v[4 * a + 1], k[2 * a]);
    const Eigen::Vector3d sinv = f * Eigen::Vector3d(v[4 * a + 2], v[4 * a + 3], k[2 * a + 1]);
    const Wavevector& m = mode(a);
    for (int c = 0; c < 3; ++c) out.set_real(m, c, r2 * Complex(cosv[c], -sinv[c]));
  }
  const int h = 2 * half_modes();
  for (int c = 0; c < 3; ++c) out.set({0, 0, 0}, c, k[h + c]);
  return out;
}

FourierField DenseSpectrum::field(int j) const {
  FourierField f = basis.field(v_coords.col(j), k_coords.col(j));
  f *= std::pow(2.0 * std::numbers::pi, -1.5);
  return f;
}

DenseSpectrum dense_spectrum(const MetricField& g, int truncation, bool want_vectors) {
  DenseSpectrum out;
  out.basis = SplitBasis(truncation);
  const SplitBasis& basis = out.basis;
  const int nh = basis.half_modes();
  const int nv = basis.v_dim();
  const int nk = basis.k_dim();
  if (nv == 0) {
    out.values.resize(0);
    return out;
  }
  const fields::GramOperator gram(g, truncation);
  const WeightTable w(gram, truncation);

  Eigen::MatrixXd mvv(nv, nv), mvk(nv, nk), mkk(nk, nk);
  // Slot of (trig type t, frame direction i) for half mode a.
  auto place = [&](int a, int t, int i, bool& in_v) {
    in_v = i < 2;
    return in_v ? 4 * a + 2 * t + i : 2 * a + t;
  };
  auto store = [&](int a, int ta, int b, int tb, const Eigen::Matrix3d& blk) {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        bool rv = false, cv = false;
        const int r = place(a, ta, i, rv);
        const int c = place(b, tb, j, cv);
        if (rv && cv)
          mvv(r, c) = blk(i, j);
        else if (rv)
          mvk(r, c) = blk(i, j);
        else if (!cv)
          mkk(r, c) = blk(i, j);
      }
  };

  for (int a = 0; a < nh; ++a) {
    const Wavevector& p = basis.mode(a);
    const Eigen::Matrix3d& ra = basis.frame(a);
    for (int b = 0; b < nh; ++b) {
      const Wavevector& q = basis.mode(b);
      const Eigen::Matrix3d& rb = basis.frame(b);
      const Eigen::Matrix3cd wm = w.at({p[0] - q[0], p[1] - q[1], p[2] - q[2]});
      const Eigen::Matrix3cd wp = w.at({p[0] + q[0], p[1] + q[1], p[2] + q[2]});
      const Eigen::Matrix3d cc = (wm + wp).real();
      const Eigen::Matrix3d ss = (wm - wp).real();
      const Eigen::Matrix3d cs = wm.imag() - wp.imag();
      const Eigen::Matrix3d sc = -wp.imag() - wm.imag();
      store(a, 0, b, 0, ra.transpose() * cc * rb);
      store(a, 1, b, 1, ra.transpose() * ss * rb);
      store(a, 0, b, 1, ra.transpose() * cs * rb);
      store(a, 1, b, 0, ra.transpose() * sc * rb);
    }
    // Coupling with the constants.
    const Eigen::Matrix3cd wq = w.at(p);
    const Eigen::Matrix3d cc = std::sqrt(2.0) * wq.real().transpose() * ra;
    const Eigen::Matrix3d cs = -std::sqrt(2.0) * wq.imag().transpose() * ra;
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        for (int t = 0; t < 2; ++t) {
          const double val = (t == 0 ? cc : cs)(j, i);
          bool in_v = false;
          const int r = place(a, t, i, in_v);
          const int kc = 2 * nh + j;
          if (in_v) {
            mvk(r, kc) = val;
          } else {
            mkk(r, kc) = val;
            mkk(kc, r) = val;
          }
        }
  }
  mkk.bottomRightCorner(3, 3) = w.at({0, 0, 0}).real();

  Eigen::MatrixXd bvv = Eigen::MatrixXd::Zero(nv, nv);
  for (int a = 0; a < nh; ++a) {
    const Wavevector& m = basis.mode(a);
    const double len = std::sqrt(double(m[0] * m[0] + m[1] * m[1] + m[2] * m[2]));
    bvv(4 * a, 4 * a + 3) = bvv(4 * a + 3, 4 * a) = -len;
    bvv(4 * a + 1, 4 * a + 2) = bvv(4 * a + 2, 4 * a + 1) = len;
  }

  const Eigen::LLT<Eigen::MatrixXd> kk(mkk);
  if (kk.info() != Eigen::Success) throw NonConvergence("Gram matrix of the kernel block is not positive definite");
  const Eigen::MatrixXd x = kk.solve(mvk.transpose());
  Eigen::MatrixXd schur = mvv - mvk * x;
  schur = 0.5 * (schur + schur.transpose()).eval();
  const Eigen::LLT<Eigen::MatrixXd> llt(schur);
  if (llt.info() != Eigen::Success) throw NonConvergence("Schur complement of the Gram matrix is not positive definite");
  const auto l = llt.matrixL();
  Eigen::MatrixXd c = l.solve(bvv);
  c = l.solve(c.transpose().eval());
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(c, want_vectors ? Eigen::ComputeEigenvectors
                                                                       : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NonConvergence("dense eigensolver failed (dimension " + std::to_string(nv) + ")");
  out.values = es.eigenvalues();
  if (want_vectors) {
    out.v_coords = llt.matrixU().solve(es.eigenvectors());
    out.k_coords = -x * out.v_coords;
  }
  return out;
}

}  // namespace curllab::curlspec::detail
