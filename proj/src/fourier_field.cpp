#include "curllab/fourier_field.hpp"

#include "curllab/error.hpp"

#include <algorithm>
#include <cmath>

namespace curllab::fields {

int component_count(Rank rank) { return rank == Rank::scalar ? 1 : 3; }

std::string to_string(Rank rank) {
  switch (rank) {
    case Rank::scalar:
      return "scalar";
    case Rank::one_form:
      return "one_form";
    case Rank::two_form:
      return "two_form";
    case Rank::vector:
      return "vector";
  }
  return "scalar";
}

Rank rank_from_string(const std::string& name) {
  if (name == "scalar") return Rank::scalar;
  if (name == "one_form") return Rank::one_form;
  if (name == "two_form") return Rank::two_form;
  if (name == "vector") return Rank::vector;
  throw UnsupportedRank("unknown field rank '" + name + "'");
}

FourierField::FourierField(Rank rank, int truncation) : rank_(rank), n_(truncation) {
  if (truncation < 0) throw InvalidArgument("truncation must be non-negative");
  const std::size_t s = static_cast<std::size_t>(side_length(n_));
  modes_ = s * s * s;
  coeffs_.assign(modes_ * static_cast<std::size_t>(components()), Complex{});
}

std::size_t FourierField::mode_index(const Wavevector& m) const {
  const std::size_t s = static_cast<std::size_t>(side());
  return (static_cast<std::size_t>(m[0] + n_) * s + static_cast<std::size_t>(m[1] + n_)) * s +
         static_cast<std::size_t>(m[2] + n_);
}

Wavevector FourierField::wavevector(std::size_t mode) const {
  const std::size_t s = static_cast<std::size_t>(side());
  const int k = static_cast<int>(mode % s);
  const int j = static_cast<int>((mode / s) % s);
  const int i = static_cast<int>(mode / (s * s));
  return {i - n_, j - n_, k - n_};
}

static bool inside(const Wavevector& m, int n) {
  return std::abs(m[0]) <= n && std::abs(m[1]) <= n && std::abs(m[2]) <= n;
}

Complex FourierField::coeff(const Wavevector& m, int component) const {
  if (!inside(m, n_)) return {};
  return coeffs_[static_cast<std::size_t>(component) * modes_ + mode_index(m)];
}

void FourierField::set(const Wavevector& m, int component, Complex value) {
  if (!inside(m, n_)) throw InvalidArgument("wavevector outside truncation");
  if (component < 0 || component >= components()) throw InvalidArgument("component out of range");
  coeffs_[static_cast<std::size_t>(component) * modes_ + mode_index(m)] = value;
}

void FourierField::set_real(const Wavevector& m, int component, Complex value) {
  const Wavevector neg{-m[0], -m[1], -m[2]};
  if (m == neg) {
    set(m, component, Complex(value.real(), 0.0));
    return;
  }
  set(m, component, value);
  set(neg, component, std::conj(value));
}

std::span<const Complex> FourierField::component_data(int component) const {
  return std::span<const Complex>(coeffs_).subspan(static_cast<std::size_t>(component) * modes_,
                                                   modes_);
}

std::span<Complex> FourierField::component_data(int component) {
  return std::span<Complex>(coeffs_).subspan(static_cast<std::size_t>(component) * modes_, modes_);
}

Eigen::VectorXd FourierField::eval(const Eigen::Vector3d& x) const {
  const int s = side();
  std::array<std::vector<Complex>, 3> e;
  for (int a = 0; a < 3; ++a) {
    e[a].resize(static_cast<std::size_t>(s));
    for (int m = -n_; m <= n_; ++m) e[a][static_cast<std::size_t>(m + n_)] = std::polar(1.0, m * x[a]);
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(components());
  for (int c = 0; c < components(); ++c) {
    const auto data = component_data(c);
    Complex acc{};
    std::size_t idx = 0;
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) {
        const Complex eij = e[0][static_cast<std::size_t>(i)] * e[1][static_cast<std::size_t>(j)];
        for (int k = 0; k < s; ++k, ++idx) {
          if (data[idx] != Complex{}) acc += data[idx] * eij * e[2][static_cast<std::size_t>(k)];
        }
      }
    }
    out[c] = acc.real();
  }
  return out;
}

double FourierField::eval_scalar(const Eigen::Vector3d& x) const { return eval(x)[0]; }

Eigen::Vector3d FourierField::eval3(const Eigen::Vector3d& x) const {
  if (components() != 3) throw UnsupportedRank("eval3 needs a three-component field");
  return eval(x);
}

double FourierField::hermitian_defect() const {
  double worst = 0.0;
  for (int c = 0; c < components(); ++c) {
    for (std::size_t i = 0; i < modes_; ++i) {
      const Wavevector m = wavevector(i);
      const Complex a = coeff(m, c);
      const Complex b = coeff({-m[0], -m[1], -m[2]}, c);
      worst = std::max(worst, std::abs(a - std::conj(b)));
    }
  }
  return worst;
}

FourierField FourierField::hermitianized() const {
  FourierField out(rank_, n_);
  for (int c = 0; c < components(); ++c) {
    for (std::size_t i = 0; i < modes_; ++i) {
      const Wavevector m = wavevector(i);
      const Complex a = coeff(m, c);
      const Complex b = coeff({-m[0], -m[1], -m[2]}, c);
      out.set(m, c, 0.5 * (a + std::conj(b)));
    }
  }
  return out;
}

FourierField FourierField::retruncated(int truncation) const {
  FourierField out(rank_, truncation);
  const int keep = std::min(truncation, n_);
  for (int c = 0; c < components(); ++c) {
    for (int i = -keep; i <= keep; ++i)
      for (int j = -keep; j <= keep; ++j)
        for (int k = -keep; k <= keep; ++k) out.set({i, j, k}, c, coeff({i, j, k}, c));
  }
  return out;
}

FourierField FourierField::with_rank(Rank rank) const {
  if (component_count(rank) != components())
    throw UnsupportedRank("cannot reinterpret " + to_string(rank_) + " as " + to_string(rank));
  FourierField out = *this;
  out.rank_ = rank;
  return out;
}

double FourierField::coefficient_norm() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s += std::norm(c);
  return std::sqrt(s);
}

double FourierField::max_abs_coeff() const {
  double s = 0.0;
  for (const Complex& c : coeffs_) s = std::max(s, std::abs(c));
  return s;
}

bool FourierField::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](const Complex& c) { return c == Complex{}; });
}

FourierField& FourierField::operator+=(const FourierField& other) {
  if (other.components() != components()) throw UnsupportedRank("rank mismatch in field sum");
  if (other.n_ > n_) *this = retruncated(other.n_);
  for (int c = 0; c < components(); ++c)
    for (std::size_t i = 0; i < other.modes_; ++i) {
      const Wavevector m = other.wavevector(i);
      coeffs_[static_cast<std::size_t>(c) * modes_ + mode_index(m)] += other.coeff(m, c);
    }
  return *this;
}

FourierField& FourierField::operator-=(const FourierField& other) {
  FourierField neg = other;
  neg *= -1.0;
  return *this += neg;
}

FourierField& FourierField::operator*=(double s) {
  for (Complex& c : coeffs_) c *= s;
  return *this;
}

FourierField operator+(FourierField a, const FourierField& b) { return a += b; }
FourierField operator-(FourierField a, const FourierField& b) { return a -= b; }
FourierField operator*(double s, FourierField a) { return a *= s; }

double max_coeff_difference(const FourierField& a, const FourierField& b) {
  if (a.components() != b.components()) throw UnsupportedRank("rank mismatch");
  const int n = std::max(a.truncation(), b.truncation());
  double worst = 0.0;
  for (int c = 0; c < a.components(); ++c)
    for (int i = -n; i <= n; ++i)
      for (int j = -n; j <= n; ++j)
        for (int k = -n; k <= n; ++k)
          worst = std::max(worst, std::abs(a.coeff({i, j, k}, c) - b.coeff({i, j, k}, c)));
  return worst;
}

// ---------------------------------------------------------------------------

static bool in_half_lattice(const Wavevector& m) {
  if (m[0] != 0) return m[0] > 0;
  if (m[1] != 0) return m[1] > 0;
  return m[2] > 0;
}

PointEvaluator::PointEvaluator(const FourierField& field)
    : n_(field.truncation()), components_(field.components()) {
  for (std::size_t i = 0; i < field.mode_count(); ++i) {
    const Wavevector m = field.wavevector(i);
    if (m == Wavevector{0, 0, 0}) {
      for (int c = 0; c < components_; ++c) constant_[static_cast<std::size_t>(c)] = field.coeff(m, c).real();
      continue;
    }
    if (!in_half_lattice(m)) continue;
    Term t{m, {}};
    bool nonzero = false;
    for (int c = 0; c < components_; ++c) {
      t.c[static_cast<std::size_t>(c)] = field.coeff(m, c);
      nonzero = nonzero || t.c[static_cast<std::size_t>(c)] != Complex{};
    }
    if (nonzero) terms_.push_back(t);
  }
}

namespace {

struct AxisTables {
  std::array<std::vector<Complex>, 3> e;  // e[a][m + n] = exp(i m x_a)
  int n;
  AxisTables(const Eigen::Vector3d& x, int n_) : n(n_) {
    for (int a = 0; a < 3; ++a) {
      e[a].resize(static_cast<std::size_t>(2 * n + 1));
      for (int m = 0; m <= n; ++m) {
        const Complex z = std::polar(1.0, m * x[a]);
        e[a][static_cast<std::size_t>(n + m)] = z;
        e[a][static_cast<std::size_t>(n - m)] = std::conj(z);
      }
    }
  }
  Complex phase(const Wavevector& m) const {
    return e[0][static_cast<std::size_t>(m[0] + n)] * e[1][static_cast<std::size_t>(m[1] + n)] *
           e[2][static_cast<std::size_t>(m[2] + n)];
  }
};

}  // namespace

Eigen::Vector3d PointEvaluator::value(const Eigen::Vector3d& x) const {
  const AxisTables tab(x, n_);
  Eigen::Vector3d v(constant_[0], constant_[1], constant_[2]);
  for (const Term& t : terms_) {
    const Complex ph = tab.phase(t.m);
    for (int c = 0; c < components_; ++c) v[c] += 2.0 * (t.c[static_cast<std::size_t>(c)] * ph).real();
  }
  return v;
}

FieldJet PointEvaluator::jet(const Eigen::Vector3d& x, int order) const {
  const AxisTables tab(x, n_);
  FieldJet out;
  out.value = Eigen::Vector3d(constant_[0], constant_[1], constant_[2]);
  for (auto& h : out.hessian) h.setZero();
  for (const Term& t : terms_) {
    const Complex ph = tab.phase(t.m);
    const Eigen::Vector3d m(t.m[0], t.m[1], t.m[2]);
    for (int c = 0; c < components_; ++c) {
      const Complex z = t.c[static_cast<std::size_t>(c)] * ph;
      out.value[c] += 2.0 * z.real();
      // d/dx_k of 2 Re(z) = -2 m_k Im(z); second derivative -2 m_j m_k Re(z).
      out.gradient.row(c) += -2.0 * z.imag() * m.transpose();
      if (order >= 2) out.hessian[static_cast<std::size_t>(c)] += -2.0 * z.real() * (m * m.transpose());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

FourierField tight_one_form(int k, int truncation) {
  if (std::abs(k) > truncation) throw InvalidArgument("truncation too small for sin(kz) dx + cos(kz) dy");
  FourierField f(Rank::one_form, truncation);
  if (k == 0) {
    f.set({0, 0, 0}, 1, 1.0);
    return f;
  }
  f.set_real({0, 0, k}, 0, Complex(0.0, -0.5));
  f.set_real({0, 0, k}, 1, Complex(0.5, 0.0));
  return f;
}

FourierField abc_one_form(double a, double b, double c, int truncation) {
  if (truncation < 1) throw InvalidArgument("ABC field needs truncation >= 1");
  FourierField f(Rank::one_form, truncation);
  const Complex half_i(0.0, -0.5);  // sin t = Im part: coefficient of e^{it} is -i/2
  f.set_real({0, 0, 1}, 0, a * half_i);
  f.set_real({0, 1, 0}, 0, Complex(c / 2.0, 0.0));
  f.set_real({1, 0, 0}, 1, b * half_i);
  f.set_real({0, 0, 1}, 1, Complex(a / 2.0, 0.0));
  f.set_real({0, 1, 0}, 2, c * half_i);
  f.set_real({1, 0, 0}, 2, Complex(b / 2.0, 0.0));
  return f;
}

FourierField constant_field(Rank rank, const Eigen::Vector3d& value, int truncation) {
  FourierField f(rank, truncation);
  for (int c = 0; c < f.components(); ++c) f.set({0, 0, 0}, c, value[c]);
  return f;
}

}  // namespace curllab::fields
