#include "distvar/poly.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "distvar/linalg.hpp"

namespace distvar {

namespace {

void trim_exact(std::vector<Complex>& c) {
  while (!c.empty() && c.back() == Complex(0.0)) c.pop_back();
}

}  // namespace

Poly1::Poly1(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim_exact(coeffs_); }

Poly1 Poly1::constant(Complex c) { return Poly1({c}); }

Poly1 Poly1::monomial(int k, Complex c) {
  std::vector<Complex> v(k + 1, 0.0);
  v[k] = c;
  return Poly1(std::move(v));
}

Poly1 Poly1::from_roots(const std::vector<Complex>& rs, Complex leading) {
  std::vector<Complex> c{leading};
  for (const auto& r : rs) {
    std::vector<Complex> next(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  return Poly1(std::move(c));
}

Complex Poly1::coeff(int k) const {
  return (k >= 0 && k < static_cast<int>(coeffs_.size())) ? coeffs_[k] : Complex(0.0);
}

Complex Poly1::operator()(Complex z) const {
  Complex acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Poly1 Poly1::derivative() const {
  if (coeffs_.size() <= 1) return Poly1();
  std::vector<Complex> d(coeffs_.size() - 1);
  for (size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Poly1(std::move(d));
}

double Poly1::norm1() const {
  double s = 0.0;
  for (const auto& c : coeffs_) s += std::abs(c);
  return s;
}

Matrix Poly1::apply(const Matrix& t) const {
  const auto n = t.rows();
  Matrix acc = Matrix::Zero(n, n);
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc = acc * t;
    acc.diagonal().array() += *it;
  }
  return acc;
}

Poly1 operator+(const Poly1& a, const Poly1& b) {
  std::vector<Complex> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
  for (size_t k = 0; k < a.coeffs_.size(); ++k) c[k] += a.coeffs_[k];
  for (size_t k = 0; k < b.coeffs_.size(); ++k) c[k] += b.coeffs_[k];
  return Poly1(std::move(c));
}

Poly1 operator-(const Poly1& a, const Poly1& b) { return a + Complex(-1.0) * b; }

Poly1 operator*(const Poly1& a, const Poly1& b) {
  if (a.is_zero() || b.is_zero()) return Poly1();
  std::vector<Complex> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i)
    for (size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  return Poly1(std::move(c));
}

Poly1 operator*(Complex s, const Poly1& a) {
  std::vector<Complex> c = a.coeffs_;
  for (auto& x : c) x *= s;
  return Poly1(std::move(c));
}

namespace {

// Radix-2 diagonal similarity balancing (Parlett-Reinsch), in place.
void balance(Matrix& a) {
  const auto n = a.rows();
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double c = 0.0, r = 0.0;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        c += std::abs(a(j, i));
        r += std::abs(a(i, j));
      }
      if (c == 0.0 || r == 0.0) continue;
      const double s = c + r;
      double f = 1.0;
      while (c < r / 2.0) {
        c *= 2.0;
        r /= 2.0;
        f *= 2.0;
      }
      while (c >= r * 2.0) {
        c /= 2.0;
        r *= 2.0;
        f /= 2.0;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        a.row(i) /= f;
        a.col(i) *= f;
      }
    }
  }
}

}  // namespace

std::vector<Complex> roots(const Poly1& p) {
  if (p.is_zero()) throw Error(ErrorCode::ZeroPolynomial, "roots of the zero polynomial");
  const int n = p.degree();
  if (n == 0) return {};
  const Complex lead = p.coeffs().back();
  Matrix comp = Matrix::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -p.coeffs()[i] / lead;
  balance(comp);
  return eigenvalues(comp);
}

Poly2::Poly2() : coeffs_(Matrix::Zero(1, 1)) {}

Poly2::Poly2(Matrix coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.size() == 0) coeffs_ = Matrix::Zero(1, 1);
  auto rows = coeffs_.rows();
  auto cols = coeffs_.cols();
  while (rows > 1 && coeffs_.row(rows - 1).leftCols(cols).isZero(0.0)) --rows;
  while (cols > 1 && coeffs_.col(cols - 1).topRows(rows).isZero(0.0)) --cols;
  coeffs_ = coeffs_.topLeftCorner(rows, cols).eval();
}

Poly2 Poly2::constant(Complex c) {
  Matrix m(1, 1);
  m(0, 0) = c;
  return Poly2(m);
}

Poly2 Poly2::monomial(int i, int j, Complex c) {
  Matrix m = Matrix::Zero(i + 1, j + 1);
  m(i, j) = c;
  return Poly2(m);
}

Poly2 Poly2::z() { return monomial(1, 0); }
Poly2 Poly2::w() { return monomial(0, 1); }

Poly2 Poly2::from_z(const Poly1& p) {
  if (p.is_zero()) return Poly2();
  Matrix m(p.degree() + 1, 1);
  for (int i = 0; i <= p.degree(); ++i) m(i, 0) = p.coeffs()[i];
  return Poly2(m);
}

Poly2 Poly2::from_w(const Poly1& p) {
  if (p.is_zero()) return Poly2();
  Matrix m(1, p.degree() + 1);
  for (int j = 0; j <= p.degree(); ++j) m(0, j) = p.coeffs()[j];
  return Poly2(m);
}

bool Poly2::is_zero() const { return coeffs_.isZero(0.0); }

Complex Poly2::coeff(int i, int j) const {
  if (i < 0 || j < 0 || i > degz() || j > degw()) return 0.0;
  return coeffs_(i, j);
}

Complex eval2(const Poly2& p, Complex z, Complex w) {
  const Matrix& c = p.coeffs();
  Complex acc = 0.0;
  for (auto i = c.rows() - 1; i >= 0; --i) {
    Complex row = 0.0;
    for (auto j = c.cols() - 1; j >= 0; --j) row = row * w + c(i, j);
    acc = acc * z + row;
  }
  return acc;
}

Complex Poly2::operator()(Complex z, Complex w) const { return eval2(*this, z, w); }

Poly2 Poly2::dz() const {
  if (degz() == 0) return Poly2();
  Matrix m(degz(), coeffs_.cols());
  for (int i = 1; i <= degz(); ++i) m.row(i - 1) = static_cast<double>(i) * coeffs_.row(i);
  return Poly2(m);
}

Poly2 Poly2::dw() const {
  if (degw() == 0) return Poly2();
  Matrix m(coeffs_.rows(), degw());
  for (int j = 1; j <= degw(); ++j) m.col(j - 1) = static_cast<double>(j) * coeffs_.col(j);
  return Poly2(m);
}

double Poly2::norm1() const { return coeffs_.cwiseAbs().sum(); }

double Poly2::max_coeff() const { return coeffs_.cwiseAbs().maxCoeff(); }

Poly2 Poly2::normalized() const {
  Eigen::Index bi = 0, bj = 0;
  coeffs_.cwiseAbs().maxCoeff(&bi, &bj);
  const Complex pivot = coeffs_(bi, bj);
  if (pivot == Complex(0.0)) return *this;
  return Poly2(coeffs_ / pivot);
}

Poly2 Poly2::trimmed(double rel) const {
  const double thr = rel * max_coeff();
  auto rows = coeffs_.rows();
  auto cols = coeffs_.cols();
  while (rows > 1 && coeffs_.row(rows - 1).leftCols(cols).cwiseAbs().maxCoeff() <= thr) --rows;
  while (cols > 1 && coeffs_.col(cols - 1).topRows(rows).cwiseAbs().maxCoeff() <= thr) --cols;
  return Poly2(coeffs_.topLeftCorner(rows, cols).eval());
}

namespace {

Matrix padded(const Matrix& m, Eigen::Index rows, Eigen::Index cols) {
  Matrix out = Matrix::Zero(rows, cols);
  out.topLeftCorner(m.rows(), m.cols()) = m;
  return out;
}

}  // namespace

Poly2 operator+(const Poly2& a, const Poly2& b) {
  const auto r = std::max(a.coeffs_.rows(), b.coeffs_.rows());
  const auto c = std::max(a.coeffs_.cols(), b.coeffs_.cols());
  return Poly2(padded(a.coeffs_, r, c) + padded(b.coeffs_, r, c));
}

Poly2 operator-(const Poly2& a, const Poly2& b) { return a + Complex(-1.0) * b; }

Poly2 operator*(const Poly2& a, const Poly2& b) {
  Matrix m = Matrix::Zero(a.coeffs_.rows() + b.coeffs_.rows() - 1, a.coeffs_.cols() + b.coeffs_.cols() - 1);
  for (Eigen::Index i = 0; i < a.coeffs_.rows(); ++i)
    for (Eigen::Index j = 0; j < a.coeffs_.cols(); ++j) {
      const Complex c = a.coeffs_(i, j);
      if (c == Complex(0.0)) continue;
      m.block(i, j, b.coeffs_.rows(), b.coeffs_.cols()) += c * b.coeffs_;
    }
  return Poly2(m);
}

Poly2 operator*(Complex s, const Poly2& a) { return Poly2(s * a.coeffs_); }

double unit_distance(const Poly2& a, const Poly2& b) {
  const Poly2 na = a.normalized();
  const Poly2 nb = b.normalized();
  const auto r = std::max(na.coeffs().rows(), nb.coeffs().rows());
  const auto c = std::max(na.coeffs().cols(), nb.coeffs().cols());
  Matrix ma = padded(na.coeffs(), r, c);
  Matrix mb = padded(nb.coeffs(), r, c);
  // Both pivots are 1 in their own normalization; if the pivots sit at different
  // monomials, align with the least-squares phase before comparing.
  const Complex inner = (mb.adjoint() * ma).trace();
  const double nrm = mb.squaredNorm();
  Complex phase = 1.0;
  if (nrm > 0.0 && std::abs(inner) > 0.0) phase = inner / std::abs(inner);
  return (ma - phase * mb).cwiseAbs().maxCoeff();
}

bool equal_up_to_unit(const Poly2& a, const Poly2& b, double rtol) { return unit_distance(a, b) <= rtol; }

namespace {

Matrix vandermonde(std::span<const Complex> nodes) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Matrix v(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Complex p = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      v(i, k) = p;
      p *= nodes[i];
    }
  }
  return v;
}

void require_distinct(std::span<const Complex> nodes, const char* what) {
  double scale = 1.0;
  for (const auto& x : nodes) scale = std::max(scale, std::abs(x));
  for (size_t i = 0; i < nodes.size(); ++i)
    for (size_t j = i + 1; j < nodes.size(); ++j)
      if (std::abs(nodes[i] - nodes[j]) <= 1e-14 * scale)
        throw Error(ErrorCode::SingularInterpolation, std::string("coincident ") + what + " nodes");
}

}  // namespace

TensorFit fit_tensor_grid(std::span<const Complex> z_nodes, std::span<const Complex> w_nodes,
                          const Matrix& values) {
  if (z_nodes.empty() || w_nodes.empty())
    throw Error(ErrorCode::SingularInterpolation, "empty node set");
  if (values.rows() != static_cast<Eigen::Index>(z_nodes.size()) ||
      values.cols() != static_cast<Eigen::Index>(w_nodes.size()))
    throw Error(ErrorCode::InvalidInput, "value grid does not match node counts");
  require_distinct(z_nodes, "z");
  require_distinct(w_nodes, "w");
  const Matrix vz = vandermonde(z_nodes);
  const Matrix vw = vandermonde(w_nodes);
  const Matrix step = vz.colPivHouseholderQr().solve(values);
  const Matrix coeffs = vw.colPivHouseholderQr().solve(step.transpose()).transpose();

  TensorFit out{Poly2(coeffs), 0.0};
  const double scale = std::max(values.cwiseAbs().maxCoeff(), 1e-300);
  const Matrix recon = vz * coeffs * vw.transpose();
  out.residual = (recon - values).cwiseAbs().maxCoeff() / scale;
  return out;
}

std::vector<Complex> interpolation_nodes_z(int count) {
  std::vector<Complex> out(count);
  for (int k = 0; k < count; ++k) out[k] = 0.9 * std::polar(1.0, 2.0 * std::numbers::pi * k / count);
  return out;
}

std::vector<Complex> interpolation_nodes_w(int count) {
  std::vector<Complex> out(count);
  for (int k = 0; k < count; ++k) out[k] = std::polar(1.0, 2.0 * std::numbers::pi * (k + 0.5) / count);
  return out;
}

BlaschkeProduct::BlaschkeProduct(std::vector<BlaschkeZero> zeros, Complex unimodular)
    : zeros_(std::move(zeros)), unimodular_(unimodular) {
  for (const auto& z : zeros_) {
    if (!(std::abs(z.point) < 1.0))
      throw Error(ErrorCode::InvalidInput, "Blaschke zero outside the open disc");
    if (z.multiplicity < 1) throw Error(ErrorCode::InvalidInput, "Blaschke multiplicity must be >= 1");
  }
  if (std::abs(std::abs(unimodular_) - 1.0) > 1e-12)
    throw Error(ErrorCode::InvalidInput, "Blaschke constant must be unimodular");
}

BlaschkeProduct BlaschkeProduct::from_roots(const std::vector<Complex>& rs, Complex unimodular) {
  std::vector<BlaschkeZero> zs;
  for (const auto& r : rs) {
    auto it = std::find_if(zs.begin(), zs.end(), [&](const BlaschkeZero& z) { return z.point == r; });
    if (it == zs.end())
      zs.push_back({r, 1});
    else
      ++it->multiplicity;
  }
  return BlaschkeProduct(std::move(zs), unimodular);
}

int BlaschkeProduct::degree() const {
  int d = 0;
  for (const auto& z : zeros_) d += z.multiplicity;
  return d;
}

std::vector<Complex> BlaschkeProduct::roots_with_multiplicity() const {
  std::vector<Complex> out;
  for (const auto& z : zeros_)
    for (int k = 0; k < z.multiplicity; ++k) out.push_back(z.point);
  return out;
}

std::vector<Complex> BlaschkeProduct::distinct_roots() const {
  std::vector<Complex> out;
  for (const auto& z : zeros_) out.push_back(z.point);
  return out;
}

Poly1 BlaschkeProduct::monic_numerator() const { return Poly1::from_roots(roots_with_multiplicity()); }

double BlaschkeProduct::max_zero_modulus() const {
  double r = 0.0;
  for (const auto& z : zeros_) r = std::max(r, std::abs(z.point));
  return r;
}

Complex blaschke_eval(const BlaschkeProduct& b, Complex z) {
  Complex acc = b.unimodular();
  for (const auto& zero : b.zeros()) {
    const Complex den = 1.0 - std::conj(zero.point) * z;
    if (std::abs(den) <= 1e-14) throw Error(ErrorCode::PoleHit, "evaluation at a pole of the Blaschke product");
    const Complex f = (zero.point - z) / den;
    for (int k = 0; k < zero.multiplicity; ++k) acc *= f;
  }
  return acc;
}

Matrix blaschke_apply(const BlaschkeProduct& b, const Matrix& t) {
  const auto n = t.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix acc = b.unimodular() * id;
  for (const auto& zero : b.zeros()) {
    const Matrix num = zero.point * id - t;
    const Matrix den = id - std::conj(zero.point) * t;
    const Matrix f = den.partialPivLu().solve(num);
    for (int k = 0; k < zero.multiplicity; ++k) acc = acc * f;
  }
  return acc;
}

bool has_simple_roots(const BlaschkeProduct& b, double sep) {
  const auto& zs = b.zeros();
  for (const auto& z : zs)
    if (z.multiplicity != 1) return false;
  for (size_t i = 0; i < zs.size(); ++i)
    for (size_t j = i + 1; j < zs.size(); ++j)
      if (std::abs(zs[i].point - zs[j].point) <= sep) return false;
  return true;
}

}  // namespace distvar
