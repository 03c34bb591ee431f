#pragma once

#include <span>
#include <vector>

#include "distvar/types.hpp"

namespace distvar {

// Complex polynomial in one variable, ascending coefficients.
class Poly1 {
 public:
  Poly1() = default;
  explicit Poly1(std::vector<Complex> coeffs);

  static Poly1 constant(Complex c);
  static Poly1 monomial(int k, Complex c = 1.0);
  static Poly1 from_roots(const std::vector<Complex>& roots, Complex leading = 1.0);

  const std::vector<Complex>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.empty(); }
  Complex coeff(int k) const;

  Complex operator()(Complex z) const;
  Poly1 derivative() const;
  // Sum of coefficient moduli; bounds |p| on the closed disc.
  double norm1() const;
  // Horner evaluation at a square matrix.
  Matrix apply(const Matrix& t) const;

  friend Poly1 operator+(const Poly1& a, const Poly1& b);
  friend Poly1 operator-(const Poly1& a, const Poly1& b);
  friend Poly1 operator*(const Poly1& a, const Poly1& b);
  friend Poly1 operator*(Complex s, const Poly1& a);

 private:
  std::vector<Complex> coeffs_;  // empty == zero polynomial
};

// Roots via eigenvalues of the balanced companion matrix, with multiplicity.
// Throws ZeroPolynomial.
std::vector<Complex> roots(const Poly1& p);

// Complex polynomial in (z, w); coeffs(i, j) multiplies z^i w^j.
class Poly2 {
 public:
  Poly2();
  explicit Poly2(Matrix coeffs);

  static Poly2 constant(Complex c);
  static Poly2 monomial(int i, int j, Complex c = 1.0);
  static Poly2 z();
  static Poly2 w();
  static Poly2 from_z(const Poly1& p);
  static Poly2 from_w(const Poly1& p);

  const Matrix& coeffs() const { return coeffs_; }
  int degz() const { return static_cast<int>(coeffs_.rows()) - 1; }
  int degw() const { return static_cast<int>(coeffs_.cols()) - 1; }
  bool is_zero() const;
  Complex coeff(int i, int j) const;

  Complex operator()(Complex z, Complex w) const;
  Poly2 dz() const;
  Poly2 dw() const;
  double norm1() const;
  double max_coeff() const;
  // Divided by the coefficient of largest modulus.
  Poly2 normalized() const;
  // Drops trailing rows/columns whose entries are all below rel * max_coeff.
  Poly2 trimmed(double rel) const;

  friend Poly2 operator+(const Poly2& a, const Poly2& b);
  friend Poly2 operator-(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(const Poly2& a, const Poly2& b);
  friend Poly2 operator*(Complex s, const Poly2& a);

 private:
  Matrix coeffs_;
};

Complex eval2(const Poly2& p, Complex z, Complex w);

// Max coefficient distance between unit-normalized forms of a and b, using the
// phase that best aligns them.
double unit_distance(const Poly2& a, const Poly2& b);
bool equal_up_to_unit(const Poly2& a, const Poly2& b, double rtol = 1e-8);

struct TensorFit {
  Poly2 poly;
  double residual = 0.0;  // max relative misfit on the grid
};

// Interpolates values(i, j) = q(z_nodes[i], w_nodes[j]) by q of bidegree
// (z_nodes.size()-1, w_nodes.size()-1). Throws SingularInterpolation.
TensorFit fit_tensor_grid(std::span<const Complex> z_nodes, std::span<const Complex> w_nodes,
                          const Matrix& values);

// Roots of unity scaled by 0.9 (z) and half-step rotated unit roots (w).
std::vector<Complex> interpolation_nodes_z(int count);
std::vector<Complex> interpolation_nodes_w(int count);

struct BlaschkeZero {
  Complex point;
  int multiplicity = 1;
};

// c * prod (a - z) / (1 - conj(a) z) over zeros with multiplicity.
class BlaschkeProduct {
 public:
  BlaschkeProduct() = default;
  explicit BlaschkeProduct(std::vector<BlaschkeZero> zeros, Complex unimodular = 1.0);

  // Groups exactly equal roots.
  static BlaschkeProduct from_roots(const std::vector<Complex>& roots, Complex unimodular = 1.0);

  const std::vector<BlaschkeZero>& zeros() const { return zeros_; }
  Complex unimodular() const { return unimodular_; }
  int degree() const;
  std::vector<Complex> roots_with_multiplicity() const;
  std::vector<Complex> distinct_roots() const;
  // prod (z - a)^m, the polynomial generating the same ideal in H^infty.
  Poly1 monic_numerator() const;
  double max_zero_modulus() const;

 private:
  std::vector<BlaschkeZero> zeros_;
  Complex unimodular_ = 1.0;
};

// Throws PoleHit when 1 - conj(a) z vanishes.
Complex blaschke_eval(const BlaschkeProduct& b, Complex z);
// b(T) = c prod (aI - T)(I - conj(a) T)^{-1}; requires rho(T) < 1 / max|a|.
Matrix blaschke_apply(const BlaschkeProduct& b, const Matrix& t);
bool has_simple_roots(const BlaschkeProduct& b, double sep);

}  // namespace distvar
