#include "distvar/inner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "distvar/linalg.hpp"

namespace distvar {

namespace {

using Series = std::vector<Matrix>;

Series series_mul(const Series& x, const Series& y, int order) {
  const auto d = x.front().rows();
  Series out(order + 1, Matrix::Zero(d, y.front().cols()));
  for (int i = 0; i <= order && i < static_cast<int>(x.size()); ++i)
    for (int j = 0; i + j <= order && j < static_cast<int>(y.size()); ++j) out[i + j] += x[i] * y[j];
  return out;
}

// Taylor coefficients of b_a(z) = (a - z)/(1 - conj(a) z) at lambda.
std::vector<Complex> blaschke_factor_taylor(Complex a, Complex lambda, int order) {
  const Complex ab = std::conj(a);
  const Complex u = 1.0 - ab * lambda;
  std::vector<Complex> s(order + 1);
  Complex pw = 1.0 / u;
  for (int k = 0; k <= order; ++k) {
    s[k] = pw;
    pw *= ab / u;
  }
  std::vector<Complex> out(order + 1);
  for (int k = 0; k <= order; ++k) out[k] = (a - lambda) * s[k] - (k > 0 ? s[k - 1] : Complex(0.0));
  return out;
}

// Taylor coefficients of a polynomial at lambda (shifted coefficients).
std::vector<Complex> poly_taylor(const Poly1& p, Complex lambda, int order) {
  std::vector<Complex> out(order + 1, 0.0);
  Poly1 q = p;
  double fact = 1.0;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) fact *= k;
    out[k] = q(lambda) / fact;
    q = q.derivative();
  }
  return out;
}

int projection_rank(const Matrix& p) {
  return static_cast<int>(std::lround(p.trace().real()));
}

}  // namespace

const char* MatrixInnerFunction::kind() const {
  switch (rep_.index()) {
    case 0: return "colligation";
    case 1: return "bp_product";
    default: return "polynomial_matrix";
  }
}

Matrix MatrixInnerFunction::eval(Complex lambda) const {
  if (std::abs(lambda) > 1.0 + 1e-8) throw Error(ErrorCode::InvalidInput, "evaluation point outside the closed disc");
  const auto d = dimension_;
  if (const auto* col = std::get_if<Colligation>(&rep_)) {
    const auto n = col->a.rows();
    if (n == 0) return col->d;
    Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - lambda * col->a);
    if (!lu.isInvertible()) throw Error(ErrorCode::ResolventSingular, "I - lambda A is singular");
    return col->d + lambda * col->c * lu.solve(col->b);
  }
  if (const auto* bp = std::get_if<BPProduct>(&rep_)) {
    Matrix acc = bp->leading;
    const Matrix id = Matrix::Identity(d, d);
    for (const auto& f : bp->factors) {
      const Complex den = 1.0 - std::conj(f.zero) * lambda;
      if (std::abs(den) < 1e-14) throw Error(ErrorCode::ResolventSingular, "evaluation at a factor pole");
      const Complex b = (f.zero - lambda) / den;
      acc = acc * f.unitary * ((id - f.projection) + b * f.projection);
    }
    return acc;
  }
  const auto& pm = std::get<PolynomialMatrix>(rep_);
  Matrix out(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out(i, j) = pm.entries[i][j](lambda);
  return out;
}

std::vector<Matrix> MatrixInnerFunction::taylor(Complex lambda, int order) const {
  const auto d = dimension_;
  if (const auto* col = std::get_if<Colligation>(&rep_)) {
    const auto n = col->a.rows();
    std::vector<Matrix> out(order + 1, Matrix::Zero(d, d));
    if (n == 0) {
      out[0] = col->d;
      return out;
    }
    Eigen::FullPivLU<Matrix> lu(Matrix::Identity(n, n) - lambda * col->a);
    if (!lu.isInvertible()) throw Error(ErrorCode::ResolventSingular, "I - lambda A is singular");
    const Matrix rb = lu.solve(col->b);      // R B
    const Matrix ar = lu.solve(col->a);      // R A = A R
    out[0] = col->d + lambda * col->c * rb;
    // c_k = C Y^{k-1} (lambda Y + I) R B with Y = A R.
    Matrix ypow = Matrix::Identity(n, n);
    const Matrix tail = lambda * ar * rb + rb;
    for (int k = 1; k <= order; ++k) {
      out[k] = col->c * ypow * tail;
      ypow = ypow * ar;
    }
    return out;
  }
  if (const auto* bp = std::get_if<BPProduct>(&rep_)) {
    Series acc(order + 1, Matrix::Zero(d, d));
    acc[0] = bp->leading;
    const Matrix id = Matrix::Identity(d, d);
    for (const auto& f : bp->factors) {
      const auto bt = blaschke_factor_taylor(f.zero, lambda, order);
      Series fs(order + 1);
      fs[0] = f.unitary * ((id - f.projection) + bt[0] * f.projection);
      for (int k = 1; k <= order; ++k) fs[k] = bt[k] * (f.unitary * f.projection);
      acc = series_mul(acc, fs, order);
    }
    return acc;
  }
  const auto& pm = std::get<PolynomialMatrix>(rep_);
  std::vector<Matrix> out(order + 1, Matrix::Zero(d, d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const auto t = poly_taylor(pm.entries[i][j], lambda, order);
      for (int k = 0; k <= order; ++k) out[k](i, j) = t[k];
    }
  return out;
}

double MatrixInnerFunction::pole_radius() const {
  if (const auto* col = std::get_if<Colligation>(&rep_)) return spectral_radius(col->a);
  if (const auto* bp = std::get_if<BPProduct>(&rep_)) {
    double r = 0.0;
    for (const auto& f : bp->factors) r = std::max(r, std::abs(f.zero));
    return r;
  }
  return 0.0;
}

MatrixInnerFunction from_colligation(const Matrix& a, const Matrix& b, const Matrix& c, const Matrix& d,
                                     const Tolerances& tol) {
  const auto n = a.rows();
  const auto m = d.rows();
  if (a.cols() != n || b.rows() != n || b.cols() != m || c.rows() != m || c.cols() != n || d.cols() != m || m == 0)
    throw Error(ErrorCode::InvalidInput, "inconsistent colligation block sizes");
  Matrix g(n + m, n + m);
  g.topLeftCorner(n, n) = a;
  g.topRightCorner(n, m) = b;
  g.bottomLeftCorner(m, n) = c;
  g.bottomRightCorner(m, m) = d;
  const double defect = unitarity_defect(g);
  if (defect > tol.unitary)
    throw Error(ErrorCode::NotUnitaryColligation, "colligation unitarity defect " + std::to_string(defect));
  const double rho = spectral_radius(a);
  if (rho >= 1.0 - tol.unitary)
    throw Error(ErrorCode::NotPureRealization, "state matrix has spectral radius " + std::to_string(rho));
  MatrixInnerFunction psi;
  psi.dimension_ = static_cast<int>(m);
  psi.rep_ = Colligation{a, b, c, d};
  psi.realization_defect_ = defect;
  return psi;
}

MatrixInnerFunction from_bp_product(BPProduct product, const Tolerances& tol) {
  auto dim = product.leading.rows();
  if (dim == 0 && !product.factors.empty()) dim = product.factors.front().unitary.rows();
  if (dim == 0) throw Error(ErrorCode::InvalidInput, "empty Blaschke-Potapov product");
  if (product.leading.size() == 0) product.leading = Matrix::Identity(dim, dim);
  double defect = unitarity_defect(product.leading);
  for (const auto& f : product.factors) {
    if (f.projection.rows() != dim || f.projection.cols() != dim || f.unitary.rows() != dim ||
        f.unitary.cols() != dim)
      throw Error(ErrorCode::InvalidInput, "factor size mismatch");
    if (!(std::abs(f.zero) < 1.0)) throw Error(ErrorCode::InvalidInput, "factor zero outside the open disc");
    defect = std::max(defect, unitarity_defect(f.unitary));
    defect = std::max(defect, op_norm(f.projection * f.projection - f.projection));
    defect = std::max(defect, op_norm(f.projection - f.projection.adjoint()));
  }
  if (defect > tol.unitary || unitarity_defect(product.leading) > tol.unitary)
    throw Error(ErrorCode::NotUnitaryColligation, "Blaschke-Potapov factor is not unitary/projection");
  MatrixInnerFunction psi;
  psi.dimension_ = static_cast<int>(dim);
  psi.rep_ = std::move(product);
  psi.realization_defect_ = defect;
  return psi;
}

MatrixInnerFunction from_polynomial_matrix(PolynomialMatrix entries, const Tolerances& tol) {
  const auto d = entries.entries.size();
  if (d == 0) throw Error(ErrorCode::InvalidInput, "empty polynomial matrix");
  for (const auto& row : entries.entries)
    if (row.size() != d) throw Error(ErrorCode::InvalidInput, "polynomial matrix is not square");
  MatrixInnerFunction psi;
  psi.dimension_ = static_cast<int>(d);
  psi.rep_ = std::move(entries);
  psi.realization_defect_ = boundary_unitarity_defect(psi, 2048);
  if (psi.realization_defect_ > tol.unitary)
    throw Error(ErrorCode::NotUnitaryColligation, "polynomial matrix is not unitary on the circle");
  return psi;
}

MatrixInnerFunction scalar_blaschke_times_identity(const BlaschkeProduct& b, int d) {
  BPProduct product;
  product.leading = b.unimodular() * Matrix::Identity(d, d);
  for (const auto& z : b.zeros())
    for (int k = 0; k < z.multiplicity; ++k)
      product.factors.push_back({z.point, Matrix::Identity(d, d), Matrix::Identity(d, d)});
  return from_bp_product(std::move(product));
}

Matrix eval_psi(const MatrixInnerFunction& psi, Complex lambda) { return psi.eval(lambda); }

std::vector<Matrix> eval_psi_jet(const MatrixInnerFunction& psi, Complex lambda, int order) {
  auto t = psi.taylor(lambda, order);
  double fact = 1.0;
  for (int k = 1; k <= order; ++k) {
    fact *= k;
    t[k] *= fact;
  }
  return t;
}

std::vector<Complex> boundary_grid(int n) {
  std::vector<Complex> out(n);
  for (int k = 0; k < n; ++k) out[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / n);
  return out;
}

std::vector<Complex> interior_grid(const SampleGrid& grid) {
  std::vector<Complex> out{Complex(0.0)};
  for (int i = 1; i < grid.radii; ++i) {
    const double r = static_cast<double>(i) / grid.radii;
    for (int k = 0; k < grid.angles; ++k) out.push_back(std::polar(r, 2.0 * std::numbers::pi * k / grid.angles));
  }
  return out;
}

std::vector<Complex> disc_spiral(int count) {
  std::vector<Complex> out(count);
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  for (int k = 0; k < count; ++k) {
    const double r = count > 1 ? std::sqrt(static_cast<double>(k) / (count - 1)) : 0.0;
    out[k] = std::polar(r, golden * k);
  }
  return out;
}

double boundary_unitarity_defect(const MatrixInnerFunction& psi, int n) {
  double worst = 0.0;
  for (const auto& z : boundary_grid(n)) worst = std::max(worst, unitarity_defect(psi.eval(z)));
  return worst;
}

double interior_spectral_radius(const MatrixInnerFunction& psi, int samples, double max_radius) {
  double worst = 0.0;
  for (const auto& z : disc_spiral(samples)) worst = std::max(worst, spectral_radius(psi.eval(max_radius * z)));
  return worst;
}

std::vector<Complex> fiber(const MatrixInnerFunction& psi, Complex z) { return eigenvalues(psi.eval(z)); }

namespace {

struct DeterminantForm {
  int degz = 0;
  double cleared_root_modulus = std::numeric_limits<double>::infinity();
};

DeterminantForm determinant_form(const MatrixInnerFunction& psi) {
  DeterminantForm out;
  const auto& rep = psi.representation();
  if (const auto* col = std::get_if<Colligation>(&rep)) {
    out.degz = static_cast<int>(col->a.rows());
    const double rho = spectral_radius(col->a);
    if (rho > 0.0) out.cleared_root_modulus = 1.0 / rho;
  } else if (const auto* bp = std::get_if<BPProduct>(&rep)) {
    for (const auto& f : bp->factors) {
      out.degz += projection_rank(f.projection);
      if (std::abs(f.zero) > 0.0)
        out.cleared_root_modulus = std::min(out.cleared_root_modulus, 1.0 / std::abs(f.zero));
    }
  } else {
    const auto& pm = std::get<PolynomialMatrix>(rep);
    int maxdeg = 0;
    for (const auto& row : pm.entries)
      for (const auto& e : row) maxdeg = std::max(maxdeg, e.degree());
    out.degz = psi.dimension() * maxdeg;
  }
  return out;
}

// det(Psi(z) - wI) times the denominator-clearing factor.
Complex cleared_determinant(const MatrixInnerFunction& psi, Complex z, Complex w) {
  const auto d = psi.dimension();
  const auto& rep = psi.representation();
  if (const auto* col = std::get_if<Colligation>(&rep)) {
    const auto n = col->a.rows();
    Matrix pencil(n + d, n + d);
    pencil.topLeftCorner(n, n) = Matrix::Identity(n, n) - z * col->a;
    pencil.topRightCorner(n, d) = z * col->b;
    pencil.bottomLeftCorner(d, n) = -col->c;
    pencil.bottomRightCorner(d, d) = col->d - w * Matrix::Identity(d, d);
    return pencil.partialPivLu().determinant();
  }
  if (const auto* bp = std::get_if<BPProduct>(&rep)) {
    // acc = Psi(z) * prod(den), so det(acc - w prod(den)) = det(Psi - w) prod(den)^d.
    // The clearing factor is prod den^{rank P}; divide out the surplus.
    Matrix acc = bp->leading;
    const Matrix id = Matrix::Identity(d, d);
    Complex scalar = 1.0;
    for (const auto& f : bp->factors) {
      const Complex den = 1.0 - std::conj(f.zero) * z;
      acc = acc * f.unitary * ((id - f.projection) * den + (f.zero - z) * f.projection);
      scalar *= den;
    }
    const Complex det = (acc - w * scalar * id).partialPivLu().determinant();
    Complex surplus = 1.0;
    for (const auto& f : bp->factors) {
      const Complex den = 1.0 - std::conj(f.zero) * z;
      const int r = projection_rank(f.projection);
      for (int k = 0; k < d - r; ++k) surplus *= den;
    }
    return det / surplus;
  }
  return (psi.eval(z) - w * Matrix::Identity(d, d)).partialPivLu().determinant();
}

}  // namespace

VarietyDescription variety_polynomial(const MatrixInnerFunction& psi, const Tolerances& tol,
                                      int consistency_samples) {
  const auto form = determinant_form(psi);
  if (form.cleared_root_modulus <= 1.0 + 1e-12)
    throw Error(ErrorCode::SpuriousFactorInDisc, "cleared denominator vanishes on the closed disc");
  const int d = psi.dimension();
  const auto zn = interpolation_nodes_z(form.degz + 1);
  const auto wn = interpolation_nodes_w(d + 1);
  Matrix values(zn.size(), wn.size());
  for (size_t i = 0; i < zn.size(); ++i)
    for (size_t j = 0; j < wn.size(); ++j) values(i, j) = cleared_determinant(psi, zn[i], wn[j]);
  auto fit = fit_tensor_grid(zn, wn, values);

  VarietyDescription out;
  out.psi = psi;
  out.p = fit.poly.trimmed(1e-12);
  out.degz = out.p.degz();
  out.degw = d;
  out.fit_residual = fit.residual;
  out.cleared_root_modulus = form.cleared_root_modulus;

  const double scale = out.p.norm1();
  const Poly2& p = out.p;
  for (const auto& z : disc_spiral(consistency_samples)) {
    const auto ws = fiber(psi, z);
    for (const auto& w : ws) out.vanishing_residual = std::max(out.vanishing_residual, std::abs(p(z, w)) / scale);
    std::vector<Complex> wc(p.degw() + 1);
    for (int j = 0; j <= p.degw(); ++j) {
      Complex acc = 0.0;
      for (int i = p.degz(); i >= 0; --i) acc = acc * z + p.coeff(i, j);
      wc[j] = acc;
    }
    const Poly1 slice(wc);
    if (slice.degree() == d) {
      out.fiber_match_distance = std::max(out.fiber_match_distance, matching_distance(roots(slice), ws));
    } else {
      out.fiber_match_distance = std::numeric_limits<double>::infinity();
    }
  }
  (void)tol;
  return out;
}

CertificateEntry distinguished_certificate(const MatrixInnerFunction& psi, const SampleGrid& grid,
                                           const Tolerances& tol) {
  CertificateEntry e;
  e.name = "distinguished_variety";
  e.anchor = "V_Psi meets D^2 and exits the bidisc through T^2";
  double boundary_defect = 0.0;
  for (const auto& z : boundary_grid(grid.boundary))
    for (const auto& w : fiber(psi, z)) boundary_defect = std::max(boundary_defect, std::abs(std::abs(w) - 1.0));
  double interior_max = 0.0;
  double witness_mod = std::numeric_limits<double>::infinity();
  Complex wz = 0.0, ww = 0.0;
  for (const auto& z : interior_grid(grid)) {
    for (const auto& w : fiber(psi, z)) {
      interior_max = std::max(interior_max, std::abs(w));
      if (std::abs(w) < witness_mod) {
        witness_mod = std::abs(w);
        wz = z;
        ww = w;
      }
    }
  }
  const bool a = boundary_defect <= tol.unitary;
  const bool b = interior_max <= 1.0 + tol.unitary;
  const bool c = witness_mod < 1.0 - tol.margin_spec;
  e.status = (a && b && c) ? Status::pass : Status::fail;
  e.margin = std::min({tol.unitary - boundary_defect, 1.0 + tol.unitary - interior_max, 1.0 - tol.margin_spec - witness_mod});
  e.data = {
      {"boundary_unimodularity_defect", boundary_defect},
      {"interior_max_modulus", interior_max},
      {"boundary_fibers_unimodular", a},
      {"interior_fibers_in_disc", b},
      {"meets_open_bidisc", c},
      {"witness", {{"z", {wz.real(), wz.imag()}}, {"w", {ww.real(), ww.imag()}}}},
      {"boundary_samples", grid.boundary},
      {"disc_samples", {grid.radii, grid.angles}},
  };
  return e;
}

}  // namespace distvar
