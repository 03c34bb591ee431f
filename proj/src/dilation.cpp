#include "distvar/dilation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "distvar/annvar.hpp"
#include "distvar/linalg.hpp"

namespace distvar {

namespace {

constexpr int kMaxRows = 100000;

using Series = std::vector<Matrix>;

Series series_mul(const Series& x, const Series& y) {
  const int order = static_cast<int>(x.size()) - 1;
  Series out(order + 1, Matrix::Zero(x[0].rows(), y[0].cols()));
  for (int i = 0; i <= order; ++i)
    for (int j = 0; i + j <= order; ++j) out[i + j] += x[i] * y[j];
  return out;
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// <kappa_{lb, jb}, kappa_{la, ja}>: the ja-th Taylor coefficient of kappa_{lb, jb} at la.
Complex jet_inner(Complex lb, int jb, Complex la, int ja) {
  const Complex lc = std::conj(lb);
  const Complex u = 1.0 - lc * la;
  const Complex base = std::pow(u, -(jb + 1));
  Complex acc = 0.0;
  for (int s = 0; s <= std::min(jb, ja); ++s) {
    const Complex first = binomial(jb, s) * std::pow(la, jb - s);
    const int k = ja - s;
    const Complex second = base * binomial(jb + k, k) * std::pow(lc / u, k);
    acc += first * second;
  }
  return acc;
}

Matrix inverse_sqrt_hermitian(const Matrix& h) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (h + h.adjoint()));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(1e-300).cwiseSqrt().cwiseInverse();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

// Stacked block rows; each block is d x n.
double stacked_norm(const std::vector<Matrix>& blocks) {
  if (blocks.empty()) return 0.0;
  Matrix all(blocks.size() * blocks[0].rows(), blocks[0].cols());
  for (size_t m = 0; m < blocks.size(); ++m) all.middleRows(m * blocks[0].rows(), blocks[0].rows()) = blocks[m];
  return op_norm(all);
}

double coefficient_identity_residual(const Matrix& dhat, const CommutingPair& pair, const MatrixInnerFunction& psi) {
  const int rows = extended_rows(pair.t1, 1);
  const auto coeffs = psi.taylor(0.0, rows);
  const Matrix ds = dhat.adjoint();
  Matrix acc = Matrix::Zero(ds.rows(), ds.cols());
  Matrix pw = Matrix::Identity(pair.size(), pair.size());
  for (int k = 0; k <= rows; ++k) {
    acc += pw * ds * coeffs[k];
    pw = pw * pair.t1;
  }
  return op_norm(acc - pair.t2 * ds);
}

// Unitary V with V X = Y, given X*X = Y*Y; `mix` acts between the complements.
Matrix lurking_unitary(const Matrix& x, const Matrix& y, const Matrix* mix) {
  const auto m = x.rows();
  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double thr = 1e-10 * std::max(1.0, s.size() ? s(0) : 0.0);
  int r = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s(i) > thr) ++r;
  const Matrix vr = svd.matrixV().leftCols(r);
  const Eigen::VectorXd sinv = s.head(r).cwiseInverse();
  const Matrix ux = svd.matrixU().leftCols(r);
  Matrix uy = y * vr * sinv.asDiagonal();
  if (r > 0) uy = nearest_unitary(uy);
  Matrix v = uy * ux.adjoint();
  if (r < m) {
    const Matrix px = orthogonal_complement(ux);
    const Matrix py = orthogonal_complement(uy);
    const Matrix w = mix ? *mix : Matrix::Identity(m - r, m - r);
    v += py * w * px.adjoint();
  }
  return nearest_unitary(v);
}

// Drops the reducing subspace on which A is unitary; it does not affect the
// transfer function.
void remove_unitary_part(Matrix& a, Matrix& b, Matrix& c) {
  if (a.rows() == 0) return;
  Eigen::ComplexEigenSolver<Matrix> es(a);
  std::vector<int> idx;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) > 1.0 - 1e-6) idx.push_back(i);
  if (idx.empty()) return;
  Matrix vecs(a.rows(), idx.size());
  for (size_t k = 0; k < idx.size(); ++k) vecs.col(k) = es.eigenvectors().col(idx[k]);
  const Matrix vu = column_span(vecs, 1e-8);
  const Matrix keep = orthogonal_complement(vu);
  a = keep.adjoint() * a * keep;
  b = keep.adjoint() * b;
  c = c * keep;
}

}  // namespace

Matrix coefficient_rows(const Matrix& dhat, const Matrix& t1, int rows) {
  const auto d = dhat.rows();
  Matrix out(rows * d, dhat.cols());
  Matrix cur = dhat;
  const Matrix t1s = t1.adjoint();
  for (int m = 0; m < rows; ++m) {
    out.middleRows(m * d, d) = cur;
    cur = cur * t1s;
  }
  return out;
}

int extended_rows(const Matrix& t1, int at_least) {
  Matrix pw = Matrix::Identity(t1.rows(), t1.cols());
  int m = 0;
  for (; m < kMaxRows; ++m) {
    if (m >= at_least && op_norm(pw) < 1e-15) return m;
    pw = pw * t1;
  }
  throw Error(ErrorCode::TruncationNotConverged, "powers of T1 do not decay");
}

Embedding embed_J(const CommutingPair& pair, double tol_trunc) {
  if (!pair.pure) throw Error(ErrorCode::NotPure, "co-extension needs a pure T1");
  const auto def = defect(pair.t1);
  Embedding e;
  e.dhat = def.basis.adjoint() * def.root;
  Matrix pw = pair.t1;
  int n = 0;
  for (;; ++n) {
    const double tail = op_norm(pw);
    if (tail * tail <= tol_trunc) break;
    if (n >= kMaxRows) throw Error(ErrorCode::TruncationNotConverged, "co-extension tail does not decay");
    pw = pw * pair.t1;
  }
  e.n_trunc = n;
  e.j = coefficient_rows(e.dhat, pair.t1, n + 1);
  e.isometry_defect = op_norm(e.j.adjoint() * e.j - Matrix::Identity(pair.size(), pair.size()));
  return e;
}

double intertwining_residual(const Embedding& e, const CommutingPair& pair, const MatrixInnerFunction& psi) {
  const int rows = e.n_trunc + 1;
  const int ext = extended_rows(pair.t1, rows) + 1;
  const auto d = e.d();
  const Matrix jx = coefficient_rows(e.dhat, pair.t1, ext);
  const auto coeffs = psi.taylor(0.0, ext);
  std::vector<Matrix> blocks;
  for (int m = 0; m < rows; ++m) {
    Matrix row = jx.middleRows(m * d, d) * pair.t2.adjoint();
    for (int k = 0; m + k < ext; ++k) row -= coeffs[k].adjoint() * jx.middleRows((m + k) * d, d);
    blocks.push_back(row);
  }
  return stacked_norm(blocks);
}

PsiConstruction construct_psi(const CommutingPair& pair, std::uint64_t seed, const Tolerances& tol) {
  if (!pair.pure) throw Error(ErrorCode::NotPure, "construction needs a pure pair");
  const auto n = pair.size();
  const auto def1 = defect(pair.t1, tol);
  const auto def2 = defect(pair.t2, tol);
  const Matrix dh = def1.basis.adjoint() * def1.root;
  const Matrix eh = def2.basis.adjoint() * def2.root;
  const int d1 = def1.rank, d2 = def2.rank;
  const int m = d1 + d2;
  if (d1 == 0) throw Error(ErrorCode::NotPure, "T1 has no defect");

  Matrix x(m, n), y(m, n);
  x.topRows(d1) = dh;
  x.bottomRows(d2) = eh * pair.t1.adjoint();
  y.topRows(d1) = dh * pair.t2.adjoint();
  y.bottomRows(d2) = eh;

  const Embedding e = embed_J(pair, tol.trunc);
  const double scale = std::max(1.0, op_norm(pair.t2));
  std::mt19937_64 rng(seed);
  PsiConstruction out;
  constexpr int kBudget = 16;
  for (int attempt = 1; attempt <= kBudget; ++attempt) {
    out.attempts = attempt;
    Eigen::JacobiSVD<Matrix> svd(x);
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()(i) > 1e-10 * std::max(1.0, svd.singularValues()(0))) ++r;
    Matrix mix;
    if (attempt > 1 && r < m) mix = random_unitary(m - r, rng);
    const Matrix u = lurking_unitary(x, y, attempt > 1 && r < m ? &mix : nullptr);
    Matrix a = u.bottomRightCorner(d2, d2).adjoint();
    Matrix b = u.topRightCorner(d1, d2).adjoint();
    Matrix c = u.bottomLeftCorner(d2, d1).adjoint();
    const Matrix dd = u.topLeftCorner(d1, d1).adjoint();
    remove_unitary_part(a, b, c);
    try {
      out.psi = from_colligation(a, b, c, dd, tol);
    } catch (const Error&) {
      continue;
    }
    out.coefficient_residual = coefficient_identity_residual(dh, pair, out.psi);
    out.intertwining_residual = intertwining_residual(e, pair, out.psi);
    if (out.coefficient_residual <= tol.intertwine * scale && out.intertwining_residual <= tol.intertwine) {
      const int ext = extended_rows(pair.t1, e.n_trunc + 1) + 1;
      const Matrix jx = coefficient_rows(e.dhat, pair.t1, ext);
      std::vector<Matrix> blocks;
      for (int k = 0; k <= e.n_trunc; ++k)
        blocks.push_back(jx.middleRows(k * d1, d1) * pair.t1.adjoint() - jx.middleRows((k + 1) * d1, d1));
      out.shift_residual = stacked_norm(blocks);
      return out;
    }
  }
  throw Error(ErrorCode::NoInnerSolution, "no pure inner lift within the retry budget");
}

CommutingPair compress_pair(const MatrixInnerFunction& psi, const BlaschkeProduct& theta, const Tolerances& tol) {
  const auto zeros = theta.roots_with_multiplicity();
  const int n = static_cast<int>(zeros.size());
  if (n == 0) throw Error(ErrorCode::InvalidInput, "theta must be nonconstant");
  const int d = psi.dimension();
  const double r = std::max(theta.max_zero_modulus(), psi.pole_radius());
  int nodes = 512;
  if (r > 0.0) {
    const double need = 40.0 / -std::log(r);
    while (nodes < need && nodes < (1 << 20)) nodes *= 2;
  }
  Matrix s1 = Matrix::Zero(n, n);
  Matrix t2 = Matrix::Zero(n * d, n * d);
  std::vector<Complex> e(n);
  for (int t = 0; t < nodes; ++t) {
    const Complex z = std::polar(1.0, 2.0 * std::numbers::pi * t / nodes);
    Complex prod = 1.0;
    for (int k = 0; k < n; ++k) {
      const Complex a = zeros[k];
      const Complex den = 1.0 - std::conj(a) * z;
      e[k] = std::sqrt(1.0 - std::norm(a)) / den * prod;
      prod *= (z - a) / den;
    }
    const Matrix pz = psi.eval(z);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        const Complex w = e[l] * std::conj(e[k]);
        s1(k, l) += z * w;
        t2.block(k * d, l * d, d, d) += w * pz;
      }
  }
  s1 /= static_cast<double>(nodes);
  t2 /= static_cast<double>(nodes);
  Matrix t1 = Matrix::Zero(n * d, n * d);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) t1.block(k * d, l * d, d, d) = s1(k, l) * Matrix::Identity(d, d);
  return validate_pair(t1, t2, {true, true}, tol);
}

JetKernelBasis jet_kernel_basis(const BlaschkeProduct& m1, int d) {
  JetKernelBasis out;
  out.points = m1.zeros();
  out.d = d;
  for (int p = 0; p < static_cast<int>(out.points.size()); ++p)
    for (int j = 0; j < out.points[p].multiplicity; ++j)
      for (int i = 0; i < d; ++i) out.elements.push_back({p, j, i});
  const int dim = out.dimension();
  out.gram = Matrix::Zero(dim, dim);
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) {
      const auto& ea = out.elements[a];
      const auto& eb = out.elements[b];
      if (ea.component != eb.component) continue;
      out.gram(a, b) = jet_inner(out.points[eb.point].point, eb.order, out.points[ea.point].point, ea.order);
    }
  return out;
}

Matrix adjoint_action(const JetKernelBasis& basis, const std::vector<std::vector<Matrix>>& taylor) {
  const int dim = basis.dimension();
  const int d = basis.d;
  std::vector<int> offset(basis.points.size() + 1, 0);
  for (size_t p = 0; p < basis.points.size(); ++p) offset[p + 1] = offset[p] + basis.points[p].multiplicity * d;
  Matrix x = Matrix::Zero(dim, dim);
  for (int b = 0; b < dim; ++b) {
    const auto& eb = basis.elements[b];
    for (int lower = 0; lower <= eb.order; ++lower) {
      const Matrix& f = taylor[eb.point][eb.order - lower];
      for (int c = 0; c < d; ++c) x(offset[eb.point] + lower * d + c, b) = std::conj(f(eb.component, c));
    }
  }
  return x;
}

std::vector<Matrix> compose_taylor(const Poly2& f, const MatrixInnerFunction& psi, Complex lambda, int order) {
  const int d = psi.dimension();
  const Series ps = psi.taylor(lambda, order);
  const Matrix id = Matrix::Identity(d, d);
  Series acc(order + 1, Matrix::Zero(d, d));
  for (int i = f.degz(); i >= 0; --i) {
    Series g(order + 1, Matrix::Zero(d, d));
    for (int j = f.degw(); j >= 0; --j) {
      g = series_mul(g, ps);
      g[0] += f.coeff(i, j) * id;
    }
    // acc = acc * (lambda + h) + g
    Series next(order + 1);
    for (int k = 0; k <= order; ++k) next[k] = lambda * acc[k] + (k > 0 ? acc[k - 1] : Matrix::Zero(d, d)) + g[k];
    acc = std::move(next);
  }
  return acc;
}

CoextensionBundle constrained_coextension(const CommutingPair& pair, const MatrixInnerFunction& psi,
                                          const std::vector<Poly2>& ann_gens, const Tolerances& tol) {
  CoextensionBundle out;
  out.pair = pair;
  out.psi = psi;
  const auto mb = minimal_blaschke(pair.t1, tol);
  if (mb.degenerate) throw Error(ErrorCode::DegenerateCluster, "eigenvalues of T1 are too close to separate");
  if (mb.product.degree() == 0) throw Error(ErrorCode::AnnTrivial, "Ann(T1) is trivial");
  out.m1 = mb.product;
  out.embedding = embed_J(pair, tol.trunc);
  const int d = psi.dimension();
  out.jets = jet_kernel_basis(out.m1, d);
  const int dim = out.jets.dimension();

  auto action_of = [&](const Poly2& f) {
    std::vector<std::vector<Matrix>> taylor;
    for (const auto& z : out.jets.points) taylor.push_back(compose_taylor(f, psi, z.point, z.multiplicity - 1));
    return adjoint_action(out.jets, taylor);
  };

  Matrix stacked(0, dim);
  for (const auto& g : ann_gens) {
    if (g.is_zero()) continue;
    const Matrix xg = action_of(g.normalized());
    Matrix grown(stacked.rows() + dim, dim);
    grown << stacked, xg;
    stacked = std::move(grown);
  }
  const auto ns = null_space(stacked, tol.kernel, 1.0);
  out.conclusive = ns.conclusive && mb.conclusive;
  const Matrix& g = out.jets.gram;
  out.kpsi_basis = ns.basis.cols() > 0 ? Matrix(ns.basis * inverse_sqrt_hermitian(ns.basis.adjoint() * g * ns.basis))
                                       : Matrix(dim, 0);
  const Matrix& w = out.kpsi_basis;
  const Matrix xz = action_of(Poly2::z());
  const Matrix xpsi = action_of(Poly2::w());
  const Matrix s1a = w.adjoint() * g * xz * w;
  const Matrix s2a = w.adjoint() * g * xpsi * w;
  out.s1 = s1a.adjoint();
  out.s2 = s2a.adjoint();

  out.residuals["isometry_defect"] = out.embedding.isometry_defect;
  out.residuals["intertwining"] = intertwining_residual(out.embedding, pair, psi);
  out.residuals["kernel_gap_low"] = ns.gap_low / std::max(ns.largest, 1e-300);
  out.residuals["kernel_gap_high"] = ns.gap_high / std::max(ns.largest, 1e-300);
  out.residuals["kpsi_dim_minus_deg_m1"] = static_cast<double>(w.cols()) - out.m1.degree();
  if (w.cols() > 0) {
    out.residuals["commutator"] = op_norm(out.s1 * out.s2 - out.s2 * out.s1);
    out.residuals["rho_s1"] = spectral_radius(out.s1);
    out.residuals["rho_s2"] = spectral_radius(out.s2);
    out.residuals["invariance_z"] = op_norm(xz * w - w * s1a);
    out.residuals["invariance_psi"] = op_norm(xpsi * w - w * s2a);
  }
  return out;
}

std::vector<CertificateEntry> verify_coextension(const CoextensionBundle& bundle, const Tolerances& tol) {
  std::vector<CertificateEntry> out;
  const auto var = variety_polynomial(bundle.psi, tol);
  const Poly2 p = var.p.normalized();

  CertificateEntry a;
  a.name = "variety_annihilates_pair";
  a.anchor = "p(T1,T2) = 0 and p(S1,S2) = 0";
  const double on_pair = op_norm(poly_apply(p, bundle.pair));
  const double on_comp = bundle.s1.size() ? op_norm(poly_apply(p, bundle.s1, bundle.s2)) : 0.0;
  a.margin = std::max(on_pair, on_comp);
  a.status = a.margin <= tol.ann ? Status::pass : Status::fail;
  a.data = {{"pair_residual", on_pair}, {"compressed_residual", on_comp}};
  out.push_back(a);

  CertificateEntry b;
  b.name = "point_spectrum_on_variety";
  b.anchor = "Z(Ann(T1,T2)) in V_Psi";
  const auto spec = joint_point_spectrum(bundle.pair, tol);
  double worst = 0.0;
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : spec.points) {
    const double v = std::abs(p(pt.lambda, pt.mu));
    worst = std::max(worst, v);
    pts.push_back({{"lambda", {pt.lambda.real(), pt.lambda.imag()}}, {"mu", {pt.mu.real(), pt.mu.imag()}}, {"value", v}});
  }
  b.margin = worst;
  b.status = worst <= tol.zset ? Status::pass : Status::fail;
  b.data = {{"points", pts}};
  out.push_back(b);

  CertificateEntry c;
  c.name = "compressed_annihilator";
  c.anchor = "Ann(S1) = Ann(T1)";
  if (bundle.s1.size() == 0) {
    c.status = Status::fail;
    c.margin = std::numeric_limits<double>::infinity();
  } else {
    const auto ms = minimal_blaschke(bundle.s1, tol);
    c.margin = matching_distance(ms.product.roots_with_multiplicity(), bundle.m1.roots_with_multiplicity());
    c.status = c.margin <= tol.match ? Status::pass : Status::fail;
    if (c.status == Status::pass && !(ms.conclusive && bundle.conclusive)) c.status = Status::inconclusive;
    c.data = {{"degree_s1", ms.product.degree()}, {"degree_m1", bundle.m1.degree()}};
  }
  out.push_back(c);
  return out;
}

Matrix coextension_calculus(const Poly2& p, const CommutingPair& pair, const MatrixInnerFunction& psi,
                            const Tolerances& tol) {
  const Embedding e = embed_J(pair, tol.trunc);
  const int d = e.d();
  const int rows = extended_rows(pair.t1, e.n_trunc + 1) + p.degz() + 1;
  const Matrix jx = coefficient_rows(e.dhat, pair.t1, rows);
  const auto coeffs = psi.taylor(0.0, rows);
  auto apply_psi_adj = [&](const Matrix& g) {
    Matrix out = Matrix::Zero(g.rows(), g.cols());
    for (int m = 0; m < rows; ++m)
      for (int k = 0; m + k < rows; ++k) out.middleRows(m * d, d) += coeffs[k].adjoint() * g.middleRows((m + k) * d, d);
    return out;
  };
  std::vector<Matrix> h{jx};
  for (int j = 1; j <= p.degw(); ++j) h.push_back(apply_psi_adj(h.back()));
  Matrix total = Matrix::Zero(jx.rows(), jx.cols());
  for (int i = 0; i <= p.degz(); ++i) {
    Matrix part = Matrix::Zero(jx.rows(), jx.cols());
    for (int j = 0; j <= p.degw(); ++j) part += std::conj(p.coeff(i, j)) * h[j];
    // backward shift by i blocks
    Matrix shifted = Matrix::Zero(jx.rows(), jx.cols());
    if (i < rows) shifted.topRows((rows - i) * d) = part.bottomRows((rows - i) * d);
    total += shifted;
  }
  return (jx.adjoint() * total).adjoint();
}

}  // namespace distvar
