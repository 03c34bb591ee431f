#include "distvar/opcore.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "distvar/linalg.hpp"

namespace distvar {

namespace {

double scale_of(const Matrix& a, const Matrix& b) { return std::max({1.0, op_norm(a), op_norm(b)}); }

// Orthonormal kernel basis with an absolute singular-value threshold.
Matrix kernel_abs(const Matrix& m, double thr) {
  const auto n = m.cols();
  if (m.rows() == 0) return Matrix::Identity(n, n);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > thr) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

std::vector<JointPoint> merge_points(const std::vector<BiPoint>& raw, const Tolerances& tol, bool& degenerate,
                                     double& min_sep) {
  const auto cl = cluster_bipoints(raw, tol.cluster_merge, tol.cluster_sep);
  degenerate = cl.degenerate;
  min_sep = cl.min_separation;
  std::vector<JointPoint> out;
  for (const auto& c : cl.clusters) {
    JointPoint p;
    p.lambda = c.center.z;
    p.mu = c.center.w;
    p.multiplicity = c.count;
    out.push_back(p);
  }
  return out;
}

double lower_part(const Matrix& m) {
  double worst = 0.0;
  for (int j = 0; j < m.cols(); ++j)
    for (int i = j + 1; i < m.rows(); ++i) worst = std::max(worst, std::abs(m(i, j)));
  return worst;
}

// A common eigenvector of two commuting matrices.
Vector common_eigenvector(const Matrix& a, const Matrix& b, double thr) {
  const auto n = a.rows();
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  const Complex lambda = es.eigenvalues()(0);
  Matrix k = kernel_abs(a - lambda * Matrix::Identity(n, n), thr);
  if (k.cols() == 0) {
    // Fall back to the singular vector of least singular value.
    Eigen::JacobiSVD<Matrix> svd(a - lambda * Matrix::Identity(n, n), Eigen::ComputeFullV);
    k = svd.matrixV().rightCols(1);
  }
  const Matrix restricted = k.adjoint() * b * k;
  Eigen::ComplexEigenSolver<Matrix> es2(restricted, true);
  Vector v = k * es2.eigenvectors().col(0);
  return v / v.norm();
}

// Upper-triangularizes a commuting pair by repeated common-eigenvector deflation.
Matrix deflation_flag(const Matrix& t1, const Matrix& t2, double thr) {
  const auto n = t1.rows();
  Matrix u = Matrix::Identity(n, n);
  Matrix basis = Matrix::Identity(n, n);  // current complement, orthonormal columns
  Matrix a = t1, b = t2;
  for (int step = 0; step < n; ++step) {
    const auto m = a.rows();
    const Vector v = common_eigenvector(a, b, thr);
    Matrix q(m, m);
    q.col(0) = v;
    if (m > 1) q.rightCols(m - 1) = orthogonal_complement(v);
    u.col(step) = basis * v;
    if (m == 1) break;
    const Matrix rest = q.rightCols(m - 1);
    basis = basis * rest;
    a = rest.adjoint() * a * rest;
    b = rest.adjoint() * b * rest;
  }
  return u;
}

}  // namespace

CommutingPair validate_pair(const Matrix& t1, const Matrix& t2, PairFlags flags, const Tolerances& tol) {
  if (t1.rows() != t1.cols() || t2.rows() != t2.cols() || t1.rows() != t2.rows() || t1.rows() == 0)
    throw Error(ErrorCode::InvalidInput, "pair must be two nonempty square matrices of equal size");
  CommutingPair p;
  p.t1 = t1;
  p.t2 = t2;
  p.commutator_norm = op_norm(t1 * t2 - t2 * t1);
  p.norms = {op_norm(t1), op_norm(t2)};
  p.purity_margins = {1.0 - spectral_radius(t1), 1.0 - spectral_radius(t2)};
  p.pure = p.purity_margins[0] > 0.0 && p.purity_margins[1] > 0.0;
  const auto n = t1.rows();
  p.defect_ranks = {numerical_rank(Matrix::Identity(n, n) - t1 * t1.adjoint(), tol.rank),
                    numerical_rank(Matrix::Identity(n, n) - t2 * t2.adjoint(), tol.rank)};
  if (flags.strict) {
    if (p.commutator_norm > tol.commute)
      throw Error(ErrorCode::NonCommuting, "commutator norm " + std::to_string(p.commutator_norm));
    if (p.norms[0] > 1.0 + tol.norm || p.norms[1] > 1.0 + tol.norm)
      throw Error(ErrorCode::NotContractive, "pair is not contractive");
    if (flags.require_pure && !p.pure) throw Error(ErrorCode::NotPure, "spectral radius reaches the unit circle");
  }
  return p;
}

Defect defect(const Matrix& t, const Tolerances& tol) {
  if (op_norm(t) > 1.0 + tol.norm) throw Error(ErrorCode::NotContractive, "defect of a non-contraction");
  const auto n = t.rows();
  const Matrix g = Matrix::Identity(n, n) - t * t.adjoint();
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (g + g.adjoint()));
  Defect out;
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  out.root = es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * es.eigenvectors().adjoint();
  std::vector<int> keep;
  for (int i = static_cast<int>(n) - 1; i >= 0; --i)
    if (ev(i) > tol.rank) keep.push_back(i);
  out.rank = static_cast<int>(keep.size());
  out.basis.resize(n, out.rank);
  for (int k = 0; k < out.rank; ++k) out.basis.col(k) = es.eigenvectors().col(keep[k]);
  return out;
}

Matrix poly_apply(const Poly2& p, const Matrix& t1, const Matrix& t2) {
  const auto n = t1.rows();
  const Matrix id = Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n, n);
  for (int i = p.degz(); i >= 0; --i) {
    Matrix inner = Matrix::Zero(n, n);
    for (int j = p.degw(); j >= 0; --j) inner = inner * t2 + p.coeff(i, j) * id;
    out = out * t1 + inner;
  }
  return out;
}

Matrix poly_apply(const Poly2& p, const CommutingPair& pair) { return poly_apply(p, pair.t1, pair.t2); }

AnalyticValue analytic_apply(const AnalyticFunction& f, const CommutingPair& pair, const Tolerances& tol) {
  if (!pair.pure) throw Error(ErrorCode::NotPure, "analytic calculus needs rho(T_i) < 1");
  const auto n = pair.size();
  const Matrix id = Matrix::Identity(n, n);
  constexpr int kMaxPower = 1 << 14;

  // Smallest N with ||T^N|| <= 1/2, and c = max_{r < N} ||T^r||.
  struct Decay {
    int period = 1;
    double q = 0.0;
    double c = 1.0;
  };
  auto decay = [&](const Matrix& t) {
    Decay d;
    Matrix pw = id;
    for (int k = 1; k <= kMaxPower; ++k) {
      pw = pw * t;
      const double nk = op_norm(pw);
      if (nk <= 0.5) {
        d.period = k;
        d.q = nk;
        return d;
      }
      d.c = std::max(d.c, nk);
    }
    throw Error(ErrorCode::TruncationNotConverged, "powers do not decay");
  };
  const Decay d1 = decay(pair.t1), d2 = decay(pair.t2);
  const int period = std::max(d1.period, d2.period);
  auto total = [&](const Decay& d) { return d.c * d.period / (1.0 - d.q); };
  auto tail = [&](const Decay& d, int terms) {
    const int blocks = terms / d.period;
    return d.c * d.period * std::pow(d.q, blocks) / (1.0 - d.q);
  };

  int terms = period;
  double bound = 0.0;
  for (;;) {
    bound = f.bound * (total(d1) * tail(d2, terms) + tail(d1, terms) * total(d2));
    if (bound < tol.calc) break;
    terms *= 2;
    if (terms > kMaxPower) throw Error(ErrorCode::TruncationNotConverged, "tail bound stays above tol_calc");
  }

  std::vector<Matrix> p2(terms);
  p2[0] = id;
  for (int j = 1; j < terms; ++j) p2[j] = p2[j - 1] * pair.t2;
  AnalyticValue out;
  out.value = Matrix::Zero(n, n);
  Matrix p1 = id;
  for (int i = 0; i < terms; ++i) {
    Matrix row = Matrix::Zero(n, n);
    for (int j = 0; j < terms; ++j) {
      const Complex c = f.coeff(i, j);
      if (c != Complex(0.0)) row += c * p2[j];
    }
    out.value += p1 * row;
    p1 = p1 * pair.t1;
  }
  out.terms = terms;
  out.tail_bound = bound;
  return out;
}

std::vector<std::pair<Complex, Complex>> JointSpectrum::multiset() const {
  std::vector<std::pair<Complex, Complex>> out;
  for (const auto& p : points)
    for (int k = 0; k < p.multiplicity; ++k) out.emplace_back(p.lambda, p.mu);
  return out;
}

JointSpectrum joint_spectrum_taylor(const CommutingPair& pair, std::uint64_t seed, const Tolerances& tol) {
  const auto n = pair.size();
  const double scale = scale_of(pair.t1, pair.t2);
  const double tri_tol = tol.match * scale;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  JointSpectrum out;
  out.kind = SpectrumKind::taylor;
  out.seed = seed;

  Matrix u;
  bool ok = false;
  for (int attempt = 1; attempt <= 5 && !ok; ++attempt) {
    out.attempts = attempt;
    const double alpha = normal(rng), beta = normal(rng);
    Eigen::ComplexSchur<Matrix> schur(alpha * pair.t1 + beta * pair.t2);
    u = schur.matrixU();
    out.triangular_residual =
        std::max(lower_part(u.adjoint() * pair.t1 * u), lower_part(u.adjoint() * pair.t2 * u));
    ok = out.triangular_residual <= tri_tol;
  }
  if (!ok) {
    u = deflation_flag(pair.t1, pair.t2, tol.eig * scale);
    out.triangular_residual =
        std::max(lower_part(u.adjoint() * pair.t1 * u), lower_part(u.adjoint() * pair.t2 * u));
    out.deflation_fallback = true;
    if (out.triangular_residual > tri_tol)
      throw Error(ErrorCode::TriangularizationFailed, "no joint upper-triangular form within tolerance");
  }
  const Matrix a = u.adjoint() * pair.t1 * u;
  const Matrix b = u.adjoint() * pair.t2 * u;
  std::vector<BiPoint> raw(n);
  for (int i = 0; i < n; ++i) raw[i] = {a(i, i), b(i, i)};
  out.points = merge_points(raw, tol, out.degenerate, out.min_separation);

  for (int k = 0; k < 2; ++k) {
    const double alpha = normal(rng), beta = normal(rng);
    std::vector<Complex> predicted(n);
    for (int i = 0; i < n; ++i) predicted[i] = alpha * raw[i].z + beta * raw[i].w;
    const auto computed = eigenvalues(alpha * pair.t1 + beta * pair.t2);
    out.cross_check = std::max(out.cross_check, matching_distance(predicted, computed));
  }
  return out;
}

JointSpectrum joint_point_spectrum(const Matrix& t1, const Matrix& t2, const Tolerances& tol) {
  const auto n = t1.rows();
  const double scale = scale_of(t1, t2);
  const double thr = tol.eig * scale;
  const Matrix id = Matrix::Identity(n, n);
  JointSpectrum out;
  out.kind = SpectrumKind::point;
  const auto lambdas = cluster_values(eigenvalues(t1), tol.cluster_merge, tol.cluster_sep);
  std::vector<BiPoint> centers;
  for (const auto& cl : lambdas.clusters) {
    const Complex lambda = cl.center;
    const Matrix k = kernel_abs(t1 - lambda * id, thr);
    if (k.cols() == 0) continue;
    const Matrix restricted = k.adjoint() * t2 * k;
    const auto mus = cluster_values(eigenvalues(restricted), tol.cluster_merge, tol.cluster_sep);
    for (const auto& cm : mus.clusters) {
      const Complex mu = cm.center;
      const Matrix v = kernel_abs(restricted - mu * Matrix::Identity(k.cols(), k.cols()), thr);
      if (v.cols() == 0) continue;
      JointPoint p;
      p.lambda = lambda;
      p.mu = mu;
      p.witnesses = k * v;
      p.multiplicity = static_cast<int>(p.witnesses.cols());
      p.residual = std::max(op_norm(t1 * p.witnesses - lambda * p.witnesses),
                            op_norm(t2 * p.witnesses - mu * p.witnesses));
      if (p.residual > thr) continue;
      out.points.push_back(p);
      centers.push_back({lambda, mu});
    }
  }
  const auto cl = cluster_bipoints(centers, 0.0, tol.cluster_sep);
  out.degenerate = lambdas.degenerate || cl.degenerate;
  out.min_separation = cl.min_separation;
  return out;
}

JointSpectrum joint_point_spectrum(const CommutingPair& pair, const Tolerances& tol) {
  return joint_point_spectrum(pair.t1, pair.t2, tol);
}

MinimalBlaschke minimal_blaschke(const Matrix& t, const Tolerances& tol) {
  if (spectral_radius(t) >= 1.0) throw Error(ErrorCode::NotPure, "minimal Blaschke product needs rho(T) < 1");
  const auto n = t.rows();
  const double thr = tol.rank * std::max(1.0, op_norm(t));
  const auto cl = cluster_values(eigenvalues(t), tol.cluster_merge, tol.cluster_sep);
  MinimalBlaschke out;
  out.degenerate = cl.degenerate;
  std::vector<BlaschkeZero> zeros;
  for (const auto& c : cl.clusters) {
    const Matrix shifted = t - c.center * Matrix::Identity(n, n);
    Matrix pw = Matrix::Identity(n, n);
    int mult = c.count;
    for (int k = 1; k <= c.count; ++k) {
      pw = pw * shifted;
      Eigen::JacobiSVD<Matrix> svd(pw);
      const auto& s = svd.singularValues();
      int rank = 0;
      for (int i = 0; i < s.size(); ++i) {
        if (s(i) > thr) ++rank;
        if (s(i) > thr / 10.0 && s(i) < thr * 10.0) out.conclusive = false;
      }
      if (rank <= n - c.count) {
        mult = k;
        break;
      }
    }
    zeros.push_back({c.center, mult});
  }
  out.product = BlaschkeProduct(std::move(zeros));
  return out;
}

}  // namespace distvar
