#include "distvar/annvar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace distvar {

namespace {

std::vector<Complex> leja_order(std::vector<Complex> pts) {
  std::vector<Complex> out;
  if (pts.empty()) return out;
  auto first = std::max_element(pts.begin(), pts.end(), [](Complex a, Complex b) { return std::abs(a) < std::abs(b); });
  out.push_back(*first);
  pts.erase(first);
  while (!pts.empty()) {
    size_t best = 0;
    double best_val = -1.0;
    for (size_t k = 0; k < pts.size(); ++k) {
      double v = 1.0;
      for (const auto& q : out) v *= std::abs(pts[k] - q);
      if (v > best_val) {
        best_val = v;
        best = k;
      }
    }
    out.push_back(pts[best]);
    pts.erase(pts.begin() + best);
  }
  return out;
}

std::vector<Poly1> newton_polys(const std::vector<Complex>& nodes) {
  std::vector<Poly1> out{Poly1::constant(1.0)};
  for (size_t k = 0; k + 1 < nodes.size(); ++k) out.push_back(out.back() * Poly1({-nodes[k], 1.0}));
  return out;
}

Poly2 unit(const Poly2& p) { return p.is_zero() ? p : p.normalized(); }

BoxKernel kernel_of(const Matrix& m, int size, const Tolerances& tol) {
  BoxKernel out;
  if (m.rows() == 0) {
    out.basis = Matrix::Identity(size, size);
    return out;
  }
  const auto ns = null_space(m, tol.kernel, 1.0);
  out.basis = ns.basis;
  out.conclusive = ns.conclusive;
  return out;
}

std::vector<Complex> projection_z(const std::vector<BiPoint>& pts) {
  std::vector<Complex> out;
  for (const auto& p : pts) out.push_back(p.z);
  return out;
}

nlohmann::json points_json(const std::vector<BiPoint>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pts) out.push_back({{"z", {p.z.real(), p.z.imag()}}, {"w", {p.w.real(), p.w.imag()}}});
  return out;
}

}  // namespace

Poly2 NewtonBox::to_poly(const Vector& coords) const {
  const auto nz = newton_polys(nodes_z);
  const auto nw = newton_polys(nodes_w);
  Poly2 out;
  for (int i = 0; i < box_z(); ++i) {
    Poly1 inner;
    for (int j = 0; j < box_w(); ++j) inner = inner + coords(i * box_w() + j) * nw[j];
    out = out + Poly2::from_z(nz[i]) * Poly2::from_w(inner);
  }
  return out;
}

Matrix NewtonBox::evaluation(const std::vector<BiPoint>& points) const {
  const auto nz = newton_polys(nodes_z);
  const auto nw = newton_polys(nodes_w);
  Matrix out(points.size(), size());
  for (size_t r = 0; r < points.size(); ++r)
    for (int i = 0; i < box_z(); ++i)
      for (int j = 0; j < box_w(); ++j) out(r, i * box_w() + j) = nz[i](points[r].z) * nw[j](points[r].w);
  return out;
}

Matrix NewtonBox::operator_images(const Matrix& t1, const Matrix& t2) const {
  const auto n = t1.rows();
  const Matrix id = Matrix::Identity(n, n);
  std::vector<Matrix> az{id}, aw{id};
  for (int i = 1; i < box_z(); ++i) az.push_back(az.back() * (t1 - nodes_z[i - 1] * id));
  for (int j = 1; j < box_w(); ++j) aw.push_back(aw.back() * (t2 - nodes_w[j - 1] * id));
  Matrix out(n * n, size());
  for (int i = 0; i < box_z(); ++i)
    for (int j = 0; j < box_w(); ++j) {
      const Matrix img = az[i] * aw[j];
      out.col(i * box_w() + j) = Eigen::Map<const Vector>(img.data(), n * n);
    }
  return out;
}

NewtonBox newton_box(const BlaschkeProduct& m1, const BlaschkeProduct& m2) {
  return {leja_order(m1.roots_with_multiplicity()), leja_order(m2.roots_with_multiplicity())};
}

BoxKernel box_annihilator(const NewtonBox& box, const Matrix& t1, const Matrix& t2, const Tolerances& tol) {
  return kernel_of(box.operator_images(t1, t2), box.size(), tol);
}

BoxKernel box_vanishing(const NewtonBox& box, const std::vector<BiPoint>& points, const Tolerances& tol) {
  return kernel_of(box.evaluation(points), box.size(), tol);
}

double subspace_distance(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) return std::numeric_limits<double>::infinity();
  if (a.cols() == 0) return 0.0;
  const double ab = op_norm(a - b * (b.adjoint() * a));
  const double ba = op_norm(b - a * (a.adjoint() * b));
  return std::max(ab, ba);
}

AnnihilatorBasis ann_generators(const CommutingPair& pair, const Tolerances& tol) {
  if (!pair.pure) throw Error(ErrorCode::NotPure, "annihilator computation needs a pure pair");
  AnnihilatorBasis out;
  const auto mb1 = minimal_blaschke(pair.t1, tol);
  const auto mb2 = minimal_blaschke(pair.t2, tol);
  out.m1 = mb1.product;
  out.m2 = mb2.product;
  out.box = newton_box(out.m1, out.m2);
  out.kernel = box_annihilator(out.box, pair.t1, pair.t2, tol);
  out.conclusive = out.kernel.conclusive && mb1.conclusive && mb2.conclusive;
  out.degenerate = mb1.degenerate || mb2.degenerate;
  for (int k = 0; k < out.kernel.dimension(); ++k) out.generators.push_back(unit(out.box.to_poly(out.kernel.basis.col(k))));
  out.generators.push_back(unit(Poly2::from_z(out.m1.monic_numerator())));
  out.generators.push_back(unit(Poly2::from_w(out.m2.monic_numerator())));
  for (const auto& g : out.generators) out.max_residual = std::max(out.max_residual, op_norm(poly_apply(g, pair)));
  return out;
}

PointSet z_ann(const AnnihilatorBasis& basis, const CommutingPair& pair, std::uint64_t seed, const Tolerances& tol) {
  const auto spec = joint_spectrum_taylor(pair, seed, tol);
  PointSet out;
  out.degenerate = spec.degenerate || basis.degenerate;
  for (const auto& p : spec.points) {
    bool vanishes = true;
    for (const auto& g : basis.generators) vanishes = vanishes && std::abs(g(p.lambda, p.mu)) <= tol.zset;
    if (vanishes && std::abs(p.lambda) < 1.0 && std::abs(p.mu) < 1.0) out.points.push_back({p.lambda, p.mu});
  }
  return out;
}

PointSet omega_psi(const CoextensionBundle& bundle, const Tolerances& tol) {
  PointSet out;
  if (bundle.s1.size() == 0) return out;
  const auto spec = joint_point_spectrum(bundle.s1.adjoint(), bundle.s2.adjoint(), tol);
  out.degenerate = spec.degenerate;
  for (const auto& p : spec.points) {
    out.points.push_back({std::conj(p.lambda), std::conj(p.mu)});
    out.witnesses.push_back(p.witnesses);
  }
  return out;
}

CertificateEntry check_zann_equals_omega(const CommutingPair& pair, const CoextensionBundle& bundle,
                                         const AnnihilatorBasis& basis, std::uint64_t seed, const Tolerances& tol) {
  CertificateEntry e;
  e.name = "zero_set_equals_omega";
  e.anchor = "Z(Ann(T1,T2)) = Omega_Psi";
  const auto zs = z_ann(basis, pair, seed, tol);
  const auto om = omega_psi(bundle, tol);
  e.margin = hausdorff(zs.points, om.points);
  if (zs.degenerate || om.degenerate)
    e.status = Status::inconclusive;
  else
    e.status = e.margin <= tol.match ? Status::pass : Status::fail;
  e.data = {{"zero_set", points_json(zs.points)}, {"omega", points_json(om.points)},
            {"degenerate_cluster", zs.degenerate || om.degenerate}};
  return e;
}

CertificateEntry check_projection(const CommutingPair& pair, const CoextensionBundle& bundle, const Tolerances& tol) {
  (void)pair;
  if (bundle.m1.degree() == 0) throw Error(ErrorCode::AnnTrivial, "Ann(T1) is trivial");
  CertificateEntry e;
  e.name = "omega_projection";
  e.anchor = "Omega_1 = Z(Ann(T1))";
  const auto om = omega_psi(bundle, tol);
  const auto proj = projection_z(om.points);
  const auto roots = bundle.m1.distinct_roots();
  e.margin = hausdorff(proj, roots);
  if (om.degenerate)
    e.status = Status::inconclusive;
  else
    e.status = e.margin <= tol.match ? Status::pass : Status::fail;
  nlohmann::json pj = nlohmann::json::array(), rj = nlohmann::json::array();
  for (const auto& z : proj) pj.push_back({z.real(), z.imag()});
  for (const auto& z : roots) rj.push_back({z.real(), z.imag()});
  e.data = {{"projection", pj}, {"m1_roots", rj}};
  return e;
}

SupportBounds support_bounds(const CommutingPair& pair, const CoextensionBundle& bundle,
                             const VarietyDescription& variety, const AnnihilatorBasis& basis, std::uint64_t seed,
                             const Tolerances& tol) {
  SupportBounds out;
  const auto zs = z_ann(basis, pair, seed, tol);
  out.inner_set = zs.points;
  out.degenerate = zs.degenerate;
  if (bundle.s1.size() > 0) {
    const auto spec = joint_spectrum_taylor(validate_pair(bundle.s1, bundle.s2, {false, false}, tol), seed, tol);
    out.degenerate = out.degenerate || spec.degenerate;
    for (const auto& p : spec.points) out.lower_boundary.push_back({p.lambda, p.mu});
  }
  const Poly2 p = unit(variety.p);
  for (const auto& q : out.lower_boundary) out.variety_residual = std::max(out.variety_residual, std::abs(p(q.z, q.w)));
  for (const auto& q : out.inner_set) out.variety_residual = std::max(out.variety_residual, std::abs(p(q.z, q.w)));
  out.set_distance = hausdorff(out.inner_set, out.lower_boundary);
  return out;
}

CertificateEntry support_entry(const SupportBounds& bounds, const Tolerances& tol) {
  CertificateEntry e;
  e.name = "support_sandwich";
  e.anchor = "sigma(S1,S2) in supp(Ann(T1,T2)) in closure(V_Psi); supp(F) cap D^2 = Z(F)";
  e.margin = std::max(bounds.set_distance, bounds.variety_residual);
  const bool ok = bounds.set_distance <= tol.match && bounds.variety_residual <= tol.zset;
  e.status = bounds.degenerate ? Status::inconclusive : (ok ? Status::pass : Status::fail);
  e.data = {{"inner_set", points_json(bounds.inner_set)},
            {"lower_boundary", points_json(bounds.lower_boundary)},
            {"set_distance", bounds.set_distance},
            {"variety_residual", bounds.variety_residual}};
  return e;
}

SynthesisConditions synthesis_conditions(const CommutingPair& pair, const CoextensionBundle& bundle,
                                         const AnnihilatorBasis& basis, const Tolerances& tol) {
  (void)pair;
  if (bundle.m1.degree() == 0) throw Error(ErrorCode::AnnTrivial, "Ann(T1) is trivial");
  SynthesisConditions out;
  const auto om = omega_psi(bundle, tol);
  out.kpsi_dimension = bundle.kpsi_dimension();
  if (!om.witnesses.empty()) {
    Matrix all(bundle.kpsi_basis.cols(), 0);
    for (const auto& w : om.witnesses) {
      Matrix grown(all.rows(), all.cols() + w.cols());
      grown << all, w;
      all = std::move(grown);
    }
    constexpr double kSpanThreshold = 1e-6;
    out.witness_rank = numerical_rank(all, kSpanThreshold);
    Eigen::JacobiSVD<Matrix> svd(all);
    for (int i = 0; i < svd.singularValues().size(); ++i) {
      const double s = svd.singularValues()(i);
      if (s > kSpanThreshold / 10.0 && s < kSpanThreshold * 10.0) out.conclusive = false;
    }
  }
  out.eigenvectors_span = out.witness_rank == out.kpsi_dimension;

  const auto van = box_vanishing(basis.box, om.points, tol);
  out.ann_box_dimension = basis.kernel.dimension();
  out.vanishing_box_dimension = van.dimension();
  out.containment = basis.kernel.dimension() == 0
                        ? 0.0
                        : op_norm(basis.kernel.basis - van.basis * (van.basis.adjoint() * basis.kernel.basis));
  out.vanishing_ideal = out.ann_box_dimension == out.vanishing_box_dimension && out.containment <= 1e-6;

  out.simple_roots = has_simple_roots(bundle.m1, tol.simple_sep);
  out.radical = out.simple_roots;
  out.conclusive = out.conclusive && van.conclusive && basis.conclusive && bundle.conclusive && !om.degenerate &&
                   !basis.degenerate;
  return out;
}

std::vector<CertificateEntry> synthesis_report(const CommutingPair& pair, const CoextensionBundle& bundle,
                                               const AnnihilatorBasis& basis, const Tolerances& tol) {
  const auto c = synthesis_conditions(pair, bundle, basis, tol);
  CertificateEntry e;
  e.name = "spectral_synthesis";
  e.anchor = "eigenvectors of (S1*,S2*) span K_Psi <=> Ann(T1,T2) = I(Omega_Psi) <=> Ann(T1) radical <=> m1 has simple roots";
  e.margin = static_cast<double>(c.kpsi_dimension - c.witness_rank);
  if (!c.conclusive)
    e.status = Status::inconclusive;
  else
    e.status = c.unanimous() ? Status::pass : Status::fail;
  e.data = {{"eigenvectors_span", c.eigenvectors_span},
            {"vanishing_ideal_box_level", c.vanishing_ideal},
            {"radical", c.radical},
            {"simple_roots", c.simple_roots},
            {"witness_rank", c.witness_rank},
            {"kpsi_dimension", c.kpsi_dimension},
            {"ann_box_dimension", c.ann_box_dimension},
            {"vanishing_box_dimension", c.vanishing_box_dimension},
            {"containment", c.containment}};
  return {e};
}

CertificateEntry check_annihilator_invariance(const CoextensionBundle& bundle, const AnnihilatorBasis& basis,
                                              const Tolerances& tol) {
  CertificateEntry e;
  e.name = "annihilator_invariance";
  e.anchor = "Ann(S1,S2) = Ann(T1,T2)";
  if (bundle.s1.size() == 0) {
    e.status = Status::fail;
    e.margin = std::numeric_limits<double>::infinity();
    return e;
  }
  const auto ks = box_annihilator(basis.box, bundle.s1, bundle.s2, tol);
  e.margin = subspace_distance(basis.kernel.basis, ks.basis);
  double gen_residual = 0.0;
  for (const auto& g : basis.generators) gen_residual = std::max(gen_residual, op_norm(poly_apply(g, bundle.s1, bundle.s2)));
  const bool ok = e.margin <= 1e-7 && gen_residual <= 1e-7;
  if (!ok)
    e.status = Status::fail;
  else
    e.status = ks.conclusive && basis.conclusive ? Status::pass : Status::inconclusive;
  e.data = {{"pair_box_dimension", basis.kernel.dimension()},
            {"compressed_box_dimension", ks.dimension()},
            {"generator_residual_on_compression", gen_residual}};
  return e;
}

}  // namespace distvar
