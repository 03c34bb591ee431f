#include "distvar/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/LU>

#include "distvar/linalg.hpp"

namespace distvar {

namespace {

nlohmann::json point_json(const BiPoint& p) {
  return {{"z", {p.z.real(), p.z.imag()}}, {"w", {p.w.real(), p.w.imag()}}};
}

nlohmann::json grid_json(const SampleGrid& g) {
  return {{"boundary", g.boundary}, {"radii", g.radii}, {"angles", g.angles}};
}

double boundary_spacing(const VarietySamples& s) {
  const int f = s.fiber_size;
  if (f == 0 || s.boundary.empty()) return 0.0;
  const int count = static_cast<int>(s.boundary.size()) / f;
  double worst = 0.0;
  for (int k = 0; k < count; ++k) {
    const int next = (k + 1) % count;
    std::vector<Complex> a, b;
    for (int i = 0; i < f; ++i) {
      a.push_back(s.boundary[k * f + i].w);
      b.push_back(s.boundary[next * f + i].w);
    }
    const double dz = std::abs(s.boundary[k * f].z - s.boundary[next * f].z);
    worst = std::max({worst, dz, matching_distance(a, b)});
  }
  return worst;
}

Status vn_status(double value, double sup, double slack) {
  const double roundoff = 64.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, value);
  if (value <= sup + roundoff) return Status::pass;
  if (value <= sup + slack) return Status::inconclusive;
  return Status::fail;
}

}  // namespace

VarietySamples sample_variety(const MatrixInnerFunction& psi, const SampleGrid& grid) {
  VarietySamples out;
  out.fiber_size = psi.dimension();
  for (const auto& z : boundary_grid(grid.boundary))
    for (const auto& w : fiber(psi, z)) out.boundary.push_back({z, w});
  for (const auto& z : interior_grid(grid))
    for (const auto& w : fiber(psi, z)) out.interior.push_back({z, w});
  return out;
}

double lipschitz_estimate(const Poly2& q, int n) {
  const Poly2 qz = q.dz(), qw = q.dw();
  double worst = 0.0;
  for (const auto& z : boundary_grid(n))
    for (const auto& w : boundary_grid(n)) worst = std::max(worst, std::abs(qz(z, w)) + std::abs(qw(z, w)));
  return worst;
}

double sup_on_torus(const Poly2& q, int n) {
  double worst = 0.0;
  for (const auto& z : boundary_grid(n))
    for (const auto& w : boundary_grid(n)) worst = std::max(worst, std::abs(q(z, w)));
  return worst;
}

SupEstimate sup_on_variety(const VarietySamples& samples, const Poly2& q, const SampleGrid& grid) {
  SupEstimate out;
  out.grid = grid;
  auto visit = [&](const std::vector<BiPoint>& pts) {
    for (const auto& p : pts) {
      const double v = std::abs(q(p.z, p.w));
      if (v > out.sup) {
        out.sup = v;
        out.argmax = p;
      }
    }
  };
  visit(samples.boundary);
  visit(samples.interior);
  out.spacing = boundary_spacing(samples);
  out.lipschitz = lipschitz_estimate(q);
  out.slack = out.lipschitz * out.spacing + 64.0 * std::numeric_limits<double>::epsilon() * q.norm1();
  return out;
}

SupEstimate sup_on_variety(const VarietyDescription& variety, const Poly2& q, const SampleGrid& grid) {
  return sup_on_variety(sample_variety(variety.psi, grid), q, grid);
}

std::vector<CertificateEntry> vn_report(const CommutingPair& pair, const VarietyDescription& variety,
                                        const std::vector<Poly2>& polys, const SampleGrid& grid,
                                        const Tolerances& tol) {
  std::vector<CertificateEntry> out;
  const Poly2 p = variety.p.is_zero() ? variety.p : variety.p.normalized();
  CertificateEntry def;
  def.name = "defining_polynomial_annihilates";
  def.anchor = "p(T1,T2) = 0";
  def.margin = op_norm(poly_apply(p, pair));
  def.status = def.margin < tol.ann ? Status::pass : Status::fail;
  def.data = {{"norm", def.margin}};
  out.push_back(def);

  const auto samples = sample_variety(variety.psi, grid);
  for (size_t k = 0; k < polys.size(); ++k) {
    const auto est = sup_on_variety(samples, polys[k], grid);
    const double value = op_norm(poly_apply(polys[k], pair));
    CertificateEntry e;
    e.name = "von_neumann_" + std::to_string(k);
    e.anchor = "||q(T1,T2)|| <= sup_{V_Psi} |q|";
    e.margin = est.sup - value;
    e.status = vn_status(value, est.sup, est.slack);
    e.data = {{"operator_norm", value},    {"variety_sup", est.sup},        {"slack", est.slack},
              {"lipschitz", est.lipschitz}, {"spacing", est.spacing},       {"argmax", point_json(est.argmax)},
              {"grid", grid_json(grid)},    {"torus_sup", sup_on_torus(polys[k], 128)}};
    out.push_back(e);
  }
  return out;
}

CertificateEntry vn_rational_entry(const CommutingPair& pair, const VarietySamples& samples, const RationalSymbol2& r,
                                   const SampleGrid& grid, const Tolerances& tol, const std::string& name) {
  double min_den = std::numeric_limits<double>::infinity();
  double sup = 0.0, lip = 0.0;
  const Poly2 nz = r.num.dz(), nw = r.num.dw(), dz = r.den.dz(), dw = r.den.dw();
  auto visit = [&](const std::vector<BiPoint>& pts) {
    for (const auto& p : pts) {
      const Complex dv = r.den(p.z, p.w);
      const double ad = std::abs(dv);
      min_den = std::min(min_den, ad);
      if (ad == 0.0) continue;
      const double nv = std::abs(r.num(p.z, p.w));
      sup = std::max(sup, nv / ad);
      const double g = (std::abs(nz(p.z, p.w)) + std::abs(nw(p.z, p.w))) / ad +
                       nv * (std::abs(dz(p.z, p.w)) + std::abs(dw(p.z, p.w))) / (ad * ad);
      lip = std::max(lip, g);
    }
  };
  visit(samples.boundary);
  visit(samples.interior);
  if (!(min_den > tol.margin_spec))
    throw Error(ErrorCode::DenominatorVanishes, "denominator vanishes on the sampled variety");
  Eigen::FullPivLU<Matrix> lu(poly_apply(r.den, pair));
  if (!lu.isInvertible()) throw Error(ErrorCode::DenominatorVanishes, "denominator is singular at the pair");
  const Matrix value_m = poly_apply(r.num, pair) * lu.inverse();
  const double value = op_norm(value_m);
  const double slack = lip * boundary_spacing(samples);
  CertificateEntry e;
  e.name = name;
  e.anchor = "||r(T1,T2)|| <= sup_{V_Psi} |r|";
  e.margin = sup - value;
  e.status = vn_status(value, sup, slack);
  e.data = {{"operator_norm", value}, {"variety_sup", sup}, {"slack", slack},
            {"min_denominator", min_den}, {"grid", grid_json(grid)}};
  return e;
}

Complex symbol_eval(const ScalarSymbol& phi, Complex z) {
  if (const auto* p = std::get_if<Poly1>(&phi)) return (*p)(z);
  if (const auto* b = std::get_if<BlaschkeProduct>(&phi)) return blaschke_eval(*b, z);
  const auto& r = std::get<Rational1>(phi);
  return r.num(z) / r.den(z);
}

Matrix symbol_apply(const ScalarSymbol& phi, const Matrix& t) {
  if (const auto* p = std::get_if<Poly1>(&phi)) return p->apply(t);
  if (const auto* b = std::get_if<BlaschkeProduct>(&phi)) return blaschke_apply(*b, t);
  const auto& r = std::get<Rational1>(phi);
  Eigen::FullPivLU<Matrix> lu(r.den.apply(t));
  if (!lu.isInvertible()) throw Error(ErrorCode::DenominatorVanishes, "denominator is singular at the matrix");
  return r.num.apply(t) * lu.inverse();
}

bool symbol_is_constant(const ScalarSymbol& phi) {
  if (const auto* p = std::get_if<Poly1>(&phi)) return p->degree() <= 0;
  if (const auto* b = std::get_if<BlaschkeProduct>(&phi)) return b->degree() == 0;
  const auto& r = std::get<Rational1>(phi);
  return r.num.degree() <= 0 && r.den.degree() <= 0;
}

double symbol_sup(const ScalarSymbol& phi, int n) {
  double worst = 0.0;
  for (const auto& z : boundary_grid(n)) worst = std::max(worst, std::abs(symbol_eval(phi, z)));
  return worst;
}

std::vector<CertificateEntry> min_conditions(const CommutingPair& pair, const VarietyDescription& variety,
                                             const ScalarSymbol& phi1, const ScalarSymbol& phi2,
                                             const SampleGrid& grid, const Tolerances& tol) {
  if (symbol_is_constant(phi1) || symbol_is_constant(phi2))
    throw Error(ErrorCode::ConstantSymbol, "symbols must be nonconstant");
  std::vector<CertificateEntry> out;

  CertificateEntry spec;
  spec.name = "spectrum_in_disc";
  spec.anchor = "sigma(T1) in D";
  const double rho = spectral_radius(pair.t1);
  spec.margin = 1.0 - rho;
  spec.status = rho <= 1.0 - tol.margin_spec ? Status::pass : (rho < 1.0 ? Status::inconclusive : Status::fail);
  spec.data = {{"spectral_radius", rho}, {"required_margin", tol.margin_spec}};
  out.push_back(spec);

  CertificateEntry att;
  att.name = "norm_attainment";
  att.anchor = "||phi1(T1) phi2(T2)|| = ||phi1||_D = ||phi2||_D = 1";
  const double s1 = symbol_sup(phi1, grid.boundary);
  const double s2 = symbol_sup(phi2, grid.boundary);
  const double value = op_norm(symbol_apply(phi1, pair.t1) * symbol_apply(phi2, pair.t2));
  const double defect = std::max({std::abs(s1 - 1.0), std::abs(s2 - 1.0), std::abs(value - 1.0)});
  att.margin = defect;
  att.status = defect <= tol.attain ? Status::pass : Status::fail;
  att.data = {{"sup_phi1", s1}, {"sup_phi2", s2}, {"product_norm", value}};
  out.push_back(att);

  const auto dist = distinguished_certificate(variety.psi, grid, tol);
  CertificateEntry minimal;
  minimal.name = "minimal_spectral_set";
  minimal.anchor = "closure(V_Psi) cap D^2-bar is a minimal spectral set for (T1,T2)";
  minimal.status = combine(combine(spec.status, att.status), dist.status);
  minimal.margin = std::min({spec.margin - tol.margin_spec, tol.attain - att.margin, dist.margin});
  minimal.data = {{"distinguished", to_string(dist.status)},
                  {"spectrum_in_disc", to_string(spec.status)},
                  {"norm_attainment", to_string(att.status)},
                  {"note", "minimality is inferred from the verified hypotheses, not computed"}};
  out.push_back(minimal);
  return out;
}

CertificateEntry isometry_variant(const CommutingPair& pair, const Tolerances& tol) {
  const auto n = pair.size();
  const double iso = op_norm(pair.t2.adjoint() * pair.t2 - Matrix::Identity(n, n));
  const double norm_defect = std::abs(op_norm(pair.t1) - 1.0);
  const double rho = spectral_radius(pair.t1);
  const bool iso_ok = iso < tol.unitary;
  const bool norm_ok = norm_defect <= tol.attain;
  const bool spec_ok = rho <= 1.0 - tol.margin_spec;
  CertificateEntry e;
  e.name = "isometry_variant";
  e.anchor = "T2 isometric, ||T1|| = 1, sigma(T1) in D";
  e.status = iso_ok && norm_ok && spec_ok ? Status::pass : Status::fail;
  e.margin = !iso_ok ? iso : (!norm_ok ? norm_defect : 1.0 - rho);
  e.data = {{"isometry_defect", iso},
            {"norm_defect", norm_defect},
            {"spectral_radius", rho},
            {"note", "a matrix isometry is unitary, so the pair is not pure; the certificate concerns the spectral-set claim"}};
  return e;
}

CertificateEntry williams_check(const Matrix& t, const ScalarSymbol& phi, int boundary_n, const Tolerances& tol) {
  const double rho = spectral_radius(t);
  const double value = op_norm(symbol_apply(phi, t));
  const double sup = symbol_sup(phi, boundary_n);
  CertificateEntry e;
  e.name = "williams_minimal_spectral_set";
  e.anchor = "sigma(T) in D and ||phi(T)|| = ||phi||_D = 1";
  e.margin = std::abs(value - 1.0);
  const bool ok = rho < 1.0 - tol.margin_spec && e.margin <= tol.attain && std::abs(sup - 1.0) <= tol.attain;
  e.status = ok ? Status::pass : Status::fail;
  e.data = {{"spectral_radius", rho}, {"phi_norm", value}, {"phi_sup", sup}};
  return e;
}

}  // namespace distvar
