// Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero
// when any criterion fails.
#include <chrono>
#include <cstdarg>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "distvar/annvar.hpp"
#include "distvar/certify.hpp"
#include "distvar/dilation.hpp"
#include "distvar/inner.hpp"
#include "distvar/instance.hpp"
#include "distvar/io.hpp"
#include "distvar/linalg.hpp"

using namespace distvar;

namespace {

// Pinned tolerances.
constexpr double kPolyDistance = 1e-8;
constexpr double kAnnihilate = 1e-10;
constexpr double kMatch = 1e-6;
constexpr double kOnVariety = 1e-8;
constexpr double kIsometry = 1e-10;
constexpr double kIntertwine = 1e-7;
constexpr double kBoundaryUnitary = 1e-8;
constexpr double kZannPassRate = 0.95;

constexpr std::uint64_t kBaseSeed = 20240611;
const SampleGrid kGrid{1024, 32, 128};

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
  char buf[1024];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

MatrixInnerFunction scalar_z() {
  return from_colligation(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

MatrixInnerFunction sqrt_psi() {
  PolynomialMatrix pm{{{Poly1(), Poly1::monomial(1)}, {Poly1::constant(1.0), Poly1()}}};
  return from_polynomial_matrix(pm);
}

Poly2 random_poly(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> deg(0, 3);
  std::normal_distribution<double> g(0.0, 1.0);
  const int dz = deg(rng), dw = deg(rng);
  Matrix c(dz + 1, dw + 1);
  for (int i = 0; i <= dz; ++i)
    for (int j = 0; j <= dw; ++j) c(i, j) = Complex(g(rng), g(rng));
  return Poly2(c);
}

// One pipeline run from a recipe through the constrained co-extension.
struct Pipeline {
  Recipe recipe;
  CommutingPair pair;
  MatrixInnerFunction psi;
  AnnihilatorBasis basis;
  CoextensionBundle bundle;
};

Pipeline build(std::uint64_t seed, bool repeated) {
  Pipeline p;
  p.recipe = random_recipe(seed, repeated);
  p.pair = compress_pair(p.recipe.psi, p.recipe.theta);
  p.psi = construct_psi(p.pair, seed).psi;
  p.basis = ann_generators(p.pair);
  p.bundle = constrained_coextension(p.pair, p.psi, p.basis.generators);
  return p;
}

Pipeline build_scalar(const BlaschkeProduct& theta) {
  Pipeline p;
  p.recipe = {theta, scalar_z()};
  p.pair = compress_pair(scalar_z(), theta);
  p.psi = construct_psi(p.pair, 1).psi;
  p.basis = ann_generators(p.pair);
  p.bundle = constrained_coextension(p.pair, p.psi, p.basis.generators);
  return p;
}

Outcome criterion1() {
  const auto psi = sqrt_psi();
  const auto var = variety_polynomial(psi);
  const double dist = unit_distance(var.p, Poly2::w() * Poly2::w() - Poly2::z());
  const auto cert = distinguished_certificate(psi, SampleGrid{});
  const auto pair = compress_pair(psi, BlaschkeProduct({{0.0, 2}}));
  const double res = op_norm(poly_apply(var.p.normalized(), pair));
  const bool ok = dist < kPolyDistance && cert.status == Status::pass && res < kAnnihilate;
  return {ok, fmt("coefficient distance %.2e, distinguished %s, ||p(T1,T2)|| %.2e", dist, to_string(cert.status), res)};
}

Outcome criterion2() {
  int cases = 0, held = 0;
  double worst = -1e300;
  for (int k = 0; k < 50; ++k) {
    const auto rec = random_recipe(derive_seed(kBaseSeed + 2, k), k % 2 == 1);
    const auto pair = compress_pair(rec.psi, rec.theta);
    const auto samples = sample_variety(rec.psi, kGrid);
    std::mt19937_64 rng(derive_seed(kBaseSeed + 20, k));
    for (int q = 0; q < 20; ++q) {
      const Poly2 poly = random_poly(rng);
      const double value = op_norm(poly_apply(poly, pair));
      const auto est = sup_on_variety(samples, poly, kGrid);
      ++cases;
      if (value <= est.sup + est.slack) ++held;
      worst = std::max(worst, (value - est.sup) / std::max(1.0, est.sup));
    }
  }
  return {held == cases, fmt("%d/%d inequalities hold, max relative excess over the sampled sup %.2e", held, cases, worst)};
}

struct ZannTally {
  int total = 0, pass = 0, degenerate = 0, fail = 0;
  int proj_checked = 0, proj_pass = 0;
  int support_checked = 0, support_pass = 0;
  double worst_support_residual = 0.0;
  std::vector<int> failures;
};

ZannTally zann_suite() {
  ZannTally t;
  for (int k = 0; k < 200; ++k) {
    ++t.total;
    const std::uint64_t seed = derive_seed(kBaseSeed + 3, k);
    Pipeline p;
    try {
      p = build(seed, k % 2 == 1);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateCluster) {
        ++t.degenerate;
      } else {
        ++t.fail;
        t.failures.push_back(k);
      }
      continue;
    }
    Tolerances tol;
    tol.match = kMatch;
    const auto eq = check_zann_equals_omega(p.pair, p.bundle, p.basis, seed, tol);
    if (eq.status == Status::pass) {
      ++t.pass;
    } else if (eq.status == Status::inconclusive) {
      ++t.degenerate;
    } else {
      ++t.fail;
      t.failures.push_back(k);
    }
    const auto proj = check_projection(p.pair, p.bundle, tol);
    if (proj.status != Status::inconclusive && p.bundle.conclusive) {
      ++t.proj_checked;
      t.proj_pass += proj.status == Status::pass;
    }
    const auto var = variety_polynomial(p.psi);
    const auto sb = support_bounds(p.pair, p.bundle, var, p.basis, seed, tol);
    if (!sb.degenerate && p.bundle.conclusive) {
      ++t.support_checked;
      const bool ok = sb.set_distance <= kMatch && sb.variety_residual < kOnVariety;
      t.support_pass += ok;
      t.worst_support_residual = std::max(t.worst_support_residual, sb.variety_residual);
    }
  }
  return t;
}

Outcome criterion3(const ZannTally& t) {
  const bool ok = t.fail == 0 && t.pass >= kZannPassRate * t.total;
  std::string d = fmt("%d/%d pass, %d flagged degenerate cluster, %d failed", t.pass, t.total, t.degenerate, t.fail);
  for (int f : t.failures) d += fmt(" #%d", f);
  return {ok, d};
}

Outcome criterion4(const ZannTally& t) {
  return {t.proj_checked > 0 && t.proj_pass == t.proj_checked,
          fmt("%d/%d conclusive instances have projection equal to the zeros of m1", t.proj_pass, t.proj_checked)};
}

Outcome criterion5(const ZannTally& t) {
  return {t.support_checked > 0 && t.support_pass == t.support_checked,
          fmt("%d/%d conclusive instances have inner set = joint spectrum of (S1,S2), max |p| %.2e", t.support_pass,
              t.support_checked, t.worst_support_residual)};
}

Outcome criterion6() {
  int conclusive = 0, unanimous = 0, simple = 0, repeated = 0;
  for (int k = 0; k < 100; ++k) {
    const bool rep = k % 2 == 1;
    Pipeline p;
    try {
      p = build(derive_seed(kBaseSeed + 6, k), rep);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateCluster) continue;
      return {false, fmt("instance %d raised %s", k, e.what())};
    }
    const auto c = synthesis_conditions(p.pair, p.bundle, p.basis);
    if (!c.conclusive) continue;
    ++conclusive;
    if (c.unanimous()) {
      ++unanimous;
      (c.simple_roots ? simple : repeated) += 1;
    }
  }
  const auto dbl = build_scalar(BlaschkeProduct({{0.0, 2}}));
  const auto cd = synthesis_conditions(dbl.pair, dbl.bundle, dbl.basis);
  const bool all_false = cd.unanimous() && !cd.simple_roots;
  const auto smp = build_scalar(BlaschkeProduct({{0.0, 1}, {0.5, 1}}));
  const auto cs = synthesis_conditions(smp.pair, smp.bundle, smp.basis);
  const bool all_true = cs.unanimous() && cs.simple_roots;
  const bool ok = conclusive > 0 && unanimous == conclusive && all_false && all_true;
  return {ok, fmt("%d/%d conclusive instances unanimous (%d all-true, %d all-false); z^2 all-false %s; "
                  "z(z-1/2)/(1-z/2) all-true %s",
                  unanimous, conclusive, simple, repeated, all_false ? "yes" : "no", all_true ? "yes" : "no")};
}

Outcome criterion7() {
  struct ByD {
    int checked = 0, dim_ok = 0, dim_equals_size = 0;
  };
  std::map<int, ByD> by_d;
  int checked = 0, iso_ok = 0, inter_ok = 0, dim_ok = 0, mb_ok = 0, ann_ok = 0;
  for (int k = 0; k < 100; ++k) {
    Pipeline p;
    try {
      p = build(derive_seed(kBaseSeed + 7, k), k % 2 == 1);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateCluster) continue;
      return {false, fmt("instance %d raised %s", k, e.what())};
    }
    if (!p.bundle.conclusive) continue;
    ++checked;
    const auto& r = p.bundle.residuals;
    iso_ok += r.at("isometry_defect") <= kIsometry;
    inter_ok += r.at("intertwining") <= kIntertwine;
    const bool dim = p.bundle.kpsi_dimension() == p.bundle.m1.degree();
    dim_ok += dim;
    auto& bd = by_d[p.psi.dimension()];
    ++bd.checked;
    bd.dim_ok += dim;
    bd.dim_equals_size += p.bundle.kpsi_dimension() == p.pair.size();
    bool mb = false;
    if (p.bundle.s1.size() > 0) {
      const auto ms = minimal_blaschke(p.bundle.s1);
      mb = matching_distance(ms.product.roots_with_multiplicity(), p.bundle.m1.roots_with_multiplicity()) <= kMatch;
    }
    mb_ok += mb;
    ann_ok += check_annihilator_invariance(p.bundle, p.basis).status == Status::pass;
  }
  const bool ok = checked > 0 && iso_ok == checked && inter_ok == checked && dim_ok == checked && mb_ok == checked &&
                  ann_ok == checked;
  std::string d = fmt("%d conclusive: isometry %d, intertwining %d, dim K_Psi = deg m1 %d, m(S1) = m1 %d, "
                      "box annihilators equal %d;",
                      checked, iso_ok, inter_ok, dim_ok, mb_ok, ann_ok);
  for (const auto& [dd, b] : by_d)
    d += fmt(" d=%d: dim = deg m1 on %d/%d, dim = deg(theta)*d on %d/%d;", dd, b.dim_ok, b.checked, b.dim_equals_size,
             b.checked);
  return {ok, d};
}

Outcome criterion8() {
  int ok = 0;
  double worst_defect = 0.0, worst_rho = 0.0;
  std::mt19937_64 rng(kBaseSeed + 8);
  std::uniform_int_distribution<int> sd(1, 2), dd(1, 3);
  for (int k = 0; k < 100; ++k) {
    const auto psi = random_colligation_psi(sd(rng), dd(rng), rng);
    const double defect = boundary_unitarity_defect(psi, 2048);
    double rho = interior_spectral_radius(psi, 1000, 0.999);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int s = 0; s < 1000; ++s) {
      const Complex z = std::polar(std::sqrt(u(rng)) * 0.9999, 2 * M_PI * u(rng));
      rho = std::max(rho, spectral_radius(psi.eval(z)));
    }
    worst_defect = std::max(worst_defect, defect);
    worst_rho = std::max(worst_rho, rho);
    ok += defect < kBoundaryUnitary && rho < 1.0;
  }
  return {ok == 100, fmt("%d/100 inner and pure; max boundary defect %.2e, max interior spectral radius %.12f", ok,
                         worst_defect, worst_rho)};
}

Outcome criterion9() {
  Matrix j2 = Matrix::Zero(2, 2);
  j2(0, 1) = 1.0;
  const bool w1 = williams_check(j2, Poly1::monomial(1)).status == Status::pass;
  const bool w2 = williams_check(Matrix::Constant(1, 1, 0.5), Poly1::monomial(1)).status == Status::fail;
  Matrix t1 = Matrix::Zero(3, 3);
  t1(0, 1) = 1.0;
  const bool iso = isometry_variant(validate_pair(t1, Matrix::Identity(3, 3), {true, false})).status == Status::pass;

  const auto var = variety_polynomial(scalar_z());
  const auto pair = validate_pair(j2, Matrix::Identity(2, 2), {true, false});
  const auto m = min_conditions(pair, var, Poly1::monomial(1), Poly1::monomial(1), SampleGrid{});
  const bool m1 = m[0].status == Status::pass && m[1].status == Status::pass;
  Tolerances tol;
  tol.margin_spec = 0.01;
  const auto near = validate_pair(Matrix::Constant(1, 1, 0.999), Matrix::Identity(1, 1), {true, false});
  const bool m2 = min_conditions(near, var, Poly1::monomial(1), Poly1::monomial(1), SampleGrid{}, tol)[0].status ==
                  Status::inconclusive;
  bool m3 = false;
  try {
    min_conditions(pair, var, Poly1::constant(1.0), Poly1::monomial(1), SampleGrid{});
  } catch (const Error& e) {
    m3 = e.code() == ErrorCode::ConstantSymbol;
  }
  const bool ok = w1 && w2 && iso && m1 && m2 && m3;
  auto yn = [](bool b) { return b ? "ok" : "wrong"; };
  return {ok, fmt("williams(J2,z) %s, williams(1/2,z) %s, isometry_variant %s, min_conditions examples %s/%s/%s",
                  yn(w1), yn(w2), yn(iso), yn(m1), yn(m2), yn(m3))};
}

Outcome criterion10() {
  int same = 0;
  const int runs = 5;
  for (int k = 0; k < runs; ++k) {
    InstanceSpec spec;
    spec.id = "determinism-" + std::to_string(k);
    spec.source = random_recipe(derive_seed(kBaseSeed + 10, k), k % 2 == 1);
    const std::uint64_t seed = 1000 + k;
    const auto a = run_certify(spec, seed, Tolerances{}, kGrid);
    const auto b = run_certify(spec, seed, Tolerances{}, kGrid);
    same += dump(report_to_json(a.report)) == dump(report_to_json(b.report));
  }
  return {same == runs, fmt("%d/%d repeated certify runs byte-identical", same, runs)};
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int n, const char* title, const std::function<Outcome()>& f) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = f();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d (%s): %s [%.1fs]\n", o.pass ? "PASS" : "FAIL", n, title, o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  };
  report(1, "w^2 = z end to end", criterion1);
  report(2, "von Neumann inequality on the variety", criterion2);
  ZannTally tally;
  bool tallied = false;
  auto zann = [&]() -> const ZannTally& {
    if (!tallied) tally = zann_suite();
    tallied = true;
    return tally;
  };
  report(3, "zero set of the annihilator equals Omega_Psi", [&] { return criterion3(zann()); });
  report(4, "projection of Omega_Psi equals zeros of m1", [&] { return criterion4(zann()); });
  report(5, "support sandwich collapses", [&] { return criterion5(zann()); });
  report(6, "spectral synthesis conditions agree", criterion6);
  report(7, "co-extension contracts", criterion7);
  report(8, "inner function certification", criterion8);
  report(9, "hypothesis checkers", criterion9);
  report(10, "determinism", criterion10);
  return failed == 0 ? 0 : 1;
}
