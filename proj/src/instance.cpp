#include "distvar/instance.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace distvar {

json recipe_to_json(const Recipe& r) { return {{"theta", blaschke_to_json(r.theta)}, {"psi", psi_to_json(r.psi)}}; }

Recipe recipe_from_json(const json& j, const Tolerances& tol) {
  if (!j.contains("theta") || !j.contains("psi")) throw Error(ErrorCode::InvalidInput, "recipe needs theta and psi");
  return {blaschke_from_json(j.at("theta")), psi_from_json(j.at("psi"), tol)};
}

InstanceSpec instance_from_json(const json& j, const std::string& id, const Tolerances& tol) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidInput, "instance must be a JSON object");
  InstanceSpec s;
  s.id = id;
  if (j.contains("t1"))
    s.source = pair_from_json(j);
  else if (j.contains("theta"))
    s.source = recipe_from_json(j, tol);
  else
    throw Error(ErrorCode::InvalidInput, "instance is neither a pair file nor a recipe");
  if (j.contains("tolerances")) {
    for (const auto& [k, v] : j.at("tolerances").items()) {
      if (!v.is_number()) throw Error(ErrorCode::InvalidInput, "tolerance '" + k + "' must be a number");
      s.tolerance_overrides[k] = v.get<double>();
    }
  }
  return s;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base ^ (index * 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

MatrixInnerFunction random_colligation_psi(int state_dim, int d, std::mt19937_64& rng) {
  for (;;) {
    const Matrix g = random_unitary(state_dim + d, rng);
    const Matrix a = g.topLeftCorner(state_dim, state_dim);
    if (spectral_radius(a) > 0.95) continue;
    return from_colligation(a, g.topRightCorner(state_dim, d), g.bottomLeftCorner(d, state_dim),
                            g.bottomRightCorner(d, d));
  }
}

Recipe random_recipe(std::uint64_t seed, bool repeated_root) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int degree = repeated_root ? 2 + static_cast<int>(rng() % 3) : 1 + static_cast<int>(rng() % 4);
  const int distinct = repeated_root ? degree - 1 : degree;
  std::vector<Complex> pts;
  while (static_cast<int>(pts.size()) < distinct) {
    const Complex a = std::polar(0.8 * std::sqrt(unif(rng)), 2.0 * std::numbers::pi * unif(rng));
    bool far = true;
    for (const auto& b : pts) far = far && std::abs(a - b) >= 0.15;
    if (far) pts.push_back(a);
  }
  std::vector<BlaschkeZero> zeros;
  for (const auto& a : pts) zeros.push_back({a, 1});
  if (repeated_root) zeros[rng() % zeros.size()].multiplicity = 2;
  const int state = 1 + static_cast<int>(rng() % 2);
  const int d = 1 + static_cast<int>(rng() % 3);
  Recipe r{BlaschkeProduct(std::move(zeros)), random_colligation_psi(state, d, rng)};
  return r;
}

CommutingPair realize(const InstanceSpec& spec, const Tolerances& tol) {
  if (const auto* p = std::get_if<PairFile>(&spec.source))
    return validate_pair(p->t1, p->t2, {true, p->require_pure}, tol);
  const auto& r = std::get<Recipe>(spec.source);
  return compress_pair(r.psi, r.theta, tol);
}

namespace {

CertificateEntry error_entry(const std::string& stage, const Error& e) {
  CertificateEntry out;
  out.name = "stage_error_" + stage;
  out.anchor = "pipeline stage completed";
  out.status = e.code() == ErrorCode::DegenerateCluster ? Status::inconclusive : Status::fail;
  out.margin = std::numeric_limits<double>::infinity();
  out.data = {{"error", to_string(e.code())}, {"message", e.what()}};
  return out;
}

std::vector<Poly2> vn_polynomials(std::uint64_t seed) {
  std::vector<Poly2> out{Poly2::z(), Poly2::w(), Poly2::z() * Poly2::w()};
  std::mt19937_64 rng(derive_seed(seed, 0x5eed));
  for (int k = 0; k < 3; ++k) out.push_back(Poly2(random_gaussian(4, 4, rng)));
  return out;
}

}  // namespace

PipelineResult run_certify(const InstanceSpec& spec, std::uint64_t seed, const Tolerances& base_tol,
                           const SampleGrid& grid) {
  PipelineResult res;
  Tolerances tol = base_tol;
  auto& rep = res.report;
  rep.instance_id = spec.id;
  rep.seed = seed;
  try {
    for (const auto& [k, v] : spec.tolerance_overrides) tol.set(k, v);
  } catch (const Error& e) {
    res.invalid_input = true;
    res.error = e.what();
    rep.tolerances = tol.table();
    rep.entries.push_back(error_entry("tolerances", e));
    return res;
  }
  rep.tolerances = tol.table();

  std::string stage = "validate";
  try {
    res.pair = realize(spec, tol);
  } catch (const Error& e) {
    res.invalid_input = true;
    res.error = e.what();
    rep.entries.push_back(error_entry(stage, e));
    return res;
  }
  const CommutingPair& pair = *res.pair;

  try {
    CertificateEntry v;
    v.name = "pair_validation";
    v.anchor = "T1 T2 = T2 T1, ||Ti|| <= 1, rho(Ti) < 1";
    v.status = Status::pass;
    v.margin = std::max(pair.commutator_norm, std::max(pair.norms[0], pair.norms[1]) - 1.0);
    v.data = {{"size", pair.size()},
              {"commutator_norm", pair.commutator_norm},
              {"norms", {pair.norms[0], pair.norms[1]}},
              {"purity_margins", {pair.purity_margins[0], pair.purity_margins[1]}},
              {"defect_ranks", {pair.defect_ranks[0], pair.defect_ranks[1]}}};
    rep.entries.push_back(v);

    stage = "construct_psi";
    const auto built = construct_psi(pair, seed, tol);
    res.psi = built.psi;
    CertificateEntry c;
    c.name = "psi_construction";
    c.anchor = "J T2* = M_Psi* J, Psi pure inner";
    c.margin = std::max(built.coefficient_residual, built.intertwining_residual);
    c.status = c.margin <= tol.intertwine ? Status::pass : Status::fail;
    c.data = {{"coefficient_residual", built.coefficient_residual},
              {"intertwining_residual", built.intertwining_residual},
              {"shift_residual", built.shift_residual},
              {"attempts", built.attempts},
              {"dimension", built.psi.dimension()},
              {"kind", built.psi.kind()},
              {"realization_defect", built.psi.realization_defect()}};
    rep.entries.push_back(c);

    CertificateEntry u;
    u.name = "inner_certification";
    u.anchor = "Psi unitary on T, sigma(Psi(lambda)) in D";
    const double bdef = boundary_unitarity_defect(built.psi, grid.boundary);
    const double irho = interior_spectral_radius(built.psi, 1000, 1.0 - 1e-9);
    u.margin = bdef;
    u.status = bdef <= tol.unitary && irho < 1.0 ? Status::pass : Status::fail;
    u.data = {{"boundary_unitarity_defect", bdef}, {"interior_spectral_radius", irho}};
    rep.entries.push_back(u);

    stage = "variety";
    res.variety = variety_polynomial(built.psi, tol);
    const auto& var = *res.variety;
    CertificateEntry vc;
    vc.name = "variety_consistency";
    vc.anchor = "V_Psi = {det(Psi(z) - wI) = 0}";
    vc.margin = std::max(var.vanishing_residual, var.fiber_match_distance);
    vc.status = var.vanishing_residual <= tol.zset && var.fiber_match_distance <= tol.match ? Status::pass : Status::fail;
    vc.data = {{"p", poly2_to_json(var.p)},
               {"fit_residual", var.fit_residual},
               {"vanishing_residual", var.vanishing_residual},
               {"fiber_match_distance", var.fiber_match_distance}};
    rep.entries.push_back(vc);
    rep.entries.push_back(distinguished_certificate(built.psi, grid, tol));

    stage = "annihilator";
    const auto basis = ann_generators(pair, tol);
    CertificateEntry ag;
    ag.name = "annihilator_generators";
    ag.anchor = "g(T1,T2) = 0 for every generator";
    ag.margin = basis.max_residual;
    ag.status = basis.max_residual <= tol.ann ? Status::pass : Status::fail;
    json gens = json::array();
    for (const auto& g : basis.generators) gens.push_back(poly2_to_json(g));
    ag.data = {{"box", {basis.box.box_z(), basis.box.box_w()}},
               {"box_kernel_dimension", basis.kernel.dimension()},
               {"generators", gens},
               {"m1", blaschke_to_json(basis.m1)},
               {"m2", blaschke_to_json(basis.m2)}};
    rep.entries.push_back(ag);

    stage = "coextension";
    res.bundle = constrained_coextension(pair, built.psi, basis.generators, tol);
    const auto& bundle = *res.bundle;
    CertificateEntry cx;
    cx.name = "coextension_contracts";
    cx.anchor = "J*J = I, J T1* = (M_z* (x) I) J, J T2* = M_Psi* J, S1 S2 = S2 S1, rho(Si) < 1";
    const auto& r = bundle.residuals;
    const double comm = r.count("commutator") ? r.at("commutator") : 0.0;
    const double rho1 = r.count("rho_s1") ? r.at("rho_s1") : 0.0;
    const double rho2 = r.count("rho_s2") ? r.at("rho_s2") : 0.0;
    const bool ok = r.at("isometry_defect") <= tol.trunc && r.at("intertwining") <= tol.intertwine &&
                    comm <= tol.commute && rho1 < 1.0 && rho2 < 1.0 && bundle.kpsi_dimension() > 0;
    cx.margin = std::max(r.at("intertwining"), comm);
    cx.status = ok ? Status::pass : Status::fail;
    json rj = json::object();
    for (const auto& [k, v] : r) rj[k] = v;
    cx.data = {{"residuals", rj}, {"n_trunc", bundle.embedding.n_trunc}};
    rep.entries.push_back(cx);

    CertificateEntry kd;
    kd.name = "kpsi_dimension";
    kd.anchor = "dim K_Psi = deg m1";
    kd.margin = static_cast<double>(bundle.kpsi_dimension() - bundle.m1.degree());
    kd.status = kd.margin == 0.0 ? (bundle.conclusive ? Status::pass : Status::inconclusive) : Status::fail;
    kd.data = {{"kpsi_dimension", bundle.kpsi_dimension()},
               {"deg_m1", bundle.m1.degree()},
               {"pair_size", pair.size()},
               {"d", built.psi.dimension()}};
    rep.entries.push_back(kd);

    rep.append(verify_coextension(bundle, tol));

    stage = "zero_sets";
    rep.entries.push_back(check_zann_equals_omega(pair, bundle, basis, seed, tol));
    rep.entries.push_back(check_projection(pair, bundle, tol));
    rep.entries.push_back(support_entry(support_bounds(pair, bundle, var, basis, seed, tol), tol));
    rep.append(synthesis_report(pair, bundle, basis, tol));
    rep.entries.push_back(check_annihilator_invariance(bundle, basis, tol));

    stage = "spectral_set";
    rep.append(vn_report(pair, var, vn_polynomials(seed), grid, tol));
  } catch (const Error& e) {
    res.error = e.what();
    rep.entries.push_back(error_entry(stage, e));
  }
  return res;
}

int exit_code(Status overall) {
  switch (overall) {
    case Status::pass: return 0;
    case Status::inconclusive: return 3;
    default: return 1;
  }
}

int exit_code(const PipelineResult& r) {
  if (r.invalid_input) return 2;
  return exit_code(r.report.overall());
}

}  // namespace distvar
