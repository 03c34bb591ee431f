#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "distvar/annvar.hpp"
#include "distvar/certify.hpp"
#include "distvar/dilation.hpp"
#include "distvar/io.hpp"

namespace distvar {

// Generator recipe: the pair is the compression of (M_z (x) I, M_psi) to K_theta (x) C^d.
struct Recipe {
  BlaschkeProduct theta;
  MatrixInnerFunction psi;
};

json recipe_to_json(const Recipe& r);
Recipe recipe_from_json(const json& j, const Tolerances& tol = {});

struct InstanceSpec {
  std::string id;
  std::variant<PairFile, Recipe> source;
  std::map<std::string, double> tolerance_overrides;
};

// Objects with "t1"/"t2" are pair files, objects with "theta"/"psi" are recipes.
// An optional "tolerances" object holds overrides.
InstanceSpec instance_from_json(const json& j, const std::string& id, const Tolerances& tol = {});

// splitmix64 of base ^ index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Random theta with zeros |a| <= 0.8 pairwise >= 0.15 apart, degree <= 4; with
// repeated_root one zero is doubled. Psi comes from a Haar unitary colligation
// with state dimension 1..2 and d = 1..3.
Recipe random_recipe(std::uint64_t seed, bool repeated_root);
MatrixInnerFunction random_colligation_psi(int state_dim, int d, std::mt19937_64& rng);

// Throws the validation errors of validate_pair.
CommutingPair realize(const InstanceSpec& spec, const Tolerances& tol);

struct PipelineResult {
  CertificateReport report;
  bool invalid_input = false;
  std::string error;
  std::optional<CommutingPair> pair;
  std::optional<MatrixInnerFunction> psi;
  std::optional<VarietyDescription> variety;
  std::optional<CoextensionBundle> bundle;
};

// validate -> construct Psi -> variety -> co-extension -> annihilator -> checks.
PipelineResult run_certify(const InstanceSpec& spec, std::uint64_t seed, const Tolerances& tol,
                           const SampleGrid& grid);

// 0 all pass, 1 some fail, 2 invalid input, 3 inconclusive without failures.
int exit_code(const PipelineResult& r);
int exit_code(Status overall);

}  // namespace distvar
