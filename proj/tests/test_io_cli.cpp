#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "distvar/cli.hpp"
#include "distvar/instance.hpp"
#include "distvar/io.hpp"
#include "distvar/linalg.hpp"
#include "test_util.hpp"

using namespace distvar;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("distvar_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const json& j) { write_file_atomic(p.string(), dump(j)); }

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "distvar");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

MatrixInnerFunction scalar_z() {
  return from_colligation(Matrix::Zero(1, 1), Matrix::Ones(1, 1), Matrix::Ones(1, 1), Matrix::Zero(1, 1));
}

json sqrt_psi_json() {
  PolynomialMatrix pm{{{Poly1(), Poly1::monomial(1)}, {Poly1::constant(1.0), Poly1()}}};
  return psi_to_json(from_polynomial_matrix(pm));
}

json recipe(const BlaschkeProduct& theta) { return recipe_to_json({theta, scalar_z()}); }

Status entry_status(const json& report, const std::string& name) {
  for (const auto& e : report.at("entries"))
    if (e.at("name") == name) return status_from_string(e.at("status").get<std::string>());
  ADD_FAILURE() << "missing entry " << name;
  return Status::fail;
}

}  // namespace

TEST(Json, MatrixAndPolynomialRoundTrip) {
  std::mt19937_64 rng(1);
  const Matrix m = random_gaussian(3, 2, rng);
  EXPECT_EQ(matrix_from_json(matrix_to_json(m)), m);
  const Poly1 p({Complex(1, 2), 0.0, Complex(-0.5, 0.25)});
  EXPECT_EQ(poly1_from_json(poly1_to_json(p)).coeffs(), p.coeffs());
  const Poly2 q = testutil::random_poly2(rng, 2, 3);
  EXPECT_EQ(poly2_from_json(poly2_to_json(q)).coeffs(), q.coeffs());
  const BlaschkeProduct b({{0.3, 2}, {Complex(0, -0.1), 1}}, std::polar(1.0, 0.7));
  const auto b2 = blaschke_from_json(blaschke_to_json(b));
  EXPECT_EQ(b2.roots_with_multiplicity(), b.roots_with_multiplicity());
  EXPECT_EQ(b2.unimodular(), b.unimodular());
}

TEST(Json, InnerFunctionsRoundTrip) {
  std::mt19937_64 rng(2);
  std::vector<MatrixInnerFunction> all{random_colligation_psi(2, 2, rng),
                                       from_polynomial_matrix({{{Poly1(), Poly1::monomial(1)}, {Poly1::constant(1.0), Poly1()}}}),
                                       scalar_blaschke_times_identity(BlaschkeProduct({{0.4, 1}, {-0.2, 1}}), 2)};
  for (const auto& psi : all) {
    const json j = psi_to_json(psi);
    const auto back = psi_from_json(j);
    EXPECT_EQ(std::string(back.kind()), std::string(psi.kind()));
    EXPECT_EQ(dump(psi_to_json(back)), dump(j));
    for (Complex z : {Complex(0.2, 0.1), Complex(0, 1)}) EXPECT_LT((back.eval(z) - psi.eval(z)).norm(), 1e-15);
  }
}

TEST(Json, ReportRoundTrip) {
  CertificateReport r;
  r.instance_id = "x";
  r.seed = 42;
  r.tolerances = Tolerances().table();
  r.entries.push_back({"a", "p(T) = 0", Status::pass, 1e-12, {{"k", 1}}});
  r.entries.push_back({"b", "x", Status::inconclusive, 0.5, json::object()});
  const json j = report_to_json(r);
  const auto back = report_from_json(j);
  EXPECT_EQ(dump(report_to_json(back)), dump(j));
  EXPECT_EQ(back.overall(), Status::inconclusive);
  const std::string csv = report_to_csv(r);
  EXPECT_NE(csv.find("a,pass,"), std::string::npos);
}

TEST(Json, MalformedInputIsInvalid) {
  try {
    psi_from_json(json{{"kind", "nonsense"}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
  try {
    matrix_from_json(json{{1, 2}, {3}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidInput);
  }
}

TEST(Tolerances, ParsingAndUnknownNames) {
  const auto t = parse_tolerances({"match=1e-5", "rank=2e-7"});
  EXPECT_EQ(t.match, 1e-5);
  EXPECT_EQ(t.rank, 2e-7);
  EXPECT_THROW(parse_tolerances({"nonsense=1"}), Error);
  EXPECT_THROW(parse_tolerances({"match"}), Error);
  const auto g = parse_grid(512, "16x64");
  EXPECT_EQ(g.boundary, 512);
  EXPECT_EQ(g.radii, 16);
  EXPECT_EQ(g.angles, 64);
  EXPECT_THROW(parse_grid(512, "16by64"), Error);
}

TEST(ExitCodes, Policy) {
  EXPECT_EQ(exit_code(Status::pass), 0);
  EXPECT_EQ(exit_code(Status::fail), 1);
  EXPECT_EQ(exit_code(Status::inconclusive), 3);
}

TEST(CmdVariety, SquareRootFunction) {
  const auto dir = scratch("variety_sqrt");
  write(dir / "psi.json", sqrt_psi_json());
  EXPECT_EQ(run({"variety", (dir / "psi.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64"}),
            0);
  const json v = read_json_file((dir / "out" / "variety.json").string());
  const Poly2 p = poly2_from_json(v.at("p"));
  EXPECT_LT(unit_distance(p, Poly2::w() * Poly2::w() - Poly2::z()), 1e-8);
  EXPECT_TRUE(fs::exists(dir / "out" / "samples.csv"));
  EXPECT_NE(slurp(dir / "out" / "variety.svg").find("<svg"), std::string::npos);
}

TEST(CmdVariety, ConstantUnitaryIsNotDistinguished) {
  const auto dir = scratch("variety_const");
  write(dir / "psi.json", psi_to_json(from_colligation(Matrix(0, 0), Matrix(0, 1), Matrix(1, 0), Matrix::Ones(1, 1))));
  EXPECT_EQ(run({"variety", (dir / "psi.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64"}),
            1);
}

TEST(CmdVariety, ScalarBlaschkeSquare) {
  const auto dir = scratch("variety_z2");
  write(dir / "psi.json", psi_to_json(scalar_blaschke_times_identity(BlaschkeProduct({{0.0, 2}}), 1)));
  EXPECT_EQ(run({"variety", (dir / "psi.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64"}),
            0);
  const Poly2 p = poly2_from_json(read_json_file((dir / "out" / "variety.json").string()).at("p"));
  EXPECT_TRUE(equal_up_to_unit(p, Poly2::w() - Poly2::monomial(2, 0)));
}

TEST(CmdVariety, MissingFileIsInvalidInput) {
  const auto dir = scratch("variety_missing");
  EXPECT_EQ(run({"variety", (dir / "nope.json").string(), "--out", (dir / "out").string()}), 2);
}

TEST(Cli, ParseErrorsAreInvalidInput) {
  EXPECT_EQ(run({"certify"}), 2);
  EXPECT_EQ(run({"demo", "--format", "xml"}), 2);
  EXPECT_EQ(run({"frobnicate"}), 2);
}

TEST(CmdCertify, DoubleRootRecipe) {
  const auto dir = scratch("certify_double");
  write(dir / "r.json", recipe(BlaschkeProduct({{0.0, 2}})));
  EXPECT_EQ(run({"certify", (dir / "r.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64"}),
            0);
  const json rep = read_json_file((dir / "out" / "report.json").string());
  EXPECT_EQ(entry_status(rep, "zero_set_equals_omega"), Status::pass);
  EXPECT_EQ(entry_status(rep, "spectral_synthesis"), Status::pass);
  for (const auto& e : rep.at("entries"))
    if (e.at("name") == "spectral_synthesis") {
      EXPECT_FALSE(e.at("data").at("eigenvectors_span").get<bool>());
      EXPECT_FALSE(e.at("data").at("simple_roots").get<bool>());
    }
  EXPECT_TRUE(fs::exists(dir / "out" / "bundle.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "variety.json"));
}

TEST(CmdCertify, SimpleRootRecipe) {
  const auto dir = scratch("certify_simple");
  write(dir / "r.json", recipe(BlaschkeProduct({{0.0, 1}, {0.5, 1}})));
  EXPECT_EQ(run({"certify", (dir / "r.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64", "--format", "csv"}),
            0);
  const std::string csv = slurp(dir / "out" / "report.csv");
  EXPECT_NE(csv.find("spectral_synthesis,pass"), std::string::npos);
  EXPECT_NE(csv.find("zero_set_equals_omega,pass"), std::string::npos);
}

TEST(CmdCertify, NonPurePairIsInvalid) {
  const auto dir = scratch("certify_nonpure");
  PairFile pf{testutil::j2(), Matrix::Identity(2, 2), true};
  write(dir / "p.json", pair_to_json(pf));
  EXPECT_EQ(run({"certify", (dir / "p.json").string(), "--out", (dir / "out").string()}), 2);
}

TEST(CmdCertify, PairFileWithTolerances) {
  const auto dir = scratch("certify_pair");
  json j = pair_to_json({testutil::j2(), testutil::j2(), true});
  j["tolerances"] = {{"match", 1e-6}};
  write(dir / "p.json", j);
  EXPECT_EQ(run({"certify", (dir / "p.json").string(), "--out", (dir / "out").string(), "--boundary-samples", "256",
                 "--disc-samples", "16x64"}),
            0);
}

TEST(CmdCertify, ByteIdenticalReports) {
  const auto dir = scratch("certify_det");
  write(dir / "r.json", recipe_to_json(random_recipe(derive_seed(3, 1), false)));
  for (const char* o : {"a", "b"})
    run({"certify", (dir / "r.json").string(), "--out", (dir / o).string(), "--seed", "11", "--boundary-samples", "256",
         "--disc-samples", "16x64"});
  EXPECT_EQ(slurp(dir / "a" / "report.json"), slurp(dir / "b" / "report.json"));
  EXPECT_FALSE(slurp(dir / "a" / "report.json").empty());
}

TEST(CmdDemo, PassesAndIsDeterministic) {
  const auto dir = scratch("demo");
  EXPECT_EQ(run({"demo", "--out", (dir / "a").string(), "--seed", "7"}), 0);
  EXPECT_EQ(run({"demo", "--out", (dir / "b").string(), "--seed", "7"}), 0);
  const std::string a = slurp(dir / "a" / "demo_report.json");
  EXPECT_EQ(a, slurp(dir / "b" / "demo_report.json"));
  const json rep = json::parse(a);
  EXPECT_EQ(rep.at("seed").get<std::uint64_t>(), 7u);
  EXPECT_EQ(rep.at("overall"), "pass");
}

TEST(CmdBatch, WritesSummary) {
  const auto dir = scratch("batch");
  const int code = run({"batch", "--count", "4", "--seed", "2", "--out", (dir / "out").string(), "--boundary-samples",
                        "256", "--disc-samples", "16x64"});
  EXPECT_TRUE(code == 0 || code == 1);
  const json s = read_json_file((dir / "out" / "summary.json").string());
  EXPECT_EQ(s.at("count").get<int>(), 4);
  int files = 0;
  for (const auto& f : fs::directory_iterator(dir / "out" / "instances")) files += f.path().extension() == ".json";
  EXPECT_EQ(files, 4);
}
