#include "distvar/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

namespace distvar {

namespace {

namespace fs = std::filesystem;

std::string join(const std::string& dir, const std::string& name) { return (fs::path(dir) / name).string(); }

void print_error(const Error& e) {
  std::cout << dump({{"error", to_string(e.code())}, {"message", e.what()}});
}

void write_report(const CertificateReport& r, const std::string& dir, const std::string& stem,
                  const std::string& format) {
  if (format == "csv")
    write_file_atomic(join(dir, stem + ".csv"), report_to_csv(r));
  else
    write_file_atomic(join(dir, stem + ".json"), dump(report_to_json(r)));
}

void print_summary(const CertificateReport& r) {
  for (const auto& e : r.entries) std::cout << to_string(e.status) << "  " << e.name << "  margin=" << e.margin << "\n";
  std::cout << "overall: " << to_string(r.overall()) << "\n";
}

Poly1 poly_z(std::initializer_list<Complex> c) { return Poly1(std::vector<Complex>(c)); }

}  // namespace

Tolerances parse_tolerances(const std::vector<std::string>& overrides) {
  Tolerances tol;
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::InvalidInput, "--tol expects name=value, got '" + o + "'");
    double v = 0.0;
    try {
      size_t used = 0;
      v = std::stod(o.substr(eq + 1), &used);
      if (used != o.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidInput, "bad tolerance value in '" + o + "'");
    }
    tol.set(o.substr(0, eq), v);
  }
  return tol;
}

SampleGrid parse_grid(int boundary_samples, const std::string& disc_samples) {
  SampleGrid g;
  if (boundary_samples < 64) throw Error(ErrorCode::InvalidInput, "--boundary-samples must be at least 64");
  g.boundary = boundary_samples;
  const auto x = disc_samples.find('x');
  if (x == std::string::npos) throw Error(ErrorCode::InvalidInput, "--disc-samples expects RxA, e.g. 64x256");
  try {
    g.radii = std::stoi(disc_samples.substr(0, x));
    g.angles = std::stoi(disc_samples.substr(x + 1));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidInput, "--disc-samples expects RxA, e.g. 64x256");
  }
  if (g.radii < 1 || g.angles < 64) throw Error(ErrorCode::InvalidInput, "disc grid too small");
  return g;
}

int cmd_variety(const std::string& psi_file, const CliOptions& opts) {
  MatrixInnerFunction psi;
  Tolerances tol;
  SampleGrid grid;
  try {
    tol = parse_tolerances(opts.tol_overrides);
    grid = parse_grid(opts.boundary_samples, opts.disc_samples);
    psi = psi_from_json(read_json_file(psi_file), tol);
  } catch (const Error& e) {
    print_error(e);
    return 2;
  }
  try {
    const auto var = variety_polynomial(psi, tol);
    const auto cert = distinguished_certificate(psi, grid, tol);
    json out = variety_to_json(var);
    out["distinguished"] = entry_to_json(cert);
    out["seed"] = opts.seed;
    write_file_atomic(join(opts.out_dir, "variety.json"), dump(out));
    const auto samples = sample_variety(psi, grid);
    write_file_atomic(join(opts.out_dir, "samples.csv"), samples_csv(samples, var.p.normalized()));
    write_file_atomic(join(opts.out_dir, "variety.svg"), variety_svg(samples));
    std::cout << to_string(cert.status) << "  distinguished_variety  margin=" << cert.margin << "\n";
    return exit_code(cert.status);
  } catch (const Error& e) {
    print_error(e);
    return 1;
  }
}

int cmd_certify(const std::string& instance_file, const CliOptions& opts) {
  Tolerances tol;
  SampleGrid grid;
  InstanceSpec spec;
  try {
    tol = parse_tolerances(opts.tol_overrides);
    grid = parse_grid(opts.boundary_samples, opts.disc_samples);
    spec = instance_from_json(read_json_file(instance_file), fs::path(instance_file).stem().string(), tol);
  } catch (const Error& e) {
    print_error(e);
    return 2;
  }
  const auto res = run_certify(spec, opts.seed, tol, grid);
  write_report(res.report, opts.out_dir, "report", opts.format);
  if (res.variety) write_file_atomic(join(opts.out_dir, "variety.json"), dump(variety_to_json(*res.variety)));
  if (res.bundle) write_file_atomic(join(opts.out_dir, "bundle.json"), dump(bundle_to_json(*res.bundle)));
  print_summary(res.report);
  return exit_code(res);
}

int cmd_demo(const CliOptions& opts) {
  Tolerances tol;
  SampleGrid grid;
  try {
    tol = parse_tolerances(opts.tol_overrides);
    grid = parse_grid(opts.boundary_samples, opts.disc_samples);
  } catch (const Error& e) {
    print_error(e);
    return 2;
  }
  CertificateReport rep;
  rep.instance_id = "demo-w2-equals-z";
  rep.seed = opts.seed;
  rep.tolerances = tol.table();
  try {
    // Psi(z) = [[0, z], [1, 0]] has det(Psi(z) - wI) = w^2 - z.
    PolynomialMatrix pm{{{Poly1(), poly_z({0.0, 1.0})}, {Poly1::constant(1.0), Poly1()}}};
    const auto psi = from_polynomial_matrix(pm, tol);
    const auto var = variety_polynomial(psi, tol);
    const Poly2 expected = Poly2::w() * Poly2::w() - Poly2::z();
    CertificateEntry ve;
    ve.name = "variety_polynomial";
    ve.anchor = "det(Psi(z) - wI) = w^2 - z";
    ve.margin = unit_distance(var.p, expected);
    ve.status = ve.margin < 1e-8 ? Status::pass : Status::fail;
    ve.data = {{"p", poly2_to_json(var.p)}};
    rep.entries.push_back(ve);
    rep.entries.push_back(distinguished_certificate(psi, grid, tol));

    const auto theta = BlaschkeProduct::from_roots({0.0, 0.0});
    const auto pair = compress_pair(psi, theta, tol);
    rep.append(vn_report(pair, var, {Poly2::z(), Poly2::w(), Poly2::z() * Poly2::w()}, grid, tol));

    const Matrix j2 = (Matrix(2, 2) << 0.0, 1.0, 0.0, 0.0).finished();
    rep.entries.push_back(williams_check(j2, Poly1::monomial(1), grid.boundary, tol));
    Matrix t1 = Matrix::Zero(3, 3);
    t1(0, 1) = 1.0;
    rep.entries.push_back(isometry_variant(validate_pair(t1, Matrix::Identity(3, 3), {true, false}, tol), tol));

    const auto samples = sample_variety(psi, grid);
    write_file_atomic(join(opts.out_dir, "variety.json"), dump(variety_to_json(var)));
    write_file_atomic(join(opts.out_dir, "samples.csv"), samples_csv(samples, var.p.normalized()));
    write_file_atomic(join(opts.out_dir, "variety.svg"), variety_svg(samples));
  } catch (const Error& e) {
    CertificateEntry err;
    err.name = "demo_error";
    err.status = Status::fail;
    err.data = {{"error", to_string(e.code())}, {"message", e.what()}};
    rep.entries.push_back(err);
  }
  write_report(rep, opts.out_dir, "demo_report", opts.format);
  print_summary(rep);
  return exit_code(rep.overall());
}

int cmd_batch(int count, const CliOptions& opts) {
  Tolerances tol;
  SampleGrid grid;
  try {
    if (count < 1) throw Error(ErrorCode::InvalidInput, "--count must be positive");
    tol = parse_tolerances(opts.tol_overrides);
    grid = parse_grid(opts.boundary_samples, opts.disc_samples);
  } catch (const Error& e) {
    print_error(e);
    return 2;
  }
  std::vector<PipelineResult> results(count);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      const auto seed = derive_seed(opts.seed, i);
      InstanceSpec spec;
      spec.id = "instance-" + std::to_string(i);
      spec.source = random_recipe(seed, i % 2 == 1);
      results[i] = run_certify(spec, seed, tol, grid);
      results[i].report.entries.insert(results[i].report.entries.begin(),
                                       CertificateEntry{"recipe", "generator recipe", Status::pass, 0.0,
                                                        recipe_to_json(std::get<Recipe>(spec.source))});
      write_report(results[i].report, join(opts.out_dir, "instances"), spec.id, opts.format);
    }
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), count));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  std::map<std::string, std::map<std::string, int>> table;
  Status overall = Status::pass;
  bool invalid = false;
  for (const auto& r : results) {
    invalid = invalid || r.invalid_input;
    overall = combine(overall, r.report.overall());
    for (const auto& e : r.report.entries) table[e.name][to_string(e.status)]++;
  }
  json summary = {{"count", count}, {"seed", opts.seed}, {"entries", table}, {"overall", to_string(overall)}};
  write_file_atomic(join(opts.out_dir, "summary.json"), dump(summary));
  std::cout << "entry                              pass  fail  inconclusive\n";
  for (const auto& [name, counts] : table) {
    auto get = [&](const char* k) { return counts.count(k) ? counts.at(k) : 0; };
    std::string padded = name;
    padded.resize(std::max<size_t>(name.size(), 34), ' ');
    std::cout << padded << ' ' << get("pass") << "  " << get("fail") << "  " << get("inconclusive") << "\n";
  }
  if (invalid) return 2;
  return exit_code(overall);
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Distinguished varieties and spectral-set certificates for commuting matrix pairs"};
  app.require_subcommand(1);
  CliOptions opts;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--tol", opts.tol_overrides, "Tolerance override name=value (repeatable)");
    sub->add_option("--boundary-samples", opts.boundary_samples, "Boundary circle samples");
    sub->add_option("--disc-samples", opts.disc_samples, "Interior polar grid RxA");
    sub->add_option("--seed", opts.seed, "Seed for all randomized steps");
    sub->add_option("--out", opts.out_dir, "Output directory");
    sub->add_option("--format", opts.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
  };
  std::string file;
  int count = 200;
  auto* variety = app.add_subcommand("variety", "Variety polynomial, samples and plot for an inner function file");
  variety->add_option("psi", file, "Inner function JSON")->required();
  add_common(variety);
  auto* certify = app.add_subcommand("certify", "Full certificate pipeline for a pair file or recipe");
  certify->add_option("instance", file, "Pair or recipe JSON")->required();
  add_common(certify);
  auto* demo = app.add_subcommand("demo", "Worked w^2 = z example");
  add_common(demo);
  auto* batch = app.add_subcommand("batch", "Seeded random recipes through the full pipeline");
  batch->add_option("--count", count, "Number of instances");
  add_common(batch);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  if (*variety) return cmd_variety(file, opts);
  if (*certify) return cmd_certify(file, opts);
  if (*demo) return cmd_demo(opts);
  return cmd_batch(count, opts);
}

}  // namespace distvar
