#include "distvar/io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

namespace distvar {

namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::InvalidInput, what); }

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) bad(std::string("missing field '") + key + "'");
  return j.at(key);
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

json complex_to_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) bad("expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

json matrix_to_json(const Matrix& m) {
  json out = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(complex_to_json(m(i, k)));
    out.push_back(row);
  }
  return out;
}

Matrix matrix_from_json(const json& j) {
  if (!j.is_array()) bad("matrix must be an array of rows");
  const auto rows = j.size();
  if (rows == 0) return Matrix(0, 0);
  if (!j[0].is_array()) bad("matrix rows must be arrays");
  const auto cols = j[0].size();
  Matrix m(rows, cols);
  for (size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) bad("ragged matrix");
    for (size_t k = 0; k < cols; ++k) m(i, k) = complex_from_json(j[i][k]);
  }
  return m;
}

json poly1_to_json(const Poly1& p) {
  json out = json::array();
  for (const auto& c : p.coeffs()) out.push_back(complex_to_json(c));
  return out;
}

Poly1 poly1_from_json(const json& j) {
  if (!j.is_array()) bad("polynomial must be an array of coefficients");
  std::vector<Complex> c;
  for (const auto& e : j) c.push_back(complex_from_json(e));
  return Poly1(c);
}

json poly2_to_json(const Poly2& p) { return {{"coeffs", matrix_to_json(p.coeffs())}}; }

Poly2 poly2_from_json(const json& j) {
  const Matrix c = matrix_from_json(field(j, "coeffs"));
  if (c.size() == 0) return Poly2();
  return Poly2(c);
}

json blaschke_to_json(const BlaschkeProduct& b) {
  json zs = json::array();
  for (const auto& z : b.zeros()) zs.push_back({{"point", complex_to_json(z.point)}, {"multiplicity", z.multiplicity}});
  return {{"zeros", zs}, {"unimodular", complex_to_json(b.unimodular())}};
}

BlaschkeProduct blaschke_from_json(const json& j) {
  std::vector<BlaschkeZero> zeros;
  for (const auto& z : field(j, "zeros")) {
    BlaschkeZero bz;
    bz.point = complex_from_json(field(z, "point"));
    bz.multiplicity = z.value("multiplicity", 1);
    zeros.push_back(bz);
  }
  const Complex c = j.contains("unimodular") ? complex_from_json(j.at("unimodular")) : Complex(1.0);
  try {
    return BlaschkeProduct(std::move(zeros), c);
  } catch (const Error& e) {
    bad(e.what());
  }
}

json psi_to_json(const MatrixInnerFunction& psi) {
  const auto& rep = psi.representation();
  if (const auto* c = std::get_if<Colligation>(&rep))
    return {{"kind", "colligation"},
            {"a", matrix_to_json(c->a)},
            {"b", matrix_to_json(c->b)},
            {"c", matrix_to_json(c->c)},
            {"d", matrix_to_json(c->d)},
            {"dimension", psi.dimension()}};
  if (const auto* bp = std::get_if<BPProduct>(&rep)) {
    json fs = json::array();
    for (const auto& f : bp->factors)
      fs.push_back({{"zero", complex_to_json(f.zero)},
                    {"projection", matrix_to_json(f.projection)},
                    {"unitary", matrix_to_json(f.unitary)}});
    return {{"kind", "bp_product"}, {"leading", matrix_to_json(bp->leading)}, {"factors", fs}};
  }
  const auto& pm = std::get<PolynomialMatrix>(rep);
  json rows = json::array();
  for (const auto& r : pm.entries) {
    json row = json::array();
    for (const auto& e : r) row.push_back(poly1_to_json(e));
    rows.push_back(row);
  }
  return {{"kind", "polynomial_matrix"}, {"entries", rows}};
}

MatrixInnerFunction psi_from_json(const json& j, const Tolerances& tol) {
  const std::string kind = field(j, "kind").get<std::string>();
  if (kind == "colligation") {
    Matrix a = matrix_from_json(field(j, "a"));
    Matrix b = matrix_from_json(field(j, "b"));
    Matrix c = matrix_from_json(field(j, "c"));
    const Matrix d = matrix_from_json(field(j, "d"));
    if (a.size() == 0) {
      a = Matrix(0, 0);
      b = Matrix(0, d.cols());
      c = Matrix(d.rows(), 0);
    }
    return from_colligation(a, b, c, d, tol);
  }
  if (kind == "bp_product") {
    BPProduct p;
    p.leading = matrix_from_json(field(j, "leading"));
    for (const auto& f : field(j, "factors"))
      p.factors.push_back({complex_from_json(field(f, "zero")), matrix_from_json(field(f, "projection")),
                           matrix_from_json(field(f, "unitary"))});
    return from_bp_product(std::move(p), tol);
  }
  if (kind == "polynomial_matrix") {
    PolynomialMatrix pm;
    for (const auto& row : field(j, "entries")) {
      std::vector<Poly1> r;
      for (const auto& e : row) r.push_back(poly1_from_json(e));
      pm.entries.push_back(r);
    }
    return from_polynomial_matrix(std::move(pm), tol);
  }
  if (kind == "scalar_blaschke_times_identity")
    return scalar_blaschke_times_identity(blaschke_from_json(field(j, "blaschke")), field(j, "d").get<int>());
  bad("unknown inner function kind '" + kind + "'");
}

json pair_to_json(const PairFile& p) {
  return {{"t1", matrix_to_json(p.t1)}, {"t2", matrix_to_json(p.t2)}, {"require_pure", p.require_pure}};
}

PairFile pair_from_json(const json& j) {
  PairFile p;
  p.t1 = matrix_from_json(field(j, "t1"));
  p.t2 = matrix_from_json(field(j, "t2"));
  p.require_pure = j.value("require_pure", true);
  return p;
}

json entry_to_json(const CertificateEntry& e) {
  json margin = std::isfinite(e.margin) ? json(e.margin) : json(nullptr);
  return {{"name", e.name}, {"anchor", e.anchor}, {"status", to_string(e.status)}, {"margin", margin}, {"data", e.data}};
}

CertificateEntry entry_from_json(const json& j) {
  CertificateEntry e;
  e.name = field(j, "name").get<std::string>();
  e.anchor = j.value("anchor", "");
  e.status = status_from_string(field(j, "status").get<std::string>());
  const auto& m = field(j, "margin");
  e.margin = m.is_null() ? std::numeric_limits<double>::infinity() : m.get<double>();
  e.data = j.value("data", json::object());
  return e;
}

json report_to_json(const CertificateReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries) entries.push_back(entry_to_json(e));
  json tols = json::object();
  for (const auto& [k, v] : r.tolerances) tols[k] = v;
  return {{"instance_id", r.instance_id},
          {"seed", r.seed},
          {"tolerances", tols},
          {"entries", entries},
          {"overall", to_string(r.overall())}};
}

CertificateReport report_from_json(const json& j) {
  CertificateReport r;
  r.instance_id = field(j, "instance_id").get<std::string>();
  r.seed = field(j, "seed").get<std::uint64_t>();
  for (const auto& [k, v] : field(j, "tolerances").items()) r.tolerances[k] = v.get<double>();
  for (const auto& e : field(j, "entries")) r.entries.push_back(entry_from_json(e));
  return r;
}

std::string report_to_csv(const CertificateReport& r) {
  std::ostringstream os;
  os << "name,status,margin,anchor\n";
  for (const auto& e : r.entries) os << e.name << ',' << to_string(e.status) << ',' << fmt(e.margin) << ",\"" << e.anchor << "\"\n";
  return os.str();
}

json variety_to_json(const VarietyDescription& v) {
  return {{"psi", psi_to_json(v.psi)},
          {"p", poly2_to_json(v.p)},
          {"degz", v.degz},
          {"degw", v.degw},
          {"fit_residual", v.fit_residual},
          {"cleared_root_modulus", std::isfinite(v.cleared_root_modulus) ? json(v.cleared_root_modulus) : json(nullptr)},
          {"vanishing_residual", v.vanishing_residual},
          {"fiber_match_distance", std::isfinite(v.fiber_match_distance) ? json(v.fiber_match_distance) : json(nullptr)}};
}

json bundle_to_json(const CoextensionBundle& b) {
  json res = json::object();
  for (const auto& [k, v] : b.residuals) res[k] = v;
  return {{"J", matrix_to_json(b.embedding.j)},
          {"n_trunc", b.embedding.n_trunc},
          {"psi", psi_to_json(b.psi)},
          {"m1", blaschke_to_json(b.m1)},
          {"kpsi_basis", matrix_to_json(b.kpsi_basis)},
          {"gram", matrix_to_json(b.jets.gram)},
          {"s1", matrix_to_json(b.s1)},
          {"s2", matrix_to_json(b.s2)},
          {"conclusive", b.conclusive},
          {"residuals", res}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    bad("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error(ErrorCode::InvalidInput, "cannot write '" + path + "'");
    out << content;
  }
  std::filesystem::rename(tmp, target);
}

std::string samples_csv(const VarietySamples& samples, const Poly2& q) {
  std::ostringstream os;
  os << "re_z,im_z,re_w,im_w,abs_q\n";
  auto emit = [&](const std::vector<BiPoint>& pts) {
    for (const auto& p : pts)
      os << fmt(p.z.real()) << ',' << fmt(p.z.imag()) << ',' << fmt(p.w.real()) << ',' << fmt(p.w.imag()) << ','
         << fmt(std::abs(q(p.z, p.w))) << '\n';
  };
  emit(samples.boundary);
  emit(samples.interior);
  return os.str();
}

std::string variety_svg(const VarietySamples& samples) {
  constexpr double kPanel = 300.0, kPad = 20.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << 2 * kPanel + 3 * kPad << "\" height=\""
     << kPanel + 2 * kPad << "\">\n";
  os << "<rect x=\"" << kPad << "\" y=\"" << kPad << "\" width=\"" << kPanel << "\" height=\"" << kPanel
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<text x=\"" << kPad << "\" y=\"14\" font-size=\"12\">arg z vs arg w (boundary fibers)</text>\n";
  const double pi = std::numbers::pi;
  for (const auto& p : samples.boundary) {
    const double x = kPad + (std::arg(p.z) + pi) / (2 * pi) * kPanel;
    const double y = kPad + (pi - std::arg(p.w)) / (2 * pi) * kPanel;
    os << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"0.8\" fill=\"#1f77b4\"/>\n";
  }
  const double ox = 2 * kPad + kPanel;
  os << "<rect x=\"" << ox << "\" y=\"" << kPad << "\" width=\"" << kPanel << "\" height=\"" << kPanel
     << "\" fill=\"none\" stroke=\"#444\"/>\n";
  os << "<circle cx=\"" << ox + kPanel / 2 << "\" cy=\"" << kPad + kPanel / 2 << "\" r=\"" << kPanel / 2
     << "\" fill=\"none\" stroke=\"#999\"/>\n";
  os << "<text x=\"" << ox << "\" y=\"14\" font-size=\"12\">Re/Im w over interior fibers</text>\n";
  for (const auto& p : samples.interior) {
    const double x = ox + (p.w.real() + 1.0) / 2.0 * kPanel;
    const double y = kPad + (1.0 - p.w.imag()) / 2.0 * kPanel;
    os << "<circle cx=\"" << fmt(x) << "\" cy=\"" << fmt(y) << "\" r=\"0.5\" fill=\"#d62728\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace distvar
