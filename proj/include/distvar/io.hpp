#pragma once

#include <string>

#include <json.hpp>

#include "distvar/certify.hpp"
#include "distvar/dilation.hpp"
#include "distvar/inner.hpp"
#include "distvar/poly.hpp"
#include "distvar/report.hpp"

namespace distvar {

using nlohmann::json;

// All parsers throw Error(InvalidInput) on malformed input.
json complex_to_json(Complex z);
Complex complex_from_json(const json& j);
// Row-major nested arrays of [re, im].
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const json& j);

json poly1_to_json(const Poly1& p);
Poly1 poly1_from_json(const json& j);
json poly2_to_json(const Poly2& p);
Poly2 poly2_from_json(const json& j);
json blaschke_to_json(const BlaschkeProduct& b);
BlaschkeProduct blaschke_from_json(const json& j);

json psi_to_json(const MatrixInnerFunction& psi);
// kinds: colligation, bp_product, polynomial_matrix, scalar_blaschke_times_identity.
MatrixInnerFunction psi_from_json(const json& j, const Tolerances& tol = {});

struct PairFile {
  Matrix t1, t2;
  bool require_pure = true;
};
json pair_to_json(const PairFile& p);
PairFile pair_from_json(const json& j);

json entry_to_json(const CertificateEntry& e);
CertificateEntry entry_from_json(const json& j);
json report_to_json(const CertificateReport& r);
CertificateReport report_from_json(const json& j);
// One row per entry: name,status,margin,anchor.
std::string report_to_csv(const CertificateReport& r);

json variety_to_json(const VarietyDescription& v);
json bundle_to_json(const CoextensionBundle& b);

// Canonical text: sorted keys, two-space indent, trailing newline.
std::string dump(const json& j);
json read_json_file(const std::string& path);
// Writes to a temporary sibling and renames it into place.
void write_file_atomic(const std::string& path, const std::string& content);

// Columns re_z, im_z, re_w, im_w, abs_q.
std::string samples_csv(const VarietySamples& samples, const Poly2& q);
// Panel 1: arg z against arg w over boundary fibers. Panel 2: interior fiber cloud in the w-plane.
std::string variety_svg(const VarietySamples& samples);

}  // namespace distvar
