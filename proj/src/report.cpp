#include "distvar/report.hpp"

#include <algorithm>

namespace distvar {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ZeroPolynomial: return "ZeroPolynomial";
    case ErrorCode::SingularInterpolation: return "SingularInterpolation";
    case ErrorCode::PoleHit: return "PoleHit";
    case ErrorCode::NotUnitaryColligation: return "NotUnitaryColligation";
    case ErrorCode::NotPureRealization: return "NotPureRealization";
    case ErrorCode::ResolventSingular: return "ResolventSingular";
    case ErrorCode::SpuriousFactorInDisc: return "SpuriousFactorInDisc";
    case ErrorCode::NonCommuting: return "NonCommuting";
    case ErrorCode::NotContractive: return "NotContractive";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::TruncationNotConverged: return "TruncationNotConverged";
    case ErrorCode::TriangularizationFailed: return "TriangularizationFailed";
    case ErrorCode::NoInnerSolution: return "NoInnerSolution";
    case ErrorCode::AnnTrivial: return "AnnTrivial";
    case ErrorCode::DegenerateCluster: return "DegenerateCluster";
    case ErrorCode::DenominatorVanishes: return "DenominatorVanishes";
    case ErrorCode::ConstantSymbol: return "ConstantSymbol";
    case ErrorCode::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

std::map<std::string, double> Tolerances::table() const {
  return {
      {"root", root},       {"fit", fit},
      {"unitary", unitary}, {"commute", commute},
      {"norm", norm},       {"rank", rank},
      {"eig", eig},         {"calc", calc},
      {"ann", ann},         {"trunc", trunc},
      {"intertwine", intertwine},
      {"kernel", kernel},   {"zset", zset},
      {"match", match},     {"cluster_merge", cluster_merge},
      {"cluster_sep", cluster_sep},
      {"attain", attain},   {"margin_spec", margin_spec},
      {"simple_sep", simple_sep},
  };
}

void Tolerances::set(const std::string& name, double value) {
  std::map<std::string, double*> fields{
      {"root", &root},       {"fit", &fit},
      {"unitary", &unitary}, {"commute", &commute},
      {"norm", &norm},       {"rank", &rank},
      {"eig", &eig},         {"calc", &calc},
      {"ann", &ann},         {"trunc", &trunc},
      {"intertwine", &intertwine},
      {"kernel", &kernel},   {"zset", &zset},
      {"match", &match},     {"cluster_merge", &cluster_merge},
      {"cluster_sep", &cluster_sep},
      {"attain", &attain},   {"margin_spec", &margin_spec},
      {"simple_sep", &simple_sep},
  };
  auto it = fields.find(name);
  if (it == fields.end()) throw Error(ErrorCode::InvalidInput, "unknown tolerance '" + name + "'");
  if (!(value > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance '" + name + "' must be positive");
  *it->second = value;
}

const char* to_string(Status status) {
  switch (status) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::inconclusive: return "inconclusive";
  }
  return "fail";
}

Status status_from_string(const std::string& s) {
  if (s == "pass") return Status::pass;
  if (s == "fail") return Status::fail;
  if (s == "inconclusive") return Status::inconclusive;
  throw Error(ErrorCode::InvalidInput, "unknown status '" + s + "'");
}

Status combine(Status a, Status b) {
  if (a == Status::fail || b == Status::fail) return Status::fail;
  if (a == Status::inconclusive || b == Status::inconclusive) return Status::inconclusive;
  return Status::pass;
}

Status CertificateReport::overall() const {
  Status s = Status::pass;
  for (const auto& e : entries) s = combine(s, e.status);
  return s;
}

const CertificateEntry* CertificateReport::find(const std::string& name) const {
  auto it = std::find_if(entries.begin(), entries.end(),
                         [&](const CertificateEntry& e) { return e.name == name; });
  return it == entries.end() ? nullptr : &*it;
}

void CertificateReport::append(const std::vector<CertificateEntry>& more) {
  entries.insert(entries.end(), more.begin(), more.end());
}

}  // namespace distvar
