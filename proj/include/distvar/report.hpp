#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "distvar/types.hpp"

namespace distvar {

enum class Status { pass, fail, inconclusive };

const char* to_string(Status status);
Status status_from_string(const std::string& s);
// fail dominates inconclusive, which dominates pass.
Status combine(Status a, Status b);

// One named check. `anchor` is the mathematical statement being checked,
// written as a formula. `margin` is the decisive measured number of the check
// (a residual, a defect, or the slack of an inequality).
struct CertificateEntry {
  std::string name;
  std::string anchor;
  Status status = Status::fail;
  double margin = 0.0;
  nlohmann::json data = nlohmann::json::object();
};

struct CertificateReport {
  std::string instance_id;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
  std::vector<CertificateEntry> entries;

  Status overall() const;
  const CertificateEntry* find(const std::string& name) const;
  void append(const std::vector<CertificateEntry>& more);
};

}  // namespace distvar
