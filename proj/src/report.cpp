#include "fglchern/report.hpp"

#include <json.hpp>

namespace fglchern {

std::string status_name(Report::Status s) {
  switch (s) {
    case Report::Status::Pass:
      return "pass";
    case Report::Status::Fail:
      return "fail";
    case Report::Status::Skipped:
      return "skipped";
  }
  return "fail";
}

bool any_failed(const std::vector<Report>& reports) {
  for (const auto& r : reports) {
    if (r.status != Report::Status::Pass) return true;
  }
  return false;
}

std::string emit_text(const std::vector<Report>& reports) {
  std::string out;
  for (const auto& r : reports) {
    switch (r.status) {
      case Report::Status::Pass:
        out += "PASS";
        break;
      case Report::Status::Fail:
        out += "FAIL";
        break;
      case Report::Status::Skipped:
        out += "SKIP";
        break;
    }
    out += " " + r.check + " (cap " + std::to_string(r.cap) + ")";
    if (!r.witness.empty()) out += " [" + r.witness + "]";
    out += "\n";
  }
  return out;
}

std::string emit_json(const std::vector<Report>& reports, int cap_default) {
  nlohmann::ordered_json doc;
  doc["version"] = "1";
  doc["cap_default"] = cap_default;
  doc["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) {
    nlohmann::ordered_json entry;
    entry["check"] = r.check;
    entry["status"] = status_name(r.status);
    entry["cap"] = r.cap;
    if (r.witness.empty()) {
      entry["witness"] = nullptr;
    } else {
      entry["witness"] = r.witness;
    }
    entry["elapsed_ms"] = r.elapsed_ms;
    doc["reports"].push_back(std::move(entry));
  }
  return doc.dump() + "\n";
}

}  // namespace fglchern
