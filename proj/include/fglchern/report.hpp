#pragma once

#include <string>
#include <vector>

namespace fglchern {

/// Outcome of one named identity check.
struct Report {
  enum class Status { Pass, Fail, Skipped };

  std::string check;
  Status status = Status::Fail;
  int cap = 0;
  std::string witness;  // empty on pass; residue or reason otherwise
  long long elapsed_ms = 0;
};

/// "pass", "fail", or "skipped".
std::string status_name(Report::Status s);

bool any_failed(const std::vector<Report>& reports);

/// One line per report, each newline-terminated:
///   PASS <name> (cap N)
///   FAIL <name> (cap N) [witness]
///   SKIP <name> (cap N) [witness]
std::string emit_text(const std::vector<Report>& reports);

/// Compact single-line JSON document (newline-terminated):
///   {"version":"1","cap_default":N,"reports":[
///     {"check":...,"status":...,"cap":...,"witness":...,"elapsed_ms":...}]}
/// Key order is fixed as written; witness is null when empty.
std::string emit_json(const std::vector<Report>& reports, int cap_default);

}  // namespace fglchern
