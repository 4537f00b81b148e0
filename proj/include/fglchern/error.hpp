#pragma once

#include <stdexcept>
#include <string>

namespace fglchern {

/// Engine error. `witness` carries a canonically rendered element or token
/// position when the failure has one; it is empty otherwise.
class Error : public std::runtime_error {
 public:
  explicit Error(std::string msg, std::string witness = "")
      : std::runtime_error(witness.empty() ? msg : msg + " [" + witness + "]"),
        witness_(std::move(witness)) {}

  const std::string& witness() const { return witness_; }

 private:
  std::string witness_;
};

}  // namespace fglchern
