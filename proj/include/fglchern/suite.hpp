#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "fglchern/fgl.hpp"
#include "fglchern/gysin.hpp"
#include "fglchern/report.hpp"

namespace fglchern {

struct SuiteOptions {
  int cap = 6;
  unsigned seed = 20260818;
  int jobs = 1;
};

/// Shared state for suite checks: the options, a per-check deterministic RNG,
/// and a cache of the expensive universal law (one instance per cap).
class SuiteContext {
 public:
  explicit SuiteContext(SuiteOptions opt) : opt_(opt) {}

  int cap() const { return opt_.cap; }
  const SuiteOptions& options() const { return opt_; }

  /// Deterministic stream salted by the check's name, so results never
  /// depend on scheduling order or worker count.
  std::mt19937 rng_for(const std::string& name) const;

  /// The universal law at `cap`, built once and shared. Thread-safe.
  const FormalGroupLaw& universal(int cap);

 private:
  SuiteOptions opt_;
  std::mutex mu_;
  std::map<int, FormalGroupLaw> universal_;
};

/// One named suite check. Oracles run first; when any oracle fails, every
/// check marked `gated` is skipped (the residue-rule pushforwards are only
/// trusted while their independent oracles hold).
struct SuiteCheck {
  std::string name;
  bool oracle = false;
  bool gated = false;
  std::function<CheckResult(SuiteContext&)> fn;
};

/// The complete built-in identity suite (selected on the command line with
/// --suite paper): formal-group-law axioms and series identities, Chern-class
/// algebra, pushforward and Thom-class identities, and the Todd-class and
/// Riemann-Roch comparisons.
std::vector<SuiteCheck> builtin_suite();

/// Runs checks in two phases (oracles first, the rest optionally in
/// parallel); reports come back in declaration order regardless of jobs.
/// Skipped checks carry the failing oracle names in their witness.
std::vector<Report> run_suite(const std::vector<SuiteCheck>& checks,
                              const SuiteOptions& options);

}  // namespace fglchern
