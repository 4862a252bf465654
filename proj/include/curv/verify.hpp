// Identity registry and report generation.
//
// Every library invariant is registered as a named check: an id, an ASCII
// rendering of the identity it exercises (the anchor), a scalar mode, a
// tolerance, and a runner returning a residual.  The suite runner executes a
// filtered selection deterministically (optionally sharded across threads) and
// assembles a byte-reproducible JSON report.  Checks flagged informational are
// emitted with status "reported" and never fail the suite; they document
// measured deviations from circulated formula variants and boundary
// vacuities.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curv/errors.hpp"

namespace curv {

struct CheckResult {
  std::string id;
  std::string anchor;
  std::string mode;  // "rational" (exact) or "float"
  double residual = 0.0;
  double tolerance = 0.0;
  std::string status;  // "pass", "fail", or "reported"
};

struct SuiteConfig {
  std::uint64_t seed = 2026;
  std::string filter;        // regex over check ids; empty selects everything
  std::string mode = "all";  // "all", "rational", or "float"
  int threads = 0;           // 0: use CURV_THREADS if set, else 1
  bool corrupt = false;      // fault injection for harness self-tests
};

struct VerificationReport {
  std::vector<CheckResult> checks;
  int passed = 0;
  int failed = 0;
  int reported = 0;
  std::uint64_t seed = 0;
  std::string mode;
  std::string filter;
};

// Runs the selected checks and assembles the report.  Throws InputError for an
// invalid mode, an invalid filter expression, or a filter matching no check.
VerificationReport run_suite(const SuiteConfig& config);

// Frozen-schema serialization: {"version", "checks", "summary", "environment"}
// with stable field order and no timestamps.
std::string report_to_json(const VerificationReport& report);

// Registered check ids in execution order.
std::vector<std::string> check_ids();

}  // namespace curv
