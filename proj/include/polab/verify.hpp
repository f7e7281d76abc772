#pragma once

/**
 * Formula-level verification gates: every analytic quantity (incentive rows,
 * the assembled gradient decomposition, the first-order rate predictions,
 * the regime partition, the band center, and exact calibration) is checked
 * against its brute-force oracle at a pinned tolerance. `polab verify` runs
 * these and the acceptance suite reuses them.
 */

#include <cstdint>
#include <string>
#include <vector>

namespace polab {

struct GateResult {
  std::string name;
  double tolerance = 0.0;
  double observed = 0.0;  // worst value seen; pass iff observed <= tolerance
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<GateResult> gates;
  bool all_pass() const {
    for (const auto& g : gates)
      if (!g.pass) return false;
    return true;
  }
};

// Test hook: deliberately corrupt one analytic path so the matching gate
// (and only that gate) must go red.
enum class FaultInjection { None, IncentiveSign };

VerifyReport run_verification(FaultInjection fault = FaultInjection::None,
                              std::uint64_t seed = 20260811);

}  // namespace polab
