#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fml {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string detail;
};

// Compact invariant suite over all modules: geometry kernel identities,
// hmin oracle agreement, bound-report inequalities, solver stationarity and
// certificates, report determinism. Seeded and deterministic.
std::vector<VerifyCheck> run_verification(std::uint64_t seed);

}  // namespace fml
