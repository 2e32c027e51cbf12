#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace invarion {

struct PropertyResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<PropertyResult> results;

  bool all_passed() const;
  std::size_t failures() const;
};

/// Randomized and exhaustive property checks across every module, on small
/// seeded instances. `trials` scales the randomized parts.
VerifyReport run_property_suites(std::uint64_t seed, std::size_t trials = 10);

}  // namespace invarion
