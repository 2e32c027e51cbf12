#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "invarion/bitset.hpp"
#include "invarion/system.hpp"

namespace invarion {

enum class SolveMode { kExact, kGreedy };

/// Set-cover instance: candidate j covers the elements set in coverage[j].
struct CoverInstance {
  std::size_t element_count = 0;
  std::vector<Bitset> coverage;

  std::size_t candidate_count() const { return coverage.size(); }
  /// Elements no candidate covers, ascending.
  std::vector<std::size_t> uncovered() const;
};

struct CoverOptions {
  /// Branch-and-bound node limit; when reached the incumbent is returned with
  /// optimal = false.
  std::uint64_t node_budget = 50'000'000;
};

struct CoverResult {
  /// Chosen candidate indices, ascending.
  std::vector<std::size_t> chosen;
  /// True when the cover is provably minimum.
  bool optimal = false;
  std::uint64_t nodes = 0;
};

/// Minimum (exact) or greedy cover. Ties go to the lowest candidate index, so
/// results do not depend on the thread count. Throws InfeasibleError listing
/// uncovered elements.
CoverResult min_cover(const CoverInstance& instance, SolveMode mode,
                      const CoverOptions& options = {});

/// Selected words plus, for every element, the index of a covering word.
struct SpanningSolution {
  std::size_t tau = 0;
  std::vector<ControlWord> words;
  std::vector<std::uint32_t> selector;
  bool optimal = false;

  std::size_t cardinality() const { return words.size(); }
};

/// Selector over `chosen`: each element maps to the first chosen candidate
/// (in ascending order) covering it. Throws InfeasibleError if one is missing.
std::vector<std::uint32_t> make_selector(const CoverInstance& instance,
                                         const std::vector<std::size_t>& chosen);

}  // namespace invarion
