#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "invarion/cover.hpp"
#include "invarion/pool.hpp"
#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

/// One finite-time entropy vector with its product witness S₁×⋯×Sₙ.
struct FrontierPoint {
  std::vector<double> rates;                      // log2 #S_c / τ
  std::vector<std::vector<ControlWord>> witness;  // per-component word sets
};

struct EntropyFrontier {
  std::size_t tau = 0;
  std::vector<FrontierPoint> points;
  /// Exhaustive over all subsets of the pools (small instances only).
  bool exact = false;
  /// Set for n > 2, where only a greedy sweep is run.
  bool upper_bound_only = false;
  std::vector<std::string> diagnostics;
};

struct FrontierOptions {
  SolveMode mode = SolveMode::kExact;
  CoverOptions cover;
  /// Request full enumeration (needs ≤ 64 grid points and pools of ≤ 12 words).
  bool exact = false;
  /// Rounds of alternating re-minimization after each greedy budget.
  std::size_t refine_rounds = 2;
};

struct PivotPoolOptions {
  std::size_t max_words = 256;
  std::uint64_t node_limit = 200'000;  // DFS nodes per element
};

/// Per-component candidate pools for frontier sweeps. Pool c starts with the
/// constant rest word; further words are found by depth-first search (lowest
/// control index first) with component c free and every other component held
/// at its constant rest word, one word per not-yet-covered grid point.
std::vector<WordPool> pivot_pools(const SystemDef& system, const GridRegion& region,
                                  std::size_t tau, const PivotPoolOptions& options = {});

/// Points from per-component budgets, refined and Pareto-filtered. The
/// returned points are achievable (their witnesses are verified covers), so
/// the set upper-bounds the true frontier.
EntropyFrontier frontier(const SystemDef& system, const GridRegion& region, std::size_t tau,
                         const std::vector<WordPool>& pools, const FrontierOptions& options = {});

/// Drops points dominated componentwise (≤ everywhere, < somewhere) and
/// duplicates; keeps the earliest of equal points.
std::vector<FrontierPoint> pareto_filter(std::vector<FrontierPoint> points);

struct MidpointResult {
  FrontierPoint point;  // horizon 2τ, witness of pairwise concatenations
  bool verified = false;
  std::vector<std::size_t> failures;  // grid points the witness misses
};

/// Concatenates witnesses component-wise and checks the product spanning at
/// 2τ from every grid point (trajectories are not snapped at the seam).
MidpointResult concat_midpoint(const SystemDef& system, const GridRegion& region,
                               const FrontierPoint& a, const FrontierPoint& b, std::size_t tau);

/// Whether the product of the per-component word sets covers every grid point.
bool product_covers(const SystemDef& system, const GridRegion& region,
                    const std::vector<std::vector<ControlWord>>& witness);

}  // namespace invarion
