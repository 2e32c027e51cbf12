#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "invarion/cover.hpp"
#include "invarion/kernels.hpp"
#include "invarion/pool.hpp"
#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

struct SolveOptions {
  SolveMode mode = SolveMode::kExact;
  PoolOptions pool;
  CoverOptions cover;
};

struct SpanResult {
  std::size_t cardinality = 0;
  SpanningSolution solution;
  std::size_t pool_size = 0;
  bool pool_exhaustive = false;
};

/// Minimal (τ,Q)-spanning set over the candidate pool of joint words.
/// Throws InfeasibleError when the pool cannot keep every grid point inside.
SpanResult r_inv(const SystemDef& system, const GridRegion& region, std::size_t tau,
                 const SolveOptions& options = {});

/// Whether some choice of the other components' controls keeps the grid state
/// `x` in the interior for the whole word, with component `i` driven by
/// `word`. `x` must be a grid point of `region`.
bool feasible_subsystem(const SystemDef& system, const GridRegion& region, std::size_t i,
                        std::span<const double> x, const ControlWord& word);

/// Minimal set of component-i words that is spanning with the other
/// components' controls free.
SpanResult r_inv_subsystem(const SystemDef& system, const GridRegion& region, std::size_t tau,
                           std::size_t i, const SolveOptions& options = {});

struct EntropyEstimate {
  double best = 0.0;
  std::vector<double> per_tau;
};

/// per_tau[k] = log2(cardinality_k) / τ_k; best is their minimum.
EntropyEstimate entropy_estimate(const std::vector<std::pair<std::size_t, std::size_t>>& values);

/// All concatenations a ⋆ b, a-major.
std::vector<ControlWord> concatenate_all(const std::vector<ControlWord>& first,
                                         const std::vector<ControlWord>& second);

/// Whether `words` (joint) cover every grid point of the region.
bool verify_spanning(const SystemDef& system, const GridRegion& region,
                     const std::vector<ControlWord>& words);

/// Whether component-i `words` cover every grid point with the other
/// components free.
bool verify_subsystem_spanning(const SystemDef& system, const GridRegion& region, std::size_t i,
                               const std::vector<ControlWord>& words);

/// Pool holding exactly the given words (all of the same horizon).
WordPool pool_of(const std::vector<ControlWord>& words);

}  // namespace invarion
