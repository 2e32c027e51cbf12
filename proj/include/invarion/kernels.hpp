#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "invarion/bitset.hpp"
#include "invarion/pool.hpp"
#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

/// Coverage bitsets of a candidate pool. With early exit, only the prefix of
/// candidates up to (at least) the first full one is evaluated.
struct CoverageRun {
  std::vector<Bitset> coverage;
  /// Lowest candidate index whose bitset is full, if one was seen.
  std::optional<std::size_t> full;
};

struct KernelOptions {
  bool stop_at_full = false;
};

/// Bit e set iff the trajectory from grid element e under `word` passes the
/// region's interior test at steps 1..τ.
Bitset stay_set(const SystemDef& system, const GridRegion& region, const Grid& grid,
                std::span<const ControlIndex> word);

/// Per-candidate stay sets; OpenMP over candidates.
CoverageRun stay_coverage(const SystemDef& system, const GridRegion& region,
                          const Grid& grid, const WordPool& pool,
                          const KernelOptions& options = {});

/// Stay sets of every joint word (a, b) with a from `first` (component 0) and b
/// from `second` (component 1) of a two-component product. Row-major:
/// result[a * second.size() + b].
std::vector<Bitset> pair_coverage(const SystemDef& system, const GridRegion& region,
                                  const Grid& grid, const WordPool& first,
                                  const WordPool& second);

/// Precomputed abstraction for subsystem feasibility: component `i` follows
/// a fixed word while the remaining components range over all their controls,
/// their states snapped to the nearest lattice point after every step.
class SubsystemModel {
 public:
  SubsystemModel(const SystemDef& system, const GridRegion& region, const Grid& grid,
                 std::size_t component);

  std::size_t component() const { return component_; }
  std::size_t element_count() const { return element_cell_.size(); }
  std::uint64_t component_alphabet_size() const { return component_system_.alphabet_size(); }
  std::size_t other_cell_count() const { return other_cells_; }

  /// Feasible elements for `word` (component-i indices), via a backward pass
  /// over lattice cells shared by all elements with the same component-i state.
  Bitset feasible(std::span<const ControlIndex> word) const;

  /// Forward reachable-set evaluation for one element.
  bool feasible_element(std::size_t element, std::span<const ControlIndex> word) const;

 private:
  void trajectory_of_group(std::size_t group, std::span<const ControlIndex> word,
                           std::vector<double>& out) const;
  bool slice_contains(std::span<const double> xi, std::size_t cell,
                      std::vector<double>& scratch) const;

  const GridRegion* region_;
  std::size_t component_;
  SystemDef component_system_;
  std::size_t offset_ = 0;
  std::size_t dim_i_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::size_t> other_axes_;
  std::size_t other_cells_ = 0;
  std::uint64_t other_controls_ = 0;
  std::vector<double> cell_points_;      // other_cells_ × other dim
  std::vector<std::int32_t> next_;       // other_cells_ × other_controls_, -1 = off-lattice
  std::vector<double> group_states_;     // groups × dim_i_
  std::vector<std::vector<std::size_t>> group_elements_;
  std::vector<std::size_t> element_cell_;
  std::vector<std::size_t> element_group_;
};

/// Per-candidate feasible sets; OpenMP over candidates.
CoverageRun subsystem_coverage(const SubsystemModel& model, const WordPool& pool,
                               const KernelOptions& options = {});

/// Serial implementations kept as the baseline for tests and benchmarks.
namespace reference {

CoverageRun stay_coverage(const SystemDef& system, const GridRegion& region,
                          const Grid& grid, const WordPool& pool,
                          const KernelOptions& options = {});

std::vector<Bitset> pair_coverage(const SystemDef& system, const GridRegion& region,
                                  const Grid& grid, const WordPool& first,
                                  const WordPool& second);

/// Uses the forward reachable-set evaluation per element.
CoverageRun subsystem_coverage(const SubsystemModel& model, const WordPool& pool,
                               const KernelOptions& options = {});

}  // namespace reference

}  // namespace invarion
