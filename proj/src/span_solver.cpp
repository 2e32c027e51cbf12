#include "invarion/span_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

SpanResult solve(const CoverInstance& instance, const WordPool& pool,
                 const std::optional<std::size_t>& full, std::size_t tau,
                 const SolveOptions& options, const char* what) {
  SpanResult result;
  result.pool_size = pool.size();
  result.pool_exhaustive = pool.exhaustive();
  CoverResult cover;
  if (full) {
    cover.chosen = {*full};
    cover.optimal = true;
  } else {
    try {
      cover = min_cover(instance, options.mode, options.cover);
    } catch (const InfeasibleError& e) {
      throw InfeasibleError(std::string(what) +
                                ": grid not controlled invariant at this resolution/margin (" +
                                std::to_string(e.uncovered().size()) + " uncovered grid points)",
                            e.uncovered());
    }
  }
  result.solution.tau = tau;
  result.solution.selector = make_selector(instance, cover.chosen);
  for (auto j : cover.chosen) result.solution.words.push_back(pool.control_word(j));
  result.solution.optimal = cover.optimal;
  result.cardinality = result.solution.cardinality();
  return result;
}

bool union_is_full(const std::vector<Bitset>& coverage, std::size_t elements) {
  Bitset all(elements);
  for (const auto& c : coverage) all |= c;
  return all.all();
}

}  // namespace

WordPool pool_of(const std::vector<ControlWord>& words) {
  if (words.empty()) throw InputError("empty word set");
  const std::size_t tau = words.front().horizon();
  std::vector<ControlIndex> flat;
  flat.reserve(words.size() * tau);
  for (const auto& w : words) {
    if (w.horizon() != tau) throw InputError("words of different horizons");
    flat.insert(flat.end(), w.entries.begin(), w.entries.end());
  }
  return WordPool(tau, std::move(flat), false);
}

SpanResult r_inv(const SystemDef& system, const GridRegion& region, std::size_t tau,
                 const SolveOptions& options) {
  if (tau == 0) throw InputError("horizon must be positive");
  const Grid grid = discretize(region);
  const WordPool pool = make_pool(system.alphabet_size(), tau, options.pool);
  CoverageRun run = stay_coverage(system, region, grid, pool, {.stop_at_full = true});
  CoverInstance instance{grid.size(), std::move(run.coverage)};
  return solve(instance, pool, run.full, tau, options, "r_inv");
}

bool feasible_subsystem(const SystemDef& system, const GridRegion& region, std::size_t i,
                        std::span<const double> x, const ControlWord& word) {
  const Grid grid = discretize(region);
  const SubsystemModel model(system, region, grid, i);
  const GridLookup lookup(region, grid);
  const auto e = lookup.nearest(x);
  if (!e) throw InputError("state is not a grid point of the region");
  for (auto u : word.entries) {
    if (u >= model.component_alphabet_size()) throw InputError("control index out of range");
  }
  return model.feasible(word.entries).test(*e);
}

SpanResult r_inv_subsystem(const SystemDef& system, const GridRegion& region, std::size_t tau,
                           std::size_t i, const SolveOptions& options) {
  if (tau == 0) throw InputError("horizon must be positive");
  const Grid grid = discretize(region);
  const SubsystemModel model(system, region, grid, i);
  const WordPool pool = make_pool(model.component_alphabet_size(), tau, options.pool);
  CoverageRun run = subsystem_coverage(model, pool, {.stop_at_full = true});
  CoverInstance instance{grid.size(), std::move(run.coverage)};
  return solve(instance, pool, run.full, tau, options, "r_inv_subsystem");
}

EntropyEstimate entropy_estimate(const std::vector<std::pair<std::size_t, std::size_t>>& values) {
  if (values.empty()) throw InputError("entropy_estimate needs at least one (tau, cardinality)");
  EntropyEstimate out;
  for (const auto& [tau, card] : values) {
    if (tau == 0 || card == 0) throw InputError("tau and cardinality must be positive");
    out.per_tau.push_back(std::log2(static_cast<double>(card)) / static_cast<double>(tau));
  }
  out.best = *std::min_element(out.per_tau.begin(), out.per_tau.end());
  return out;
}

std::vector<ControlWord> concatenate_all(const std::vector<ControlWord>& first,
                                         const std::vector<ControlWord>& second) {
  std::vector<ControlWord> out;
  out.reserve(first.size() * second.size());
  for (const auto& a : first) {
    for (const auto& b : second) out.push_back(concat(a, b));
  }
  return out;
}

bool verify_spanning(const SystemDef& system, const GridRegion& region,
                     const std::vector<ControlWord>& words) {
  const Grid grid = discretize(region);
  const CoverageRun run = stay_coverage(system, region, grid, pool_of(words));
  return union_is_full(run.coverage, grid.size());
}

bool verify_subsystem_spanning(const SystemDef& system, const GridRegion& region, std::size_t i,
                               const std::vector<ControlWord>& words) {
  const Grid grid = discretize(region);
  const SubsystemModel model(system, region, grid, i);
  const CoverageRun run = subsystem_coverage(model, pool_of(words));
  return union_is_full(run.coverage, grid.size());
}

}  // namespace invarion
