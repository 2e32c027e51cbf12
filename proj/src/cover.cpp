#include "invarion/cover.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

struct WordsHash {
  std::size_t operator()(const std::vector<std::uint64_t>& w) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : w) {
      h ^= x;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Lazy greedy with lowest-index tie-breaking, followed by removal of sets made
// redundant by later picks.
std::vector<std::size_t> greedy_cover(const CoverInstance& inst,
                                      const std::vector<std::size_t>& candidates) {
  using Key = std::pair<std::size_t, std::size_t>;  // (gain, candidate)
  auto less = [](const Key& a, const Key& b) {
    if (a.first != b.first) return a.first < b.first;
    return a.second > b.second;
  };
  std::priority_queue<Key, std::vector<Key>, decltype(less)> heap(less);
  for (auto j : candidates) {
    const auto g = inst.coverage[j].count();
    if (g > 0) heap.emplace(g, j);
  }
  Bitset covered(inst.element_count);
  std::size_t remaining = inst.element_count;
  std::vector<std::size_t> picked;
  while (remaining > 0 && !heap.empty()) {
    Key top = heap.top();
    heap.pop();
    const auto gain = inst.coverage[top.second].count_excluding(covered);
    if (gain == 0) continue;
    if (gain < top.first && !heap.empty() && less(Key{gain, top.second}, heap.top())) {
      heap.emplace(gain, top.second);
      continue;
    }
    picked.push_back(top.second);
    covered |= inst.coverage[top.second];
    remaining -= gain;
  }
  // Multiplicity-based redundancy removal, latest pick first.
  std::vector<std::uint32_t> mult(inst.element_count, 0);
  for (auto j : picked) {
    for (auto e : inst.coverage[j].indices()) ++mult[e];
  }
  std::vector<bool> keep(picked.size(), true);
  for (std::size_t p = picked.size(); p-- > 0;) {
    const auto idx = inst.coverage[picked[p]].indices();
    const bool redundant =
        std::all_of(idx.begin(), idx.end(), [&](std::size_t e) { return mult[e] >= 2; });
    if (redundant) {
      keep[p] = false;
      for (auto e : idx) --mult[e];
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < picked.size(); ++p) {
    if (keep[p]) out.push_back(picked[p]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Candidates that are empty, duplicates of a lower index, or strictly
// contained in another candidate are dropped; none of them can be needed in a
// minimum cover.
std::vector<std::size_t> reduce_candidates(const CoverInstance& inst) {
  std::unordered_map<std::vector<std::uint64_t>, std::size_t, WordsHash> seen;
  std::vector<std::size_t> unique;
  for (std::size_t j = 0; j < inst.coverage.size(); ++j) {
    if (inst.coverage[j].none()) continue;
    if (seen.emplace(inst.coverage[j].words(), j).second) unique.push_back(j);
  }
  constexpr std::size_t kDominanceLimit = 4096;
  if (unique.size() > kDominanceLimit) return unique;
  std::vector<std::size_t> counts(unique.size());
  for (std::size_t a = 0; a < unique.size(); ++a) counts[a] = inst.coverage[unique[a]].count();
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < unique.size(); ++a) {
    bool dominated = false;
    for (std::size_t b = 0; b < unique.size() && !dominated; ++b) {
      dominated = b != a && counts[b] > counts[a] &&
                  inst.coverage[unique[a]].is_subset_of(inst.coverage[unique[b]]);
    }
    if (!dominated) out.push_back(unique[a]);
  }
  return out;
}

class BranchAndBound {
 public:
  BranchAndBound(const CoverInstance& inst, std::vector<std::size_t> cands,
                 std::vector<std::size_t> incumbent, std::uint64_t budget)
      : inst_(inst), cands_(std::move(cands)), best_(std::move(incumbent)), budget_(budget),
        by_element_(inst.element_count) {
    for (std::size_t c = 0; c < cands_.size(); ++c) {
      for (auto e : inst_.coverage[cands_[c]].indices()) by_element_[e].push_back(c);
    }
  }

  void run() {
    Bitset covered(inst_.element_count);
    std::vector<std::size_t> current;
    search(covered, current);
  }

  const std::vector<std::size_t>& best() const { return best_; }
  bool complete() const { return !aborted_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  void search(const Bitset& covered, std::vector<std::size_t>& current) {
    if (aborted_) return;
    if (++nodes_ > budget_) {
      aborted_ = true;
      return;
    }
    const std::size_t left = inst_.element_count - covered.count();
    if (left == 0) {
      if (current.size() < best_.size()) best_ = current;
      return;
    }
    if (current.size() + 1 >= best_.size()) return;
    // Lower bound: remaining elements over the largest remaining gain.
    std::size_t max_gain = 0;
    for (auto j : cands_) {
      max_gain = std::max(max_gain, inst_.coverage[j].count_excluding(covered));
    }
    if (max_gain == 0) return;
    const std::size_t lb = (left + max_gain - 1) / max_gain;
    if (current.size() + lb >= best_.size()) return;

    // Branch on the uncovered element with the fewest covering candidates.
    std::size_t pivot = inst_.element_count;
    std::size_t fewest = SIZE_MAX;
    for (std::size_t e = 0; e < inst_.element_count; ++e) {
      if (covered.test(e)) continue;
      if (by_element_[e].size() < fewest) {
        fewest = by_element_[e].size();
        pivot = e;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> order;  // (gain, cand position)
    for (auto c : by_element_[pivot]) {
      order.emplace_back(inst_.coverage[cands_[c]].count_excluding(covered), c);
    }
    std::sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    });
    for (const auto& [gain, c] : order) {
      (void)gain;
      Bitset next = covered;
      next |= inst_.coverage[cands_[c]];
      current.push_back(cands_[c]);
      search(next, current);
      current.pop_back();
      if (aborted_) return;
    }
  }

  const CoverInstance& inst_;
  std::vector<std::size_t> cands_;
  std::vector<std::size_t> best_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::vector<std::vector<std::size_t>> by_element_;
};

}  // namespace

std::vector<std::size_t> CoverInstance::uncovered() const {
  Bitset all(element_count);
  for (const auto& c : coverage) all |= c;
  std::vector<std::size_t> out;
  for (std::size_t e = 0; e < element_count; ++e) {
    if (!all.test(e)) out.push_back(e);
  }
  return out;
}

CoverResult min_cover(const CoverInstance& instance, SolveMode mode,
                      const CoverOptions& options) {
  for (const auto& c : instance.coverage) {
    if (c.size() != instance.element_count) {
      throw InputError("coverage bitset size does not match the element count");
    }
  }
  CoverResult result;
  if (instance.element_count == 0) {
    result.optimal = true;
    return result;
  }
  auto missing = instance.uncovered();
  if (!missing.empty()) {
    throw InfeasibleError("cover instance infeasible: " + std::to_string(missing.size()) +
                              " element(s) covered by no candidate",
                          std::move(missing));
  }
  std::vector<std::size_t> all(instance.coverage.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  if (mode == SolveMode::kGreedy) {
    result.chosen = greedy_cover(instance, all);
    result.optimal = result.chosen.size() == 1;
    return result;
  }
  auto cands = reduce_candidates(instance);
  auto incumbent = greedy_cover(instance, cands);
  if (incumbent.size() <= 1) {
    result.chosen = std::move(incumbent);
    result.optimal = true;
    return result;
  }
  BranchAndBound bb(instance, std::move(cands), std::move(incumbent), options.node_budget);
  bb.run();
  result.chosen = bb.best();
  std::sort(result.chosen.begin(), result.chosen.end());
  result.optimal = bb.complete();
  result.nodes = bb.nodes();
  return result;
}

std::vector<std::uint32_t> make_selector(const CoverInstance& instance,
                                         const std::vector<std::size_t>& chosen) {
  std::vector<std::uint32_t> selector(instance.element_count, UINT32_MAX);
  Bitset assigned(instance.element_count);
  for (std::size_t w = 0; w < chosen.size(); ++w) {
    const Bitset& cov = instance.coverage[chosen[w]];
    for (std::size_t e = cov.find_first(); e < cov.size(); e = cov.find_next(e + 1)) {
      if (!assigned.test(e)) {
        assigned.set(e);
        selector[e] = static_cast<std::uint32_t>(w);
      }
    }
  }
  if (!assigned.all()) {
    std::vector<std::size_t> missing;
    for (std::size_t e = 0; e < instance.element_count; ++e) {
      if (!assigned.test(e)) missing.push_back(e);
    }
    throw InfeasibleError("chosen words do not cover every element", std::move(missing));
  }
  return selector;
}

}  // namespace invarion
