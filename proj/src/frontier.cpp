#include "invarion/frontier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "invarion/errors.hpp"
#include "invarion/kernels.hpp"
#include "invarion/span_solver.hpp"

namespace invarion {

namespace {

ControlIndex rest_of(const SystemDef& s) {
  if (s.kind() != SystemDef::Kind::kProduct) return s.alphabet().rest_index();
  std::vector<ControlIndex> parts;
  for (std::size_t j = 0; j < s.component_count(); ++j) parts.push_back(rest_of(s.component(j)));
  return s.joint_control(parts);
}

double rate(std::size_t count, std::size_t tau) {
  return std::log2(static_cast<double>(count)) / static_cast<double>(tau);
}

FrontierPoint make_point(std::vector<std::vector<ControlWord>> witness, std::size_t tau) {
  FrontierPoint p;
  for (const auto& s : witness) p.rates.push_back(rate(s.size(), tau));
  p.witness = std::move(witness);
  return p;
}

std::vector<ControlWord> words_of(const WordPool& pool, const std::vector<std::size_t>& idx) {
  std::vector<ControlWord> out;
  for (auto j : idx) out.push_back(pool.control_word(j));
  return out;
}

// Every joint word of the product S₁×⋯×Sₙ, mixed radix with component 0 most
// significant.
std::vector<ControlWord> product_words(const SystemDef& system,
                                       const std::vector<std::vector<ControlWord>>& sets) {
  std::size_t total = 1;
  for (const auto& s : sets) {
    if (s.empty()) throw InputError("empty component word set");
    total *= s.size();
  }
  std::vector<ControlWord> out;
  out.reserve(total);
  std::vector<ControlWord> parts(sets.size());
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t r = n;
    for (std::size_t c = sets.size(); c-- > 0;) {
      parts[c] = sets[c][r % sets[c].size()];
      r /= sets[c].size();
    }
    out.push_back(system.joint_word(parts));
  }
  return out;
}

WordPool flat_pool(const std::vector<ControlWord>& words, std::size_t tau) {
  std::vector<ControlIndex> flat;
  flat.reserve(words.size() * tau);
  for (const auto& w : words) flat.insert(flat.end(), w.entries.begin(), w.entries.end());
  return WordPool(tau, std::move(flat), false);
}

bool full_union(const std::vector<Bitset>& sets, std::size_t elements) {
  Bitset u(elements);
  for (const auto& s : sets) u |= s;
  return u.all();
}

// Pivot DFS: lowest index first, pruning as soon as the trajectory leaves the
// interior.
bool dfs_word(const SystemDef& system, const GridRegion& region, std::size_t pivot,
              std::vector<ControlIndex>& parts, std::uint64_t pivot_size,
              std::vector<std::vector<double>>& states, std::vector<ControlIndex>& word,
              std::size_t k, std::uint64_t& nodes, std::uint64_t limit) {
  if (k == word.size()) return true;
  for (std::uint64_t u = 0; u < pivot_size; ++u) {
    if (++nodes > limit) return false;
    parts[pivot] = static_cast<ControlIndex>(u);
    system.step_into(states[k], system.joint_control(parts), states[k + 1]);
    if (!region.in_interior(states[k + 1])) continue;
    word[k] = static_cast<ControlIndex>(u);
    if (dfs_word(system, region, pivot, parts, pivot_size, states, word, k + 1, nodes, limit)) {
      return true;
    }
    if (nodes > limit) return false;
  }
  return false;
}

// Greedy budget sweep for two components over precomputed pair coverage.
void sweep_two(const std::vector<Bitset>& pc, const WordPool& p1, const WordPool& p2,
               std::size_t elements, std::size_t tau, const FrontierOptions& options,
               std::vector<FrontierPoint>& points, std::vector<std::string>& diagnostics) {
  const std::size_t na = p1.size(), nb = p2.size();
  std::vector<Bitset> u(nb, Bitset(elements));
  std::vector<bool> in_s1(na, false);
  std::vector<std::size_t> s1;
  std::size_t infeasible = 0;

  auto cover_second = [&](const std::vector<std::size_t>& first) {
    CoverInstance inst{elements, std::vector<Bitset>(nb, Bitset(elements))};
    for (std::size_t b = 0; b < nb; ++b) {
      for (auto a : first) inst.coverage[b] |= pc[a * nb + b];
    }
    return min_cover(inst, options.mode, options.cover).chosen;
  };
  auto cover_first = [&](const std::vector<std::size_t>& second) {
    CoverInstance inst{elements, std::vector<Bitset>(na, Bitset(elements))};
    for (std::size_t a = 0; a < na; ++a) {
      for (auto b : second) inst.coverage[a] |= pc[a * nb + b];
    }
    return min_cover(inst, options.mode, options.cover).chosen;
  };

  for (std::size_t m = 1; m <= na; ++m) {
    std::size_t best = na, best_gain = 0;
    for (std::size_t a = 0; a < na; ++a) {
      if (in_s1[a]) continue;
      std::size_t gain = 0;
      for (std::size_t b = 0; b < nb; ++b) gain += pc[a * nb + b].count_excluding(u[b]);
      if (best == na || gain > best_gain) {
        best = a;
        best_gain = gain;
      }
    }
    in_s1[best] = true;
    s1.push_back(best);
    for (std::size_t b = 0; b < nb; ++b) u[b] |= pc[best * nb + b];
    if (!full_union(u, elements)) {
      ++infeasible;
      continue;
    }
    std::vector<std::size_t> first = s1;
    std::sort(first.begin(), first.end());
    std::vector<std::size_t> second = cover_second(first);
    points.push_back(make_point({words_of(p1, first), words_of(p2, second)}, tau));
    for (std::size_t r = 0; r < options.refine_rounds; ++r) {
      auto f2 = cover_first(second);
      if (f2.size() > first.size()) break;
      auto s2 = cover_second(f2);
      const bool same = f2 == first && s2 == second;
      first = std::move(f2);
      second = std::move(s2);
      points.push_back(make_point({words_of(p1, first), words_of(p2, second)}, tau));
      if (same) break;
    }
  }
  if (infeasible > 0) {
    diagnostics.push_back(std::to_string(infeasible) +
                          " component-1 budget(s) skipped: no component-2 set completes the cover");
  }
}

void exact_two(const std::vector<Bitset>& pc, const WordPool& p1, const WordPool& p2,
               std::size_t elements, std::size_t tau, std::vector<FrontierPoint>& points) {
  const std::size_t na = p1.size(), nb = p2.size();
  auto mask_of = [](const Bitset& b) { return b.words().empty() ? 0 : b.words()[0]; };
  const std::uint64_t full = elements == 64 ? ~0ull : ((1ull << elements) - 1);
  std::vector<std::uint64_t> ub(nb), unions(std::size_t{1} << nb);
  for (std::uint64_t m1 = 1; m1 < (1ull << na); ++m1) {
    std::fill(ub.begin(), ub.end(), 0);
    for (std::size_t a = 0; a < na; ++a) {
      if (!((m1 >> a) & 1)) continue;
      for (std::size_t b = 0; b < nb; ++b) ub[b] |= mask_of(pc[a * nb + b]);
    }
    unions[0] = 0;
    int best_count = 65;
    std::uint64_t best_mask = 0;
    for (std::uint64_t m2 = 1; m2 < (1ull << nb); ++m2) {
      const int low = std::countr_zero(m2);
      unions[m2] = unions[m2 & (m2 - 1)] | ub[static_cast<std::size_t>(low)];
      if (unions[m2] == full && std::popcount(m2) < best_count) {
        best_count = std::popcount(m2);
        best_mask = m2;
      }
    }
    if (best_mask == 0) continue;
    std::vector<std::size_t> s1, s2;
    for (std::size_t a = 0; a < na; ++a) {
      if ((m1 >> a) & 1) s1.push_back(a);
    }
    for (std::size_t b = 0; b < nb; ++b) {
      if ((best_mask >> b) & 1) s2.push_back(b);
    }
    points.push_back(make_point({words_of(p1, s1), words_of(p2, s2)}, tau));
  }
}

// Coverage of each pool-c word combined with every combination of the other
// components' current sets.
std::vector<Bitset> candidate_union(const SystemDef& system, const GridRegion& region,
                                    const Grid& grid, std::size_t c, const WordPool& pool,
                                    std::vector<std::vector<ControlWord>> sets) {
  std::vector<Bitset> out(pool.size(), Bitset(grid.size()));
  for (std::size_t j = 0; j < pool.size(); ++j) {
    sets[c] = {pool.control_word(j)};
    const auto words = product_words(system, sets);
    const auto run = stay_coverage(system, region, grid, flat_pool(words, pool.horizon()));
    for (const auto& s : run.coverage) out[j] |= s;
  }
  return out;
}

}  // namespace

std::vector<WordPool> pivot_pools(const SystemDef& system, const GridRegion& region,
                                  std::size_t tau, const PivotPoolOptions& options) {
  if (tau == 0) throw InputError("horizon must be positive");
  const std::size_t n = system.component_count();
  if (n < 2) throw InputError("pivot pools need a product system");
  const Grid grid = discretize(region);
  std::vector<ControlIndex> rests(n);
  for (std::size_t c = 0; c < n; ++c) rests[c] = rest_of(system.component(c));

  std::vector<WordPool> pools;
  for (std::size_t pivot = 0; pivot < n; ++pivot) {
    const std::uint64_t pivot_size = system.component(pivot).alphabet_size();
    std::vector<ControlWord> found{constant_word(rests[pivot], tau)};
    auto joint_of = [&](const ControlWord& w) {
      std::vector<ControlWord> parts;
      for (std::size_t c = 0; c < n; ++c) {
        parts.push_back(c == pivot ? w : constant_word(rests[c], tau));
      }
      return system.joint_word(parts);
    };
    Bitset covered = stay_set(system, region, grid, joint_of(found.front()).entries);
    std::vector<ControlIndex> parts = rests;
    std::vector<std::vector<double>> states(tau + 1, std::vector<double>(grid.dim()));
    std::vector<ControlIndex> word(tau);
    for (std::size_t e = 0; e < grid.size() && found.size() < options.max_words; ++e) {
      if (covered.test(e)) continue;
      const auto p = grid.point(e);
      std::copy(p.begin(), p.end(), states[0].begin());
      std::uint64_t nodes = 0;
      if (!dfs_word(system, region, pivot, parts, pivot_size, states, word, 0, nodes,
                    options.node_limit)) {
        continue;
      }
      ControlWord w(word);
      covered |= stay_set(system, region, grid, joint_of(w).entries);
      found.push_back(std::move(w));
    }
    pools.push_back(flat_pool(found, tau));
  }
  return pools;
}

std::vector<FrontierPoint> pareto_filter(std::vector<FrontierPoint> points) {
  auto dominates = [](const FrontierPoint& q, const FrontierPoint& p) {
    bool strict = false;
    for (std::size_t c = 0; c < p.rates.size(); ++c) {
      if (q.rates[c] > p.rates[c]) return false;
      if (q.rates[c] < p.rates[c]) strict = true;
    }
    return strict;
  };
  std::vector<bool> keep(points.size(), true);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size() && keep[i]; ++j) {
      if (j != i && dominates(points[j], points[i])) keep[i] = false;
      if (j < i && keep[j] && points[j].rates == points[i].rates) keep[i] = false;
    }
  }
  std::vector<FrontierPoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (keep[i]) out.push_back(std::move(points[i]));
  }
  std::sort(out.begin(), out.end(),
            [](const FrontierPoint& a, const FrontierPoint& b) { return a.rates < b.rates; });
  return out;
}

EntropyFrontier frontier(const SystemDef& system, const GridRegion& region, std::size_t tau,
                         const std::vector<WordPool>& pools, const FrontierOptions& options) {
  const std::size_t n = system.component_count();
  if (n < 2) throw InputError("frontier needs a product of at least two systems");
  if (pools.size() != n) throw InputError("one candidate pool per component required");
  for (std::size_t c = 0; c < n; ++c) {
    if (pools[c].size() == 0 || pools[c].horizon() != tau) {
      throw InputError("pool " + std::to_string(c) + " is empty or has the wrong horizon");
    }
    for (std::size_t j = 0; j < pools[c].size(); ++j) {
      for (auto u : pools[c].word(j)) {
        if (u >= system.component(c).alphabet_size()) {
          throw InputError("pool " + std::to_string(c) + " holds an out-of-range control");
        }
      }
    }
  }
  const Grid grid = discretize(region);
  EntropyFrontier out;
  out.tau = tau;
  std::vector<FrontierPoint> points;

  if (n == 2) {
    const auto pc = pair_coverage(system, region, grid, pools[0], pools[1]);
    if (options.exact) {
      if (grid.size() > 64 || pools[0].size() > 12 || pools[1].size() > 12) {
        throw InputError("exact frontier needs at most 64 grid points and pools of at most 12");
      }
      exact_two(pc, pools[0], pools[1], grid.size(), tau, points);
      out.exact = true;
    } else {
      sweep_two(pc, pools[0], pools[1], grid.size(), tau, options, points, out.diagnostics);
    }
  } else {
    out.upper_bound_only = true;
    // Axis points: one component free, the others at their first pool word.
    for (std::size_t c = 0; c < n; ++c) {
      std::vector<std::vector<ControlWord>> sets;
      for (std::size_t j = 0; j < n; ++j) sets.push_back({pools[j].control_word(0)});
      CoverInstance inst{grid.size(), candidate_union(system, region, grid, c, pools[c], sets)};
      if (!inst.uncovered().empty()) {
        out.diagnostics.push_back("axis point for component " + std::to_string(c) +
                                  " infeasible with the given pools");
        continue;
      }
      sets[c] = words_of(pools[c], min_cover(inst, options.mode, options.cover).chosen);
      points.push_back(make_point(std::move(sets), tau));
    }
  }
  if (points.empty()) {
    out.diagnostics.push_back("no feasible product witness in the given pools");
  }
  out.points = pareto_filter(std::move(points));
  return out;
}

bool product_covers(const SystemDef& system, const GridRegion& region,
                    const std::vector<std::vector<ControlWord>>& witness) {
  if (witness.size() != system.component_count()) {
    throw InputError("witness needs one word set per component");
  }
  const auto words = product_words(system, witness);
  const Grid grid = discretize(region);
  const auto run = stay_coverage(system, region, grid, flat_pool(words, words.front().horizon()));
  return full_union(run.coverage, grid.size());
}

MidpointResult concat_midpoint(const SystemDef& system, const GridRegion& region,
                               const FrontierPoint& a, const FrontierPoint& b, std::size_t tau) {
  const std::size_t n = system.component_count();
  if (a.witness.size() != n || b.witness.size() != n) {
    throw InputError("witnesses need one word set per component");
  }
  for (const auto* p : {&a, &b}) {
    for (const auto& s : p->witness) {
      for (const auto& w : s) {
        if (w.horizon() != tau) throw InputError("witness words must have horizon tau");
      }
    }
  }
  MidpointResult result;
  std::vector<std::vector<ControlWord>> joined;
  for (std::size_t c = 0; c < n; ++c) joined.push_back(concatenate_all(a.witness[c], b.witness[c]));
  result.point = make_point(std::move(joined), 2 * tau);

  const auto first = product_words(system, a.witness);
  const auto second = product_words(system, b.witness);
  const Grid grid = discretize(region);
  std::vector<char> ok(grid.size(), 0);
  const auto total = static_cast<std::int64_t>(grid.size());
#pragma omp parallel
  {
    std::vector<double> x(grid.dim()), y(grid.dim()), mid(grid.dim()), z(grid.dim());
    auto run = [&](std::span<const double> from, const ControlWord& w, std::vector<double>& s,
                   std::vector<double>& t) {
      std::copy(from.begin(), from.end(), s.begin());
      for (auto u : w.entries) {
        system.step_into(s, u, t);
        if (!region.in_interior(t)) return false;
        s.swap(t);
      }
      return true;
    };
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t e = 0; e < total; ++e) {
      const auto p = grid.point(static_cast<std::size_t>(e));
      for (const auto& w1 : first) {
        if (!run(p, w1, x, y)) continue;
        mid = x;
        bool done = false;
        for (const auto& w2 : second) {
          if (run(mid, w2, y, z)) {
            done = true;
            break;
          }
        }
        if (done) {
          ok[static_cast<std::size_t>(e)] = 1;
          break;
        }
      }
    }
  }
  for (std::size_t e = 0; e < grid.size(); ++e) {
    if (!ok[e]) result.failures.push_back(e);
  }
  result.verified = result.failures.empty();
  return result;
}

}  // namespace invarion
