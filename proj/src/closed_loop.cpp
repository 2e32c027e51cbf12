#include "invarion/closed_loop.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>

#include "invarion/errors.hpp"

namespace invarion {

namespace {

void check_margin(const GridRegion& region) {
  double diag2 = 0.0;
  for (double h : region.frame().spacing) diag2 += h * h;
  const double half_diag = 0.5 * std::sqrt(diag2);
  if (region.margin() < half_diag) {
    throw InputError("region margin " + std::to_string(region.margin()) +
                     " is below half a grid-cell diagonal (" + std::to_string(half_diag) +
                     "); snapped measurements would not be covered by the certificate");
  }
}

std::size_t horizon_of(const std::vector<std::vector<ControlWord>>& witness) {
  if (witness.empty() || witness.front().empty()) throw InputError("empty witness");
  const std::size_t tau = witness.front().front().horizon();
  for (const auto& s : witness) {
    if (s.empty()) throw InputError("witness has an empty component set");
    for (const auto& w : s) {
      if (w.horizon() != tau) throw InputError("witness words differ in horizon");
    }
  }
  return tau;
}

// For every grid point, the first combination (mixed radix, link 0 most
// significant) of kept words whose joint word keeps it inside; nullopt
// entries are uncovered.
std::vector<std::optional<std::vector<std::uint32_t>>> combo_selector(
    const SystemDef& system, const GridRegion& region, const Grid& grid,
    const std::vector<std::vector<ControlWord>>& sets) {
  std::size_t total = 1;
  for (const auto& s : sets) total *= s.size();
  const std::size_t tau = sets.front().front().horizon();
  // Joint words, built once.
  std::vector<std::vector<ControlIndex>> joint(total);
  std::vector<std::vector<std::uint32_t>> digits(total);
  std::vector<ControlWord> parts(sets.size());
  for (std::size_t n = 0; n < total; ++n) {
    std::size_t r = n;
    digits[n].resize(sets.size());
    for (std::size_t c = sets.size(); c-- > 0;) {
      digits[n][c] = static_cast<std::uint32_t>(r % sets[c].size());
      parts[c] = sets[c][digits[n][c]];
      r /= sets[c].size();
    }
    joint[n] = system.joint_word(parts).entries;
  }
  std::vector<std::optional<std::vector<std::uint32_t>>> out(grid.size());
  const auto count = static_cast<std::int64_t>(grid.size());
#pragma omp parallel
  {
    std::vector<double> a(grid.dim()), b(grid.dim());
#pragma omp for schedule(dynamic, 16)
    for (std::int64_t e = 0; e < count; ++e) {
      const auto p = grid.point(static_cast<std::size_t>(e));
      for (std::size_t n = 0; n < total; ++n) {
        std::copy(p.begin(), p.end(), a.begin());
        bool ok = true;
        for (std::size_t k = 0; k < tau && ok; ++k) {
          system.step_into(a, joint[n][k], b);
          ok = region.in_interior(b);
          a.swap(b);
        }
        if (ok) {
          out[static_cast<std::size_t>(e)] = digits[n];
          break;
        }
      }
    }
  }
  return out;
}

BlockCodingStrategy network_strategy(const SystemDef& system, const GridRegion& region,
                                     const std::vector<std::vector<ControlWord>>& witness,
                                     const std::vector<Channel>& channels, bool rate_limited) {
  if (witness.size() != system.component_count() || channels.size() != witness.size()) {
    throw InputError("network strategy needs one word set and one channel per component");
  }
  check_margin(region);
  const std::size_t tau = horizon_of(witness);
  BlockCodingStrategy s;
  s.tau = tau;
  std::vector<std::vector<ControlWord>> kept;
  for (std::size_t c = 0; c < witness.size(); ++c) {
    std::size_t size = witness[c].size();
    if (rate_limited) {
      const std::size_t avail = certified_codebook_size(channels[c], tau);
      if (avail < size) s.truncated = true;
      size = std::max<std::size_t>(1, std::min(size, avail));
    }
    Codebook cb;
    try {
      cb = build_codebook(channels[c], tau, size);
    } catch (const CapacityError& e) {
      throw CapacityError("component " + std::to_string(c) + ": " + e.what(), e.required(),
                          e.available());
    }
    kept.emplace_back(witness[c].begin(), witness[c].begin() + static_cast<std::ptrdiff_t>(size));
    s.links.push_back({channels[c], std::move(cb), kept.back()});
  }
  const Grid grid = discretize(region);
  const auto sel = combo_selector(system, region, grid, kept);
  s.selector.resize(grid.size());
  std::size_t missing = 0;
  for (std::size_t e = 0; e < grid.size(); ++e) {
    if (sel[e]) {
      s.selector[e] = *sel[e];
    } else {
      s.selector[e].assign(kept.size(), 0);
      ++missing;
    }
  }
  if (missing > 0 && !rate_limited) {
    throw InfeasibleError("witness does not cover " + std::to_string(missing) + " grid point(s)",
                          {});
  }
  return s;
}

// Shared per-run state: grid lookup and joint-control assembly.
class Loop {
 public:
  Loop(const SystemDef& system, const GridRegion& region, const BlockCodingStrategy& strategy)
      : system_(system), region_(region), strategy_(strategy), grid_(discretize(region)),
        lookup_(region, grid_) {
    if (strategy.selector.size() != grid_.size()) {
      throw InputError("strategy selector does not match the region grid");
    }
    if (strategy.tau == 0 || strategy.links.empty()) throw InputError("empty strategy");
    centroid_.assign(grid_.dim(), 0.0);
    for (std::size_t e = 0; e < grid_.size(); ++e) {
      for (std::size_t a = 0; a < grid_.dim(); ++a) centroid_[a] += grid_.point(e)[a];
    }
    for (auto& c : centroid_) c /= static_cast<double>(grid_.size());
  }

  Transcript run(const Adversary& adversary, std::size_t horizon, std::span<const double> x0,
                 const SimulationOptions& options) const {
    if (x0.size() != system_.state_dim()) throw InputError("initial state has wrong dimension");
    const std::size_t tau = strategy_.tau;
    const std::size_t L = strategy_.links.size();
    const std::size_t blocks = (horizon + tau - 1) / tau;
    Transcript t;
    std::mt19937_64 rng(adversary.seed);
    State x(x0.begin(), x0.end()), y(x.size());
    if (options.record_states) t.states.push_back(x);
    std::vector<std::uint32_t> sent(L), decoded(L);
    std::vector<std::vector<Symbol>> rx(L);
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const auto e = lookup_.nearest(x);
      for (std::size_t l = 0; l < L; ++l) sent[l] = e ? strategy_.selector[*e][l] : 0;
      for (std::size_t l = 0; l < L; ++l) {
        const auto& link = strategy_.links[l];
        const auto& cw = link.codebook.words[sent[l]];
        rx[l] = resolve(adversary, l, cw, rng);
      }
      if (adversary.kind == Adversary::Kind::kGreedyEscape) greedy_choice(x, sent, rx);
      for (std::size_t l = 0; l < L; ++l) {
        const auto& link = strategy_.links[l];
        const auto d = decode(link.channel, link.codebook, rx[l]);
        decoded[l] = d ? static_cast<std::uint32_t>(*d) : 0;
        if (!d || decoded[l] != sent[l]) ++t.decode_mismatches;
      }
      if (options.record_blocks) {
        BlockRecord rec;
        rec.start = t.steps;
        rec.sent_index = sent;
        rec.decoded_index = decoded;
        for (std::size_t l = 0; l < L; ++l) {
          rec.sent.push_back(strategy_.links[l].codebook.words[sent[l]]);
        }
        rec.received = rx;
        t.blocks.push_back(std::move(rec));
      }
      for (std::size_t k = 0; k < tau; ++k) {
        system_.step_into(x, control_at(decoded, k), y);
        x.swap(y);
        ++t.steps;
        if (options.record_states) t.states.push_back(x);
        if (!region_.in_interior(x, 0.0) && !t.first_escape) {
          t.first_escape = t.steps;
          t.ok = false;
          if (options.stop_at_escape) return t;
        }
      }
    }
    return t;
  }

 private:
  ControlIndex control_at(const std::vector<std::uint32_t>& idx, std::size_t k) const {
    if (strategy_.links.size() == 1) return strategy_.links[0].words[idx[0]][k];
    std::vector<ControlIndex> parts(idx.size());
    for (std::size_t l = 0; l < idx.size(); ++l) parts[l] = strategy_.links[l].words[idx[l]][k];
    return system_.joint_control(parts);
  }

  std::vector<Symbol> resolve(const Adversary& adv, std::size_t l, const std::vector<Symbol>& cw,
                              std::mt19937_64& rng) const {
    const auto& ch = strategy_.links[l].channel;
    std::vector<Symbol> out(cw.size());
    for (std::size_t t = 0; t < cw.size(); ++t) {
      const auto& o = ch.outputs(cw[t]);
      switch (adv.kind) {
        case Adversary::Kind::kFixed:
          out[t] = (l < adv.resolutions.size() && !adv.resolutions[l].empty())
                       ? adv.resolutions[l][cw[t]]
                       : o.front();
          break;
        case Adversary::Kind::kSeededRandom: {
          std::uniform_int_distribution<std::size_t> pick(0, o.size() - 1);
          out[t] = o[pick(rng)];
          break;
        }
        case Adversary::Kind::kGreedyEscape:
          out[t] = o.front();
          break;
      }
    }
    return out;
  }

  // Per link (others held at their current choice), tries every received
  // block consistent with the codeword (up to 256) and keeps the one whose
  // decoded word drives the state furthest from the grid centroid, or out.
  void greedy_choice(const State& x, const std::vector<std::uint32_t>& sent,
                     std::vector<std::vector<Symbol>>& rx) const {
    for (std::size_t l = 0; l < rx.size(); ++l) {
      const auto& link = strategy_.links[l];
      const auto& cw = link.codebook.words[sent[l]];
      std::size_t combos = 1;
      for (auto s : cw) {
        combos *= link.channel.outputs(s).size();
        if (combos > 256) break;
      }
      if (combos > 256) continue;
      double best_score = -1.0;
      std::vector<Symbol> best = rx[l], cand(cw.size());
      for (std::size_t n = 0; n < combos; ++n) {
        std::size_t r = n;
        for (std::size_t t = cw.size(); t-- > 0;) {
          const auto& o = link.channel.outputs(cw[t]);
          cand[t] = o[r % o.size()];
          r /= o.size();
        }
        std::vector<std::uint32_t> dec(rx.size());
        for (std::size_t m = 0; m < rx.size(); ++m) {
          const auto& lm = strategy_.links[m];
          const auto d = decode(lm.channel, lm.codebook, m == l ? cand : rx[m]);
          dec[m] = d ? static_cast<std::uint32_t>(*d) : 0;
        }
        const double score = block_score(x, dec);
        if (score > best_score) {
          best_score = score;
          best = cand;
        }
      }
      rx[l] = best;
    }
  }

  double block_score(const State& x0, const std::vector<std::uint32_t>& dec) const {
    State x = x0, y(x.size());
    for (std::size_t k = 0; k < strategy_.tau; ++k) {
      system_.step_into(x, control_at(dec, k), y);
      x.swap(y);
      if (!region_.in_interior(x, 0.0)) return 1e9 + static_cast<double>(strategy_.tau - k);
    }
    double d2 = 0.0;
    for (std::size_t a = 0; a < x.size(); ++a) d2 += (x[a] - centroid_[a]) * (x[a] - centroid_[a]);
    return std::sqrt(d2);
  }

  const SystemDef& system_;
  const GridRegion& region_;
  const BlockCodingStrategy& strategy_;
  Grid grid_;
  GridLookup lookup_;
  State centroid_;
};

}  // namespace

BlockCodingStrategy build_strategy(const SpanningSolution& solution, const Channel& channel,
                                   const GridRegion& region,
                                   std::optional<std::size_t> max_codebook_size) {
  if (solution.words.empty()) throw InputError("spanning solution has no words");
  check_margin(region);
  const std::size_t needed = solution.words.size();
  if (max_codebook_size && *max_codebook_size < needed) {
    throw CapacityError("codebook limited to " + std::to_string(*max_codebook_size) +
                            " words but the spanning set has " + std::to_string(needed),
                        needed, *max_codebook_size);
  }
  BlockCodingStrategy s;
  s.tau = solution.tau;
  s.links.push_back({channel, build_codebook(channel, solution.tau, needed), solution.words});
  s.selector.reserve(solution.selector.size());
  for (auto w : solution.selector) s.selector.push_back({w});
  return s;
}

BlockCodingStrategy build_network_strategy(const SystemDef& system, const GridRegion& region,
                                           const std::vector<std::vector<ControlWord>>& witness,
                                           const std::vector<Channel>& channels) {
  return network_strategy(system, region, witness, channels, false);
}

BlockCodingStrategy build_rate_limited_strategy(
    const SystemDef& system, const GridRegion& region,
    const std::vector<std::vector<ControlWord>>& witness, const std::vector<Channel>& channels) {
  return network_strategy(system, region, witness, channels, true);
}

Adversary Adversary::fixed(std::vector<Resolution> per_link) {
  Adversary a;
  a.kind = Kind::kFixed;
  a.resolutions = std::move(per_link);
  return a;
}

Adversary Adversary::seeded_random(std::uint64_t seed) {
  Adversary a;
  a.kind = Kind::kSeededRandom;
  a.seed = seed;
  return a;
}

Adversary Adversary::greedy_escape() {
  Adversary a;
  a.kind = Kind::kGreedyEscape;
  return a;
}

Transcript simulate(const SystemDef& system, const GridRegion& region,
                    const BlockCodingStrategy& strategy, const Adversary& adversary,
                    std::size_t horizon, std::span<const double> x0,
                    const SimulationOptions& options) {
  const Loop loop(system, region, strategy);
  return loop.run(adversary, horizon, x0, options);
}

EscapeScan escape_scan(const SystemDef& system, const GridRegion& region,
                       const BlockCodingStrategy& strategy, const Adversary& adversary,
                       std::size_t horizon, const std::vector<State>& initial_states) {
  const Loop loop(system, region, strategy);
  const SimulationOptions quiet{false, false, true};
  std::vector<std::optional<std::size_t>> escape(initial_states.size());
  const auto n = static_cast<std::int64_t>(initial_states.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    escape[static_cast<std::size_t>(i)] =
        loop.run(adversary, horizon, initial_states[static_cast<std::size_t>(i)], quiet)
            .first_escape;
  }
  EscapeScan out;
  out.scanned = initial_states.size();
  for (std::size_t i = 0; i < escape.size(); ++i) {
    if (!escape[i]) continue;
    ++out.escapes;
    if (!out.first_state) {
      out.first_state = i;
      out.first_escape_step = escape[i];
    }
  }
  return out;
}

std::vector<Adversary> exhaustive_adversaries(const BlockCodingStrategy& strategy,
                                              std::uint64_t limit) {
  std::vector<std::vector<Resolution>> per_link;
  std::uint64_t total = 1;
  for (const auto& link : strategy.links) {
    per_link.push_back(enumerate_resolutions(link.channel, limit));
    total *= per_link.back().size();
    if (total > limit) throw InputError("too many adversary resolutions to enumerate");
  }
  std::vector<Adversary> out;
  for (std::uint64_t n = 0; n < total; ++n) {
    std::uint64_t r = n;
    std::vector<Resolution> pick(per_link.size());
    for (std::size_t l = per_link.size(); l-- > 0;) {
      pick[l] = per_link[l][r % per_link[l].size()];
      r /= per_link[l].size();
    }
    out.push_back(Adversary::fixed(std::move(pick)));
  }
  return out;
}

std::vector<double> achieved_rates(const BlockCodingStrategy& strategy) {
  std::vector<double> out;
  for (std::size_t l = 0; l < strategy.links.size(); ++l) {
    std::set<std::uint32_t> used;
    for (const auto& s : strategy.selector) used.insert(s[l]);
    out.push_back(std::log2(static_cast<double>(used.size())) /
                  static_cast<double>(strategy.tau));
  }
  return out;
}

}  // namespace invarion
