#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "invarion/channel.hpp"
#include "invarion/cover.hpp"
#include "invarion/frontier.hpp"
#include "invarion/region.hpp"
#include "invarion/system.hpp"

namespace invarion {

/// Coder/decoder pipeline for one channel: codeword w carries word w.
struct Link {
  Channel channel;
  Codebook codebook;
  std::vector<ControlWord> words;
};

/// Block-coding strategy. With one link the words are whole-system words;
/// with one link per component they are component words combined jointly.
struct BlockCodingStrategy {
  std::size_t tau = 0;
  std::vector<Link> links;
  /// selector[element][link] = index of the word sent over that link.
  std::vector<std::vector<std::uint32_t>> selector;
  /// Words beyond a link's codebook are unreachable (rate-limited strategy).
  bool truncated = false;

  bool networked() const { return links.size() > 1; }
};

/// Single-channel strategy from a spanning solution. Throws CapacityError when
/// the channel cannot carry the solution's words in τ symbols, or when
/// `max_codebook_size` is below the word count. Throws InputError when the
/// region's margin does not cover the grid snapping error.
BlockCodingStrategy build_strategy(const SpanningSolution& solution, const Channel& channel,
                                   const GridRegion& region,
                                   std::optional<std::size_t> max_codebook_size = {});

/// Per-component strategy from a product witness S₁×⋯×Sₙ with one channel per
/// component. Throws CapacityError naming the first component that does not fit.
BlockCodingStrategy build_network_strategy(const SystemDef& system, const GridRegion& region,
                                           const std::vector<std::vector<ControlWord>>& witness,
                                           const std::vector<Channel>& channels);

/// As build_network_strategy, but each component keeps only the words its
/// channel can carry; the selector falls back to word 0 where needed. Models
/// operation below the required rate.
BlockCodingStrategy build_rate_limited_strategy(
    const SystemDef& system, const GridRegion& region,
    const std::vector<std::vector<ControlWord>>& witness, const std::vector<Channel>& channels);

/// How the channel resolves each transmitted symbol.
struct Adversary {
  enum class Kind { kFixed, kSeededRandom, kGreedyEscape };
  Kind kind = Kind::kFixed;
  /// kFixed: one deterministic resolution per link (empty = first output).
  std::vector<Resolution> resolutions;
  std::uint64_t seed = 0;

  static Adversary fixed(std::vector<Resolution> per_link);
  static Adversary seeded_random(std::uint64_t seed);
  static Adversary greedy_escape();
};

struct BlockRecord {
  std::size_t start = 0;
  std::vector<std::uint32_t> sent_index;
  std::vector<std::uint32_t> decoded_index;
  std::vector<std::vector<Symbol>> sent;
  std::vector<std::vector<Symbol>> received;
};

struct Transcript {
  std::size_t steps = 0;  // steps simulated
  std::vector<State> states;
  std::vector<BlockRecord> blocks;
  bool ok = true;
  std::optional<std::size_t> first_escape;
  std::size_t decode_mismatches = 0;
};

struct SimulationOptions {
  bool record_states = true;
  bool record_blocks = true;
  bool stop_at_escape = true;
};

/// Closed loop: per block, snap the measured state to the grid, encode the
/// selected word(s), pass the codewords through the adversary-resolved
/// channel(s), decode, and apply the decoded word(s). The horizon is rounded
/// up to a whole number of blocks. A state counts as escaped when it fails the
/// strict interior test (margin 0).
Transcript simulate(const SystemDef& system, const GridRegion& region,
                    const BlockCodingStrategy& strategy, const Adversary& adversary,
                    std::size_t horizon, std::span<const double> x0,
                    const SimulationOptions& options = {});

struct EscapeScan {
  std::size_t scanned = 0;
  std::size_t escapes = 0;
  /// Lowest-index initial state that escapes, with its escape step.
  std::optional<std::size_t> first_state;
  std::optional<std::size_t> first_escape_step;
};

/// Runs simulate from each initial state (in parallel, without recording).
EscapeScan escape_scan(const SystemDef& system, const GridRegion& region,
                       const BlockCodingStrategy& strategy, const Adversary& adversary,
                       std::size_t horizon, const std::vector<State>& initial_states);

/// Every resolution combination across links (product of per-link counts).
std::vector<Adversary> exhaustive_adversaries(const BlockCodingStrategy& strategy,
                                              std::uint64_t limit = 1 << 16);

/// (1/τ) log2 of the number of distinct word indices the coder can emit, per link.
std::vector<double> achieved_rates(const BlockCodingStrategy& strategy);

}  // namespace invarion
