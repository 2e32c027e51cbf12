#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "invarion/bitset.hpp"

namespace invarion {

using Symbol = std::uint32_t;

/// Nondeterministic channel on symbols 0..n-1: input b may arrive as any
/// element of κ(b) (sorted, nonempty, ⊆ the alphabet).
class Channel {
 public:
  Channel(std::vector<std::string> names, std::vector<std::vector<Symbol>> relation);

  static Channel noiseless(std::size_t n);
  static Channel all_confusable(std::size_t n);
  /// κ(i) = {i, i+1 mod 5}: confusability graph C₅.
  static Channel pentagon();

  std::size_t size() const { return relation_.size(); }
  const std::vector<Symbol>& outputs(Symbol b) const { return relation_[b]; }
  const std::vector<std::string>& names() const { return names_; }
  const std::vector<std::vector<Symbol>>& relation() const { return relation_; }
  bool can_output(Symbol b, Symbol out) const;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<Symbol>> relation_;
};

/// Simple undirected graph with bitset adjacency rows.
class Graph {
 public:
  explicit Graph(std::size_t n = 0);

  std::size_t size() const { return adj_.size(); }
  bool adjacent(std::size_t a, std::size_t b) const { return adj_[a].test(b); }
  void add_edge(std::size_t a, std::size_t b);
  std::size_t degree(std::size_t a) const { return adj_[a].count(); }
  std::size_t edge_count() const;
  const Bitset& row(std::size_t a) const { return adj_[a]; }

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<Bitset> adj_;
};

/// Edge {b, b'} iff b ≠ b' and κ(b) ∩ κ(b') ≠ ∅.
Graph confusability_graph(const Channel& channel);

/// Vertex (g, h) ↦ g · |H| + h; distinct pairs are adjacent iff each
/// coordinate is equal or adjacent.
Graph strong_product(const Graph& g, const Graph& h);

/// k-fold strong power; G^⊠1 = G.
Graph strong_power(const Graph& g, std::size_t k);

/// Channel on blocks of k symbols (mixed radix, first symbol most
/// significant) with κ_k the product relation. Alphabet size must stay ≤ 2^20.
Channel block_channel(const Channel& channel, std::size_t k);

inline constexpr std::size_t kExactMisCap = 40;

struct IndependentSet {
  std::size_t size = 0;
  std::vector<std::size_t> witness;  // ascending
};

/// Exact maximum independent set by branch and bound with a greedy colouring
/// bound. Throws InputError above kExactMisCap vertices.
IndependentSet max_independent_set(const Graph& graph);

/// Clique cover by repeatedly growing a clique from the highest-degree
/// uncovered vertex. Returns the cliques.
std::vector<std::vector<std::size_t>> greedy_clique_cover(const Graph& graph);

struct BlockBound {
  std::size_t k = 0;
  std::size_t independence = 0;
  std::size_t clique_cover = 0;
  double lower = 0.0;  // log2(α)/k
  double upper = 0.0;  // log2(cover)/k
};

struct CapacityBounds {
  double lower = 0.0;
  double upper = 0.0;
  std::vector<BlockBound> per_k;
  std::vector<std::string> diagnostics;
};

/// Certified bounds on the zero-error capacity in bits per symbol:
/// lower = max_k log2 α(G^⊠k)/k, upper = min_k log2 (clique cover of G^⊠k)/k.
CapacityBounds zero_error_capacity_bounds(const Channel& channel, std::size_t k_max);

struct Codebook {
  std::size_t block_length = 0;
  std::vector<std::vector<Symbol>> words;

  std::size_t size() const { return words.size(); }
};

/// Largest distinguishable codebook this library certifies at block length k:
/// an exact MIS of G^⊠k when |B|^k ≤ kExactMisCap, otherwise a product of MIS
/// codebooks over shorter blocks.
std::size_t certified_codebook_size(const Channel& channel, std::size_t k);

/// `size` pairwise distinguishable words of length k. Throws CapacityError
/// with the certified maximum when `size` exceeds it.
Codebook build_codebook(const Channel& channel, std::size_t k, std::size_t size);

/// Exhaustive pairwise check that κ-images of distinct words are disjoint.
bool verify_codebook(const Channel& channel, const Codebook& codebook);

/// Index of the codeword whose κ-image contains `received`, if any.
std::optional<std::size_t> decode(const Channel& channel, const Codebook& codebook,
                                  std::span<const Symbol> received);

/// Deterministic version of the channel: resolution[b] ∈ κ(b).
using Resolution = std::vector<Symbol>;

/// Number of deterministic resolutions Π_b |κ(b)| (saturating).
std::uint64_t resolution_count(const Channel& channel);

/// All resolutions in mixed-radix order (symbol 0 most significant). Throws
/// InputError if there are more than `limit`.
std::vector<Resolution> enumerate_resolutions(const Channel& channel,
                                              std::uint64_t limit = 1 << 16);

Resolution random_resolution(const Channel& channel, std::mt19937_64& rng);

}  // namespace invarion
