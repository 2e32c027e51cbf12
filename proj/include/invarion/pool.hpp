#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "invarion/system.hpp"

namespace invarion {

/// Candidate control words of a common horizon, stored flat.
class WordPool {
 public:
  WordPool() = default;
  WordPool(std::size_t horizon, std::vector<ControlIndex> flat, bool exhaustive);

  std::size_t horizon() const { return horizon_; }
  std::size_t size() const { return horizon_ == 0 ? 0 : flat_.size() / horizon_; }
  bool exhaustive() const { return exhaustive_; }

  std::span<const ControlIndex> word(std::size_t i) const {
    return {flat_.data() + i * horizon_, horizon_};
  }
  ControlWord control_word(std::size_t i) const;

  /// First `count` words.
  WordPool prefix(std::size_t count) const;

 private:
  std::size_t horizon_ = 0;
  std::vector<ControlIndex> flat_;
  bool exhaustive_ = false;
};

struct PoolOptions {
  std::uint64_t cap = std::uint64_t{1} << 20;
  std::uint64_t seed = 0;
};

/// |U|^τ if it fits in 64 bits, otherwise UINT64_MAX.
std::uint64_t word_count(std::uint64_t alphabet_size, std::size_t horizon);

/// Every word of length τ in lexicographic order.
WordPool enumerate_words(std::uint64_t alphabet_size, std::size_t horizon);

/// Seeded pool of at most `cap` distinct words, stratified evenly by leading
/// symbol. Every constant word is included. Sorted lexicographically.
WordPool sample_words(std::uint64_t alphabet_size, std::size_t horizon,
                      std::uint64_t cap, std::uint64_t seed);

/// Full enumeration when |U|^τ ≤ cap, otherwise a stratified sample.
WordPool make_pool(std::uint64_t alphabet_size, std::size_t horizon,
                   const PoolOptions& options = {});

}  // namespace invarion
