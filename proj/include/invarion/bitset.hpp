#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace invarion {

// Fixed-size bitset over grid elements. Sized at construction; all binary
// operations require equal sizes.
class Bitset {
 public:
  Bitset() = default;
  explicit Bitset(std::size_t size, bool value = false);

  std::size_t size() const { return size_; }
  std::size_t word_count() const { return words_.size(); }

  bool test(std::size_t i) const {
    return (words_[i >> 6] >> (i & 63)) & 1u;
  }
  void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void reset(std::size_t i) {
    words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
  }
  void set_all();
  void clear();

  std::size_t count() const;
  bool any() const;
  bool all() const;
  bool none() const { return !any(); }

  Bitset& operator|=(const Bitset& other);
  Bitset& operator&=(const Bitset& other);
  // this &= ~other
  Bitset& subtract(const Bitset& other);

  // Popcount of (*this & ~covered) without materializing it.
  std::size_t count_excluding(const Bitset& covered) const;
  bool is_subset_of(const Bitset& other) const;
  bool intersects(const Bitset& other) const;

  // Index of the lowest set bit at or after `from`, or size() if none.
  std::size_t find_next(std::size_t from) const;
  std::size_t find_first() const { return find_next(0); }
  std::vector<std::size_t> indices() const;

  const std::vector<std::uint64_t>& words() const { return words_; }
  std::vector<std::uint64_t>& words() { return words_; }

  friend bool operator==(const Bitset&, const Bitset&) = default;

 private:
  void trim();

  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

}  // namespace invarion
