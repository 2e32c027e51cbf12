#include "invarion/pool.hpp"

#include <algorithm>
#include <random>
#include <unordered_set>

#include "invarion/errors.hpp"

namespace invarion {

WordPool::WordPool(std::size_t horizon, std::vector<ControlIndex> flat, bool exhaustive)
    : horizon_(horizon), flat_(std::move(flat)), exhaustive_(exhaustive) {
  if (horizon_ == 0) throw InputError("word pool horizon must be positive");
  if (flat_.size() % horizon_ != 0) throw InputError("word pool storage is ragged");
}

ControlWord WordPool::control_word(std::size_t i) const {
  const auto w = word(i);
  return ControlWord(std::vector<ControlIndex>(w.begin(), w.end()));
}

WordPool WordPool::prefix(std::size_t count) const {
  count = std::min(count, size());
  return WordPool(horizon_,
                  std::vector<ControlIndex>(flat_.begin(),
                                            flat_.begin() + static_cast<std::ptrdiff_t>(count * horizon_)),
                  exhaustive_ && count == size());
}

std::uint64_t word_count(std::uint64_t alphabet_size, std::size_t horizon) {
  std::uint64_t n = 1;
  for (std::size_t k = 0; k < horizon; ++k) {
    if (alphabet_size != 0 && n > UINT64_MAX / alphabet_size) return UINT64_MAX;
    n *= alphabet_size;
  }
  return n;
}

WordPool enumerate_words(std::uint64_t alphabet_size, std::size_t horizon) {
  if (alphabet_size == 0 || horizon == 0) throw InputError("empty alphabet or horizon");
  const std::uint64_t total = word_count(alphabet_size, horizon);
  if (total > (std::uint64_t{1} << 32)) throw InputError("too many words to enumerate");
  std::vector<ControlIndex> flat(total * horizon);
  std::vector<ControlIndex> w(horizon, 0);
  for (std::uint64_t n = 0; n < total; ++n) {
    std::copy(w.begin(), w.end(), flat.begin() + static_cast<std::ptrdiff_t>(n * horizon));
    for (std::size_t k = horizon; k-- > 0;) {
      if (++w[k] < alphabet_size) break;
      w[k] = 0;
    }
  }
  return WordPool(horizon, std::move(flat), true);
}

WordPool sample_words(std::uint64_t alphabet_size, std::size_t horizon, std::uint64_t cap,
                      std::uint64_t seed) {
  if (alphabet_size == 0 || horizon == 0) throw InputError("empty alphabet or horizon");
  if (alphabet_size > UINT32_MAX) throw InputError("alphabet too large for sampling");
  const std::uint64_t total = word_count(alphabet_size, horizon);
  cap = std::max(cap, alphabet_size);
  if (total <= cap) return enumerate_words(alphabet_size, horizon);

  // Words are keyed exactly when |U|^τ fits in 64 bits, otherwise by hash
  // (a collision only drops a word).
  auto key = [&](const std::vector<ControlIndex>& w) {
    std::uint64_t k = total == UINT64_MAX ? 1469598103934665603ull : 0;
    for (auto x : w) {
      if (total == UINT64_MAX) {
        k = (k ^ x) * 1099511628211ull;
      } else {
        k = k * alphabet_size + x;
      }
    }
    return k;
  };

  std::vector<std::vector<ControlIndex>> words;
  words.reserve(cap);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(cap * 2);
  const std::uint64_t per_symbol = total / alphabet_size;
  for (std::uint64_t s = 0; s < alphabet_size; ++s) {
    const std::uint64_t quota =
        std::min(per_symbol, cap / alphabet_size + (s < cap % alphabet_size ? 1 : 0));
    std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ull * (s + 1)));
    std::uniform_int_distribution<std::uint64_t> pick(0, alphabet_size - 1);
    std::vector<ControlIndex> w(horizon, static_cast<ControlIndex>(s));
    std::uint64_t got = 0;
    if (seen.insert(key(w)).second) {
      words.push_back(w);
      ++got;
    }
    // Rejection sampling; quota ≤ half the stratum keeps this cheap, and the
    // attempt bound guarantees termination otherwise.
    std::uint64_t attempts = 0;
    const std::uint64_t max_attempts = 64 * quota + 1024;
    while (got < quota && attempts++ < max_attempts) {
      for (std::size_t k = 1; k < horizon; ++k) w[k] = static_cast<ControlIndex>(pick(rng));
      if (seen.insert(key(w)).second) {
        words.push_back(w);
        ++got;
      }
    }
  }
  std::sort(words.begin(), words.end());
  std::vector<ControlIndex> flat;
  flat.reserve(words.size() * horizon);
  for (const auto& w : words) flat.insert(flat.end(), w.begin(), w.end());
  return WordPool(horizon, std::move(flat), false);
}

WordPool make_pool(std::uint64_t alphabet_size, std::size_t horizon, const PoolOptions& options) {
  if (word_count(alphabet_size, horizon) <= options.cap) {
    return enumerate_words(alphabet_size, horizon);
  }
  return sample_words(alphabet_size, horizon, options.cap, options.seed);
}

}  // namespace invarion
