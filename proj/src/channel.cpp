#include "invarion/channel.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "invarion/errors.hpp"

namespace invarion {

Channel::Channel(std::vector<std::string> names, std::vector<std::vector<Symbol>> relation)
    : names_(std::move(names)), relation_(std::move(relation)) {
  if (relation_.empty()) throw InputError("channel alphabet must be nonempty");
  if (names_.empty()) {
    for (std::size_t b = 0; b < relation_.size(); ++b) names_.push_back(std::to_string(b));
  }
  if (names_.size() != relation_.size()) throw InputError("channel names and relation differ");
  for (std::size_t b = 0; b < relation_.size(); ++b) {
    auto& out = relation_[b];
    if (out.empty()) throw InputError("channel: κ(" + names_[b] + ") is empty");
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.back() >= relation_.size()) {
      throw InputError("channel: κ(" + names_[b] + ") names an unknown symbol");
    }
  }
}

Channel Channel::noiseless(std::size_t n) {
  std::vector<std::vector<Symbol>> rel(n);
  for (std::size_t b = 0; b < n; ++b) rel[b] = {static_cast<Symbol>(b)};
  return Channel({}, std::move(rel));
}

Channel Channel::all_confusable(std::size_t n) {
  std::vector<Symbol> all(n);
  std::iota(all.begin(), all.end(), Symbol{0});
  return Channel({}, std::vector<std::vector<Symbol>>(n, all));
}

Channel Channel::pentagon() {
  std::vector<std::vector<Symbol>> rel(5);
  for (Symbol b = 0; b < 5; ++b) rel[b] = {b, static_cast<Symbol>((b + 1) % 5)};
  return Channel({}, std::move(rel));
}

bool Channel::can_output(Symbol b, Symbol out) const {
  const auto& o = relation_[b];
  return std::binary_search(o.begin(), o.end(), out);
}

Graph::Graph(std::size_t n) : adj_(n, Bitset(n)) {}

void Graph::add_edge(std::size_t a, std::size_t b) {
  if (a == b) return;
  adj_[a].set(b);
  adj_[b].set(a);
}

std::size_t Graph::edge_count() const {
  std::size_t twice = 0;
  for (const auto& r : adj_) twice += r.count();
  return twice / 2;
}

Graph confusability_graph(const Channel& channel) {
  const std::size_t n = channel.size();
  Graph g(n);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      const auto& x = channel.outputs(static_cast<Symbol>(a));
      const auto& y = channel.outputs(static_cast<Symbol>(b));
      std::vector<Symbol> common;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(common));
      if (!common.empty()) g.add_edge(a, b);
    }
  }
  return g;
}

Graph strong_product(const Graph& g, const Graph& h) {
  const std::size_t ng = g.size(), nh = h.size();
  Graph out(ng * nh);
  for (std::size_t a = 0; a < ng; ++a) {
    for (std::size_t a2 = 0; a2 < ng; ++a2) {
      if (a != a2 && !g.adjacent(a, a2)) continue;
      for (std::size_t b = 0; b < nh; ++b) {
        for (std::size_t b2 = 0; b2 < nh; ++b2) {
          if (b != b2 && !h.adjacent(b, b2)) continue;
          out.add_edge(a * nh + b, a2 * nh + b2);
        }
      }
    }
  }
  return out;
}

Graph strong_power(const Graph& g, std::size_t k) {
  if (k == 0) throw InputError("strong power needs k ≥ 1");
  Graph out = g;
  for (std::size_t i = 1; i < k; ++i) out = strong_product(out, g);
  return out;
}

Channel block_channel(const Channel& channel, std::size_t k) {
  if (k == 0) throw InputError("block length must be positive");
  const std::size_t n = channel.size();
  std::size_t total = 1;
  for (std::size_t i = 0; i < k; ++i) {
    total *= n;
    if (total > (std::size_t{1} << 20)) throw InputError("block channel alphabet too large");
  }
  std::vector<std::vector<Symbol>> rel(total);
  std::vector<Symbol> symbols(k);
  for (std::size_t w = 0; w < total; ++w) {
    std::size_t r = w;
    for (std::size_t i = k; i-- > 0;) {
      symbols[i] = static_cast<Symbol>(r % n);
      r /= n;
    }
    std::vector<Symbol> outs{0};
    for (auto b : symbols) {
      std::vector<Symbol> next;
      for (auto o : outs) {
        for (auto s : channel.outputs(b)) next.push_back(static_cast<Symbol>(o * n + s));
      }
      outs = std::move(next);
    }
    rel[w] = std::move(outs);
  }
  return Channel({}, std::move(rel));
}

namespace {

// Maximum clique of the complement graph (Tomita-style colouring bound).
class MisSearch {
 public:
  explicit MisSearch(const Graph& g) : n_(g.size()), nbr_(n_, 0) {
    for (std::size_t a = 0; a < n_; ++a) {
      for (std::size_t b = 0; b < n_; ++b) {
        if (a != b && !g.adjacent(a, b)) nbr_[a] |= std::uint64_t{1} << b;
      }
    }
    // Initial order: decreasing complement degree, ties by index.
    order_.resize(n_);
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
      return std::popcount(nbr_[a]) > std::popcount(nbr_[b]);
    });
  }

  std::uint64_t run() {
    const std::uint64_t all = n_ == 64 ? ~0ull : ((std::uint64_t{1} << n_) - 1);
    expand(0, all);
    return best_;
  }

 private:
  void expand(std::uint64_t r, std::uint64_t p) {
    std::vector<std::size_t> verts;
    std::vector<int> colors;
    color_sort(p, verts, colors);
    for (std::size_t i = verts.size(); i-- > 0;) {
      const int size_r = std::popcount(r);
      if (size_r + colors[i] <= best_size_) return;
      const std::size_t v = verts[i];
      const std::uint64_t r2 = r | (std::uint64_t{1} << v);
      const std::uint64_t p2 = p & nbr_[v];
      if (p2 == 0) {
        const int s = size_r + 1;
        if (s > best_size_ || (s == best_size_ && r2 < best_)) {
          best_size_ = s;
          best_ = r2;
        }
      } else {
        expand(r2, p2);
      }
      p &= ~(std::uint64_t{1} << v);
    }
  }

  // Greedy colouring of P in the fixed vertex order; vertices returned by
  // non-decreasing colour.
  void color_sort(std::uint64_t p, std::vector<std::size_t>& verts, std::vector<int>& colors) {
    std::vector<std::size_t> pending;
    for (auto v : order_) {
      if ((p >> v) & 1) pending.push_back(v);
    }
    int color = 0;
    while (!pending.empty()) {
      ++color;
      std::uint64_t used = 0;
      std::vector<std::size_t> rest;
      for (auto v : pending) {
        if (used & (std::uint64_t{1} << v)) {
          rest.push_back(v);
        } else {
          verts.push_back(v);
          colors.push_back(color);
          used |= nbr_[v];
        }
      }
      pending = std::move(rest);
    }
  }

  std::size_t n_;
  std::vector<std::uint64_t> nbr_;
  std::vector<std::size_t> order_;
  int best_size_ = 0;
  std::uint64_t best_ = 0;
};

std::size_t int_pow(std::size_t b, std::size_t e, std::size_t cap) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < e; ++i) {
    if (r > cap / std::max<std::size_t>(b, 1)) return cap + 1;
    r *= b;
  }
  return r;
}

// Block-length plan for product codebooks: lengths with exact MIS witnesses.
std::vector<std::size_t> product_plan(const Channel& channel, std::size_t k,
                                      std::vector<IndependentSet>& by_length) {
  const Graph g = confusability_graph(channel);
  by_length.assign(1, IndependentSet{});
  std::size_t max_b = 0;
  for (std::size_t b = 1; b <= k; ++b) {
    if (int_pow(channel.size(), b, kExactMisCap) > kExactMisCap) break;
    by_length.push_back(max_independent_set(strong_power(g, b)));
    max_b = b;
  }
  if (max_b == 0) throw InputError("channel alphabet exceeds the exact MIS cap");
  std::vector<std::size_t> plan;
  if (max_b == k) return {k};
  std::size_t best = 1;
  for (std::size_t b = 1; b <= max_b; ++b) {
    const double rb = std::log2(static_cast<double>(by_length[b].size)) / static_cast<double>(b);
    const double rbest =
        std::log2(static_cast<double>(by_length[best].size)) / static_cast<double>(best);
    if (rb > rbest + 1e-12) best = b;
  }
  for (std::size_t left = k; left > 0;) {
    const std::size_t len = std::min(best, left);
    plan.push_back(len);
    left -= len;
  }
  return plan;
}

std::vector<Symbol> block_symbols(std::size_t vertex, std::size_t n, std::size_t len) {
  std::vector<Symbol> out(len);
  for (std::size_t i = len; i-- > 0;) {
    out[i] = static_cast<Symbol>(vertex % n);
    vertex /= n;
  }
  return out;
}

}  // namespace

IndependentSet max_independent_set(const Graph& graph) {
  if (graph.size() > kExactMisCap) {
    throw InputError("max_independent_set: " + std::to_string(graph.size()) +
                     " vertices exceed the exact cap of " + std::to_string(kExactMisCap) +
                     "; use the capacity bound mode");
  }
  IndependentSet out;
  if (graph.size() == 0) return out;
  MisSearch search(graph);
  const std::uint64_t mask = search.run();
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if ((mask >> v) & 1) out.witness.push_back(v);
  }
  out.size = out.witness.size();
  return out;
}

std::vector<std::vector<std::size_t>> greedy_clique_cover(const Graph& graph) {
  const std::size_t n = graph.size();
  std::vector<bool> covered(n, false);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return graph.degree(a) > graph.degree(b); });
  std::vector<std::vector<std::size_t>> cliques;
  for (auto seed : order) {
    if (covered[seed]) continue;
    std::vector<std::size_t> clique{seed};
    covered[seed] = true;
    for (auto v : order) {
      if (covered[v]) continue;
      const bool joins = std::all_of(clique.begin(), clique.end(),
                                     [&](std::size_t c) { return graph.adjacent(c, v); });
      if (joins) {
        clique.push_back(v);
        covered[v] = true;
      }
    }
    std::sort(clique.begin(), clique.end());
    cliques.push_back(std::move(clique));
  }
  return cliques;
}

CapacityBounds zero_error_capacity_bounds(const Channel& channel, std::size_t k_max) {
  if (k_max == 0) throw InputError("k_max must be at least 1");
  CapacityBounds out;
  const Graph g = confusability_graph(channel);
  bool first = true;
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (int_pow(channel.size(), k, kExactMisCap) > kExactMisCap) {
      out.diagnostics.push_back("block length " + std::to_string(k) + " exceeds the exact MIS cap (" +
                                std::to_string(kExactMisCap) + " vertices); bounds use k ≤ " +
                                std::to_string(k - 1));
      break;
    }
    const Graph gk = strong_power(g, k);
    BlockBound b;
    b.k = k;
    b.independence = max_independent_set(gk).size;
    b.clique_cover = greedy_clique_cover(gk).size();
    b.lower = std::log2(static_cast<double>(b.independence)) / static_cast<double>(k);
    b.upper = std::log2(static_cast<double>(b.clique_cover)) / static_cast<double>(k);
    out.lower = first ? b.lower : std::max(out.lower, b.lower);
    out.upper = first ? b.upper : std::min(out.upper, b.upper);
    first = false;
    out.per_k.push_back(b);
  }
  if (first) throw InputError("channel alphabet exceeds the exact MIS cap at block length 1");
  return out;
}

std::size_t certified_codebook_size(const Channel& channel, std::size_t k) {
  if (k == 0) throw InputError("block length must be positive");
  std::vector<IndependentSet> by_length;
  const auto plan = product_plan(channel, k, by_length);
  double size = 1.0;
  for (auto len : plan) size *= static_cast<double>(by_length[len].size);
  return size > 1e18 ? static_cast<std::size_t>(1e18) : static_cast<std::size_t>(size);
}

Codebook build_codebook(const Channel& channel, std::size_t k, std::size_t size) {
  if (k == 0) throw InputError("block length must be positive");
  if (size == 0) throw InputError("codebook size must be positive");
  std::vector<IndependentSet> by_length;
  const auto plan = product_plan(channel, k, by_length);
  double available = 1.0;
  for (auto len : plan) available *= static_cast<double>(by_length[len].size);
  if (static_cast<double>(size) > available) {
    const auto avail = static_cast<std::size_t>(std::min(available, 1e18));
    throw CapacityError("codebook of " + std::to_string(size) + " words at block length " +
                            std::to_string(k) + " exceeds the certified maximum of " +
                            std::to_string(avail),
                        size, avail);
  }
  Codebook cb;
  cb.block_length = k;
  const std::size_t n = channel.size();
  std::vector<std::size_t> digit(plan.size(), 0);
  for (std::size_t w = 0; w < size; ++w) {
    std::vector<Symbol> word;
    for (std::size_t p = 0; p < plan.size(); ++p) {
      const auto& mis = by_length[plan[p]];
      const auto part = block_symbols(mis.witness[digit[p]], n, plan[p]);
      word.insert(word.end(), part.begin(), part.end());
    }
    cb.words.push_back(std::move(word));
    for (std::size_t p = plan.size(); p-- > 0;) {
      if (++digit[p] < by_length[plan[p]].size) break;
      digit[p] = 0;
    }
  }
  return cb;
}

bool verify_codebook(const Channel& channel, const Codebook& codebook) {
  for (const auto& w : codebook.words) {
    if (w.size() != codebook.block_length) return false;
    for (auto s : w) {
      if (s >= channel.size()) return false;
    }
  }
  const Graph g = confusability_graph(channel);
  for (std::size_t a = 0; a < codebook.size(); ++a) {
    for (std::size_t b = a + 1; b < codebook.size(); ++b) {
      bool separated = false;
      for (std::size_t t = 0; t < codebook.block_length && !separated; ++t) {
        const auto x = codebook.words[a][t], y = codebook.words[b][t];
        separated = x != y && !g.adjacent(x, y);
      }
      if (!separated) return false;
    }
  }
  return true;
}

std::optional<std::size_t> decode(const Channel& channel, const Codebook& codebook,
                                  std::span<const Symbol> received) {
  if (received.size() != codebook.block_length) throw InputError("received block has wrong length");
  for (std::size_t w = 0; w < codebook.size(); ++w) {
    bool match = true;
    for (std::size_t t = 0; t < received.size() && match; ++t) {
      match = channel.can_output(codebook.words[w][t], received[t]);
    }
    if (match) return w;
  }
  return std::nullopt;
}

std::uint64_t resolution_count(const Channel& channel) {
  std::uint64_t n = 1;
  for (const auto& o : channel.relation()) {
    if (n > UINT64_MAX / o.size()) return UINT64_MAX;
    n *= o.size();
  }
  return n;
}

std::vector<Resolution> enumerate_resolutions(const Channel& channel, std::uint64_t limit) {
  const std::uint64_t total = resolution_count(channel);
  if (total > limit) {
    throw InputError("channel has " + std::to_string(total) +
                     " deterministic resolutions; exhaustive enumeration is limited to " +
                     std::to_string(limit));
  }
  std::vector<Resolution> out;
  std::vector<std::size_t> digit(channel.size(), 0);
  for (std::uint64_t r = 0; r < total; ++r) {
    Resolution res(channel.size());
    for (std::size_t b = 0; b < channel.size(); ++b) {
      res[b] = channel.outputs(static_cast<Symbol>(b))[digit[b]];
    }
    out.push_back(std::move(res));
    for (std::size_t b = channel.size(); b-- > 0;) {
      if (++digit[b] < channel.outputs(static_cast<Symbol>(b)).size()) break;
      digit[b] = 0;
    }
  }
  return out;
}

Resolution random_resolution(const Channel& channel, std::mt19937_64& rng) {
  Resolution res(channel.size());
  for (std::size_t b = 0; b < channel.size(); ++b) {
    const auto& o = channel.outputs(static_cast<Symbol>(b));
    std::uniform_int_distribution<std::size_t> pick(0, o.size() - 1);
    res[b] = o[pick(rng)];
  }
  return res;
}

}  // namespace invarion
