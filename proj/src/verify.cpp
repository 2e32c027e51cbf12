#include "invarion/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <sstream>

#include "invarion/channel.hpp"
#include "invarion/closed_loop.hpp"
#include "invarion/cover.hpp"
#include "invarion/frontier.hpp"
#include "invarion/linear.hpp"
#include "invarion/records.hpp"
#include "invarion/region.hpp"
#include "invarion/span_solver.hpp"
#include "invarion/system.hpp"

namespace invarion {

bool VerifyReport::all_passed() const { return failures() == 0; }

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.passed; }));
}

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double a, double b) {
  return std::uniform_real_distribution<double>(a, b)(rng);
}

std::size_t pick(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

ControlWord random_word(Rng& rng, std::uint64_t alphabet, std::size_t tau) {
  ControlWord w;
  for (std::size_t k = 0; k < tau; ++k) w.entries.push_back(static_cast<ControlIndex>(pick(rng, alphabet)));
  return w;
}

SystemDef random_linear(Rng& rng, std::size_t d) {
  Eigen::MatrixXd A(d, d), B(d, 1);
  for (std::size_t r = 0; r < d; ++r) {
    B(r, 0) = uniform(rng, -1, 1);
    for (std::size_t c = 0; c < d; ++c) A(r, c) = uniform(rng, -1.5, 1.5);
  }
  return SystemDef::linear(A, B, ControlAlphabet::uniform(-1, 1, 5));
}

// Lattice-exact scalar doubling on [-1/2, 1/2] with spacing 1/8.
SystemDef doubling() {
  return SystemDef::linear(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Ones(1, 1),
                           ControlAlphabet::uniform(-1, 1, 17));
}

// Two lattice-exact doubling components on a square, spacing 1/4.
SystemDef doubling_pair() {
  auto c = SystemDef::linear(Eigen::MatrixXd::Constant(1, 1, 2.0), Eigen::MatrixXd::Ones(1, 1),
                             ControlAlphabet::uniform(-1, 1, 9));
  return SystemDef::product({c, c});
}

std::size_t brute_force_cover(const CoverInstance& inst) {
  const std::size_t n = inst.candidate_count();
  std::size_t best = n + 1;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    const auto size = static_cast<std::size_t>(std::popcount(mask));
    if (size >= best) continue;
    Bitset u(inst.element_count);
    for (std::size_t j = 0; j < n; ++j) {
      if (mask >> j & 1) u |= inst.coverage[j];
    }
    if (u.all()) best = size;
  }
  return best;
}

bool dominates(const std::vector<double>& a, const std::vector<double>& b) {
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] > b[i]) return false;
    if (a[i] < b[i]) strict = true;
  }
  return strict;
}

class Runner {
 public:
  explicit Runner(std::uint64_t seed) : seed_(seed) {}

  void check(const std::string& suite, const std::string& name,
             const std::function<std::string()>& body) {
    PropertyResult r{suite, name, false, {}};
    try {
      r.detail = body();
      r.passed = r.detail.empty();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    report.results.push_back(std::move(r));
  }

  Rng rng(std::uint64_t salt) const { return Rng(seed_ * 0x9e3779b97f4a7c15ULL + salt); }

  VerifyReport report;

 private:
  std::uint64_t seed_;
};

}  // namespace

VerifyReport run_property_suites(std::uint64_t seed, std::size_t trials) {
  Runner run(seed);

  // --- systems -------------------------------------------------------------
  run.check("systems", "product trajectories equal componentwise trajectories", [&] {
    auto rng = run.rng(1);
    for (std::size_t t = 0; t < trials; ++t) {
      auto a = random_linear(rng, 1 + pick(rng, 2));
      auto b = SystemDef::circle_multiplier(2 + static_cast<int>(pick(rng, 3)),
                                            ControlAlphabet::uniform(-0.5, 0.5, 3));
      auto p = SystemDef::product({a, b});
      State x;
      for (std::size_t i = 0; i < p.state_dim(); ++i) x.push_back(uniform(rng, 0, 1));
      const auto w = random_word(rng, p.alphabet_size(), 6);
      const auto joint = trajectory(p, x, w);
      for (std::size_t c = 0; c < 2; ++c) {
        const auto off = p.component_offset(c);
        const auto& sys = p.component(c);
        State xc(x.begin() + off, x.begin() + off + sys.state_dim());
        const auto part = trajectory(sys, xc, p.project_word(w, c));
        for (std::size_t k = 0; k < part.size(); ++k) {
          for (std::size_t a2 = 0; a2 < xc.size(); ++a2) {
            if (joint[k][off + a2] != part[k][a2]) return std::string("mismatch at step ") + std::to_string(k);
          }
        }
      }
    }
    return std::string();
  });

  run.check("systems", "trajectories are deterministic", [&] {
    auto rng = run.rng(2);
    auto s = random_linear(rng, 3);
    const State x{0.1, -0.2, 0.3};
    const auto w = random_word(rng, s.alphabet_size(), 20);
    return trajectory(s, x, w) == trajectory(s, x, w) ? std::string() : std::string("differs");
  });

  run.check("systems", "circle multiplier stays in [0, 1)", [&] {
    auto rng = run.rng(3);
    auto s = SystemDef::circle_multiplier(-3, ControlAlphabet::uniform(-1, 1, 33));
    for (std::size_t t = 0; t < 100 * trials; ++t) {
      const State x{uniform(rng, 0, 1)};
      for (const auto& y : trajectory(s, x, random_word(rng, s.alphabet_size(), 8))) {
        if (!(y[0] >= 0.0 && y[0] < 1.0)) return "state " + format_double(y[0]);
      }
    }
    return std::string();
  });

  // --- regions -------------------------------------------------------------
  run.check("regions", "grid points are members of Q", [&] {
    const std::vector<GridRegion> regions{
        GridRegion::box({-1, 0}, {1, 2}, 7), GridRegion::circle_band(0.1, 64),
        GridRegion::ball({0, 0}, 1.0, 15),
        GridRegion::linear_image(Eigen::Matrix2d{{2, 1}, {0, 1}}, {0, 0}, {1, 1}, 5)};
    for (const auto& r : regions) {
      const auto g = discretize(r);
      for (std::size_t e = 0; e < g.size(); ++e) {
        if (!r.contains(g.point(e))) return r.shape_name() + " point outside";
      }
    }
    return std::string();
  });

  run.check("regions", "interior with a margin implies interior with a smaller one", [&] {
    auto rng = run.rng(4);
    const auto band = GridRegion::circle_band(0.2, 64);
    const auto box = GridRegion::box({-1, -1}, {1, 1}, 9);
    for (std::size_t t = 0; t < 200 * trials; ++t) {
      const State x{uniform(rng, -1, 1), uniform(rng, -1, 1)};
      const State y{uniform(rng, 0, 1), uniform(rng, 0, 1)};
      const double m = uniform(rng, 0, 0.3), m2 = uniform(rng, 0, m);
      if (box.in_interior(x, m) && !box.in_interior(x, m2)) return std::string("box");
      if (band.in_interior(y, m) && !band.in_interior(y, m2)) return std::string("band");
    }
    return std::string();
  });

  run.check("regions", "projected grid points lie in the projected region", [&] {
    const std::vector<GridRegion> regions{GridRegion::box({-1, 0}, {1, 2}, 7),
                                          GridRegion::circle_band(0.1, 64),
                                          GridRegion::ball({0.5, 0}, 1.0, 11)};
    for (const auto& r : regions) {
      const auto g = discretize(r);
      for (std::size_t axis = 0; axis < 2; ++axis) {
        const auto p = project(r, axis, 1);
        for (std::size_t e = 0; e < g.size(); ++e) {
          const State x{g.point(e)[axis]};
          if (!p.contains(x)) return r.shape_name() + " projection misses a point";
        }
      }
    }
    return std::string();
  });

  // --- span solver ---------------------------------------------------------
  run.check("span-solver", "exact cover equals brute force and never exceeds greedy", [&] {
    auto rng = run.rng(5);
    for (std::size_t t = 0; t < 5 * trials; ++t) {
      CoverInstance inst;
      inst.element_count = 8 + pick(rng, 13);
      const std::size_t cands = 4 + pick(rng, 9);
      for (std::size_t j = 0; j < cands; ++j) {
        Bitset b(inst.element_count);
        for (std::size_t e = 0; e < inst.element_count; ++e) {
          if (uniform(rng, 0, 1) < 0.3) b.set(e);
        }
        inst.coverage.push_back(b);
      }
      if (!inst.uncovered().empty()) continue;
      const auto exact = min_cover(inst, SolveMode::kExact);
      const auto greedy = min_cover(inst, SolveMode::kGreedy);
      if (exact.chosen.size() != brute_force_cover(inst)) return std::string("exact != brute force");
      if (exact.chosen.size() > greedy.chosen.size()) return std::string("exact > greedy");
    }
    return std::string();
  });

  run.check("span-solver", "subsystem cardinality is monotone in the horizon", [&] {
    const auto sys = doubling_pair();
    const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
    std::size_t prev = 0;
    for (std::size_t tau = 1; tau <= 3; ++tau) {
      const auto r = r_inv_subsystem(sys, q, tau, 0).cardinality;
      if (r < prev) return "decreased at tau " + std::to_string(tau);
      prev = r;
    }
    return std::string();
  });

  run.check("span-solver", "enlarging the alphabet never increases the cardinality", [&] {
    const auto q = GridRegion::box({-0.5}, {0.5}, 9);
    const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, 2.0), B = Eigen::MatrixXd::Ones(1, 1);
    const auto coarse = SystemDef::linear(A, B, ControlAlphabet::uniform(-1, 1, 9));
    const auto fine = doubling();
    for (std::size_t tau = 1; tau <= 2; ++tau) {
      if (r_inv(fine, q, tau).cardinality > r_inv(coarse, q, tau).cardinality) {
        return "larger at tau " + std::to_string(tau);
      }
    }
    return std::string();
  });

  run.check("span-solver", "concatenated subsystem witnesses span at the summed horizon", [&] {
    const auto sys = doubling_pair();
    const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
    for (std::size_t i = 0; i < 2; ++i) {
      const auto a = r_inv_subsystem(sys, q, 1, i);
      const auto b = r_inv_subsystem(sys, q, 2, i);
      const auto cat = concatenate_all(a.solution.words, b.solution.words);
      if (!verify_subsystem_spanning(sys, q, i, cat)) return "component " + std::to_string(i);
      if (r_inv_subsystem(sys, q, 3, i).cardinality > a.cardinality * b.cardinality) {
        return "not submultiplicative for component " + std::to_string(i);
      }
    }
    return std::string();
  });

  run.check("span-solver", "sandwich between projection and full system", [&] {
    const auto sys = doubling_pair();
    const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
    for (std::size_t tau = 1; tau <= 2; ++tau) {
      const auto full = r_inv(sys, q, tau).cardinality;
      for (std::size_t i = 0; i < 2; ++i) {
        const auto sub = r_inv_subsystem(sys, q, tau, i).cardinality;
        const auto proj = r_inv(sys.component(i), project(q, i, 1), tau).cardinality;
        if (!(proj <= sub && sub <= full)) return "violated at tau " + std::to_string(tau);
      }
    }
    return std::string();
  });

  run.check("span-solver", "frontier points are Pareto and their witnesses span", [&] {
    const auto sys = doubling_pair();
    const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
    const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
    if (f.points.empty()) return std::string("no points");
    const auto full = r_inv(sys, q, 1).cardinality;
    for (std::size_t a = 0; a < f.points.size(); ++a) {
      if (!product_covers(sys, q, f.points[a].witness)) return std::string("witness fails");
      std::size_t product = 1;
      for (const auto& s : f.points[a].witness) product *= s.size();
      if (product < full) return std::string("product smaller than the minimal spanning set");
      for (std::size_t b = 0; b < f.points.size(); ++b) {
        if (a != b && dominates(f.points[a].rates, f.points[b].rates)) {
          return std::string("dominated point kept");
        }
      }
    }
    return std::string();
  });

  // --- linear analysis -----------------------------------------------------
  run.check("linear", "unstable entropy is similarity invariant", [&] {
    auto rng = run.rng(6);
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t d = 2 + pick(rng, 3);
      Eigen::MatrixXd A = Eigen::MatrixXd::Random(d, d) * 2.0;
      Eigen::MatrixXd T = Eigen::MatrixXd::Random(d, d) + 3.0 * Eigen::MatrixXd::Identity(d, d);
      const double h = unstable_entropy(A), h2 = unstable_entropy(T * A * T.inverse());
      if (std::abs(h - h2) > 1e-6) return "differs by " + format_double(h - h2);
    }
    return std::string();
  });

  run.check("linear", "Brunovsky forms have zero unstable entropy", [&] {
    auto rng = run.rng(7);
    std::size_t done = 0;
    while (done < trials) {
      const std::size_t d = 1 + pick(rng, 4), m = 1 + pick(rng, std::min<std::size_t>(d, 2));
      LinearPair p{Eigen::MatrixXd::Random(d, d) * 2.0, Eigen::MatrixXd::Random(d, m)};
      if (!controllable(p).controllable) continue;
      const auto bf = brunovsky(p);
      const auto img = transform_pair(p, bf.transformation);
      if ((img.A - bf.canonical.A).norm() > 1e-8 || (img.B - bf.canonical.B).norm() > 1e-8) {
        return std::string("canonical identities fail");
      }
      if (unstable_entropy(bf.canonical.A) != 0.0) return std::string("nonzero entropy");
      ++done;
    }
    return std::string();
  });

  run.check("linear", "thresholds sum to the block-diagonal entropy", [&] {
    auto rng = run.rng(8);
    for (std::size_t t = 0; t < trials; ++t) {
      std::vector<LinearPair> pairs;
      std::vector<Eigen::MatrixXd> blocks;
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t d = 1 + pick(rng, 3);
        pairs.push_back({Eigen::MatrixXd::Random(d, d) * 2.0, Eigen::MatrixXd::Random(d, 1)});
        blocks.push_back(pairs.back().A);
      }
      double sum = 0.0;
      for (double h : rectangular_entropy_set(pairs).thresholds) sum += h;
      if (std::abs(sum - unstable_entropy(blockdiag(blocks))) > 1e-6) return std::string("sum differs");
    }
    return std::string();
  });

  // --- channel -------------------------------------------------------------
  run.check("channel", "block-channel confusability equals the strong power", [&] {
    auto rng = run.rng(9);
    for (std::size_t t = 0; t < trials; ++t) {
      const std::size_t n = 2 + pick(rng, 4);
      std::vector<std::vector<Symbol>> rel(n);
      std::vector<std::string> names;
      for (std::size_t b = 0; b < n; ++b) {
        names.push_back(std::to_string(b));
        for (std::size_t o = 0; o < n; ++o) {
          if (o == b || uniform(rng, 0, 1) < 0.25) rel[b].push_back(static_cast<Symbol>(o));
        }
      }
      const Channel ch(names, rel);
      const std::size_t kmax = n <= 3 ? 3 : 2;
      for (std::size_t k = 1; k <= kmax; ++k) {
        if (!(confusability_graph(block_channel(ch, k)) == strong_power(confusability_graph(ch), k))) {
          return "k = " + std::to_string(k);
        }
      }
    }
    return std::string();
  });

  run.check("channel", "independence number is supermultiplicative", [&] {
    auto rng = run.rng(10);
    for (std::size_t t = 0; t < trials; ++t) {
      auto random_graph = [&](std::size_t n) {
        Graph g(n);
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) {
            if (uniform(rng, 0, 1) < 0.4) g.add_edge(a, b);
          }
        }
        return g;
      };
      const auto g = random_graph(2 + pick(rng, 5)), h = random_graph(2 + pick(rng, 5));
      if (max_independent_set(strong_product(g, h)).size <
          max_independent_set(g).size * max_independent_set(h).size) {
        return std::string("violated");
      }
    }
    return std::string();
  });

  run.check("channel", "codebooks are distinguishable and bounds are ordered", [&] {
    for (const auto& ch : {Channel::pentagon(), Channel::noiseless(2), Channel::all_confusable(3)}) {
      double prev = -1.0;
      for (std::size_t k = 1; k <= 2; ++k) {
        const auto b = zero_error_capacity_bounds(ch, k);
        if (b.lower > b.upper + 1e-12) return std::string("lower above upper");
        if (b.lower < prev) return std::string("lower bound decreased");
        prev = b.lower;
        const auto cb = build_codebook(ch, k, certified_codebook_size(ch, k));
        if (!verify_codebook(ch, cb)) return std::string("codebook not distinguishable");
      }
    }
    return std::string();
  });

  // --- closed loop ---------------------------------------------------------
  run.check("closed-loop", "certified strategy is sound under every resolution", [&] {
    const auto sys = doubling();
    const auto q = GridRegion::box({-0.5}, {0.5}, 9);
    const auto sol = r_inv(sys, q, 2).solution;
    // Pairs {2j, 2j+1} are confusable: four distinguishable symbols per step.
    std::vector<std::vector<Symbol>> rel;
    std::vector<std::string> names;
    for (Symbol b = 0; b < 8; ++b) {
      names.push_back(std::to_string(b));
      rel.push_back({b & ~1u, b | 1u});
    }
    const Channel ch(names, rel);
    const auto strategy = build_strategy(sol, ch, q);
    const auto grid = discretize(q);
    std::vector<State> x0;
    for (std::size_t e = 0; e < grid.size(); ++e) x0.emplace_back(grid.point(e).begin(), grid.point(e).end());
    for (const auto& adv : exhaustive_adversaries(strategy)) {
      const auto scan = escape_scan(sys, q, strategy, adv, 40, x0);
      if (scan.escapes > 0) return std::string("escape under a resolution");
      const auto t = simulate(sys, q, strategy, adv, 40, x0.front());
      if (t.decode_mismatches != 0) return std::string("decoder mismatch");
    }
    return std::string();
  });

  run.check("closed-loop", "achieved rate covers the spanning cardinality", [&] {
    const auto sys = doubling();
    const auto q = GridRegion::box({-0.5}, {0.5}, 9);
    const auto sol = r_inv(sys, q, 2).solution;
    const auto strategy = build_strategy(sol, Channel::noiseless(4), q);
    std::set<std::uint32_t> used(sol.selector.begin(), sol.selector.end());
    const double rate = achieved_rates(strategy).front();
    return rate == std::log2(static_cast<double>(used.size())) / 2.0 &&
                   used.size() <= sol.cardinality()
               ? std::string()
               : std::string("rate mismatch");
  });

  // --- records -------------------------------------------------------------
  run.check("records", "JSON records round-trip", [&] {
    const auto sys = doubling_pair();
    const auto q = GridRegion::box({-0.5, -0.5}, {0.5, 0.5}, 5);
    const auto sol = r_inv(sys, q, 1).solution;
    if (!(nlohmann::json(sol).get<SpanningSolution>() == sol)) return std::string("solution");
    const auto f = frontier(sys, q, 1, pivot_pools(sys, q, 1));
    if (!(nlohmann::json::parse(nlohmann::json(f).dump()).get<EntropyFrontier>() == f)) {
      return std::string("frontier");
    }
    const auto single = doubling();
    const auto q1 = GridRegion::box({-0.5}, {0.5}, 9);
    const auto strategy = build_strategy(r_inv(single, q1, 2).solution, Channel::noiseless(4), q1);
    const auto t = simulate(single, q1, strategy, Adversary::seeded_random(3), 10, State{0.125});
    std::stringstream ss;
    write_transcript_jsonl(ss, t, {1, 2});
    if (!(read_transcript_jsonl(ss) == t)) return std::string("transcript");
    return std::string();
  });

  return run.report;
}

}  // namespace invarion
