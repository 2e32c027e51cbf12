// invarion — command-line front end for entropy, frontier, capacity, linear
// formula, closed-loop and property-check runs.

#include <omp.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>

#include "CLI11.hpp"

#include "invarion/channel.hpp"
#include "invarion/closed_loop.hpp"
#include "invarion/config.hpp"
#include "invarion/errors.hpp"
#include "invarion/frontier.hpp"
#include "invarion/linear.hpp"
#include "invarion/records.hpp"
#include "invarion/span_solver.hpp"
#include "invarion/verify.hpp"

namespace fs = std::filesystem;
using namespace invarion;
using nlohmann::json;

namespace {

struct Context {
  ScenarioConfig config;
  std::uint64_t seed = 0;
  fs::path out;
  Provenance provenance;
};

std::optional<std::uint64_t> env_uint(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != std::string(v).size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(name, "environment override is not a nonnegative integer");
  }
}

SolveOptions solve_options(const Context& c) {
  SolveOptions o;
  o.mode = c.config.mode;
  o.pool.cap = c.config.pool_cap;
  o.pool.seed = c.seed;
  o.cover.node_budget = c.config.node_budget;
  return o;
}

std::string rate_string(double v) { return format_double(v); }

int cmd_entropy(const Context& c) {
  const auto sys = build_system(c.config);
  const auto region = build_region(c.config.region);
  CsvTable csv({"tau", "component", "cardinality", "rate", "optimal", "pool_size", "pool_exhaustive"},
               c.provenance);
  json sols = json::array();
  std::vector<std::pair<std::size_t, std::size_t>> values;
  for (auto tau : c.config.taus) {
    const auto r = r_inv(sys, region, tau, solve_options(c));
    const double rate = std::log2(static_cast<double>(r.cardinality)) / static_cast<double>(tau);
    std::cout << "tau " << tau << ": r_inv = " << r.cardinality << ", rate = " << rate
              << " bits/step" << (r.solution.optimal ? "" : " (not proven minimal)")
              << (r.pool_exhaustive ? "" : " [sampled pool]") << '\n';
    csv.row({std::to_string(tau), "all", std::to_string(r.cardinality), rate_string(rate),
             r.solution.optimal ? "1" : "0", std::to_string(r.pool_size),
             r.pool_exhaustive ? "1" : "0"});
    sols.push_back(r.solution);
    values.emplace_back(tau, r.cardinality);
  }
  const auto est = entropy_estimate(values);
  std::cout << "estimate (minimum over tau): " << est.best << " bits/step\n";
  csv.write(c.out / "entropy.csv");
  write_json(c.out / "entropy.json",
             {{"command", "entropy"}, {"solutions", sols}, {"estimate", est.best},
              {"per_tau", est.per_tau}},
             c.provenance);
  return 0;
}

int cmd_subsystem(const Context& c) {
  const auto sys = build_system(c.config);
  const auto region = build_region(c.config.region);
  if (sys.component_count() < 2) {
    throw ConfigError("systems", "subsystem entropy needs at least two systems");
  }
  CsvTable csv({"tau", "component", "cardinality", "rate", "optimal"}, c.provenance);
  json out = json::array();
  for (auto i : c.config.subsystems) {
    std::vector<std::pair<std::size_t, std::size_t>> values;
    for (auto tau : c.config.taus) {
      const auto r = r_inv_subsystem(sys, region, tau, i, solve_options(c));
      const double rate = std::log2(static_cast<double>(r.cardinality)) / static_cast<double>(tau);
      std::cout << "component " << i << ", tau " << tau << ": r_inv = " << r.cardinality
                << ", rate = " << rate << " bits/step\n";
      csv.row({std::to_string(tau), std::to_string(i), std::to_string(r.cardinality),
               rate_string(rate), r.solution.optimal ? "1" : "0"});
      out.push_back({{"component", i}, {"solution", r.solution}});
      values.emplace_back(tau, r.cardinality);
    }
    std::cout << "component " << i << " estimate: " << entropy_estimate(values).best
              << " bits/step\n";
  }
  csv.write(c.out / "subsystem_entropy.csv");
  write_json(c.out / "subsystem_entropy.json", {{"command", "subsystem-entropy"}, {"solutions", out}},
             c.provenance);
  return 0;
}

EntropyFrontier run_frontier(const Context& c, const SystemDef& sys, const GridRegion& region,
                             std::size_t tau) {
  PivotPoolOptions po;
  po.max_words = c.config.frontier_max_words;
  FrontierOptions fo;
  fo.mode = c.config.mode;
  fo.cover.node_budget = c.config.node_budget;
  fo.exact = c.config.frontier_exact;
  fo.refine_rounds = c.config.refine_rounds;
  return frontier(sys, region, tau, pivot_pools(sys, region, tau, po), fo);
}

int cmd_frontier(const Context& c) {
  const auto sys = build_system(c.config);
  const auto region = build_region(c.config.region);
  const std::size_t n = sys.component_count();
  std::vector<std::string> cols{"tau", "point"};
  for (std::size_t i = 0; i < n; ++i) cols.push_back("h" + std::to_string(i + 1));
  for (std::size_t i = 0; i < n; ++i) cols.push_back("size" + std::to_string(i + 1));
  CsvTable csv(cols, c.provenance);
  json out = json::array();
  for (auto tau : c.config.taus) {
    const auto f = run_frontier(c, sys, region, tau);
    std::cout << "tau " << tau << ": " << f.points.size() << " Pareto points"
              << (f.upper_bound_only ? " (upper bound only)" : "") << '\n';
    for (const auto& d : f.diagnostics) std::cout << "  note: " << d << '\n';
    for (std::size_t p = 0; p < f.points.size(); ++p) {
      std::vector<std::string> row{std::to_string(tau), std::to_string(p)};
      std::cout << "  (";
      for (std::size_t i = 0; i < n; ++i) {
        row.push_back(format_double(f.points[p].rates[i]));
        std::cout << (i ? ", " : "") << f.points[p].rates[i];
      }
      std::cout << ")\n";
      for (std::size_t i = 0; i < n; ++i) row.push_back(std::to_string(f.points[p].witness[i].size()));
      csv.row(row);
    }
    out.push_back(f);
  }
  csv.write(c.out / "frontier.csv");
  write_json(c.out / "frontier.json", {{"command", "frontier"}, {"frontiers", out}}, c.provenance);
  return 0;
}

int cmd_capacity(const Context& c) {
  if (c.config.channels.empty()) throw ConfigError("channels", "no channels defined");
  CsvTable csv({"channel", "k", "independence", "clique_cover", "lower", "upper"}, c.provenance);
  json out = json::array();
  for (std::size_t i = 0; i < c.config.channels.size(); ++i) {
    const auto b = zero_error_capacity_bounds(c.config.channels[i], c.config.capacity_k_max);
    std::cout << "channel " << i << ": zero-error capacity in [" << b.lower << ", " << b.upper
              << "] bits/symbol\n";
    for (const auto& d : b.diagnostics) std::cout << "  note: " << d << '\n';
    for (const auto& k : b.per_k) {
      csv.row({std::to_string(i), std::to_string(k.k), std::to_string(k.independence),
               std::to_string(k.clique_cover), format_double(k.lower), format_double(k.upper)});
    }
    out.push_back(b);
  }
  csv.write(c.out / "capacity.csv");
  write_json(c.out / "capacity.json", {{"command", "capacity"}, {"channels", out}}, c.provenance);
  return 0;
}

int cmd_linear(const Context& c) {
  const auto pairs = linear_pairs(c.config);
  const auto set = rectangular_entropy_set(pairs);
  CsvTable csv({"component", "threshold", "controllable", "rank"}, c.provenance);
  json comps = json::array();
  std::vector<Eigen::MatrixXd> blocks;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto ctl = controllable(pairs[i]);
    std::cout << "component " << i << ": threshold " << set.thresholds[i] << " bits/step"
              << (ctl.controllable ? "" : " (pair not controllable)") << '\n';
    csv.row({std::to_string(i), format_double(set.thresholds[i]), ctl.controllable ? "1" : "0",
             std::to_string(ctl.rank)});
    comps.push_back({{"threshold", set.thresholds[i]},
                     {"controllable", ctl.controllable},
                     {"indices", ctl.indices}});
    blocks.push_back(pairs[i].A);
  }
  for (const auto& w : set.warnings) std::cout << "warning: " << w << '\n';
  const double total = unstable_entropy(blockdiag(blocks));
  std::cout << "H(Q) = product of [threshold_i, inf); total " << total << " bits/step\n";
  json body{{"command", "linear-formula"},
            {"components", comps},
            {"total", total},
            {"warnings", set.warnings}};
  if (c.config.absorbing) {
    const auto cert = strong_invariance_certificate(build_system(c.config),
                                                    build_region(c.config.region),
                                                    build_region(*c.config.absorbing));
    std::cout << "strong invariance (grid check): " << (cert.holds ? "holds" : "fails") << '\n';
    body["strong_invariance"] = {{"holds", cert.holds}, {"failures", cert.failures}};
  }
  csv.write(c.out / "linear_formula.csv");
  write_json(c.out / "linear_formula.json", body, c.provenance);
  return 0;
}

BlockCodingStrategy network_from_frontier(const Context& c, const SystemDef& sys,
                                          const GridRegion& region,
                                          const std::vector<Channel>& channels, std::size_t tau) {
  const auto f = run_frontier(c, sys, region, tau);
  std::optional<CapacityError> last;
  for (const auto& p : f.points) {
    try {
      return build_network_strategy(sys, region, p.witness, channels);
    } catch (const CapacityError& e) {
      last = e;
    }
  }
  if (last) throw *last;
  throw InfeasibleError("frontier has no points at this horizon", {});
}

int cmd_simulate(const Context& c) {
  if (!c.config.simulation) throw ConfigError("simulation", "section is missing");
  const auto& sim = *c.config.simulation;
  const auto sys = build_system(c.config);
  const auto region = build_region(c.config.region);
  std::vector<Channel> channels;
  for (auto i : sim.channels) channels.push_back(c.config.channels[i]);

  const auto strategy =
      sim.mode == "single"
          ? build_strategy(r_inv(sys, region, sim.tau, solve_options(c)).solution,
                           channels.front(), region)
          : network_from_frontier(c, sys, region, channels, sim.tau);

  const auto grid = discretize(region);
  std::vector<State> x0 = sim.x0;
  if (sim.x0_samples > 0) {
    std::vector<std::size_t> ids(grid.size());
    for (std::size_t e = 0; e < ids.size(); ++e) ids[e] = e;
    std::mt19937_64 rng(c.seed);
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(sim.x0_samples, ids.size()));
    std::sort(ids.begin(), ids.end());
    for (auto e : ids) x0.emplace_back(grid.point(e).begin(), grid.point(e).end());
  }

  std::vector<Adversary> adversaries;
  if (sim.adversary == "exhaustive") {
    adversaries = exhaustive_adversaries(strategy, sim.max_adversaries);
  } else if (sim.adversary == "seeded-random") {
    adversaries.push_back(Adversary::seeded_random(c.seed));
  } else {
    adversaries.push_back(Adversary::greedy_escape());
  }

  CsvTable csv({"run", "x0", "adversary", "steps", "ok", "first_escape", "decode_mismatches"},
               c.provenance);
  std::size_t escapes = 0, mismatches = 0, run = 0;
  std::optional<Transcript> shown;
  for (std::size_t a = 0; a < adversaries.size(); ++a) {
    for (std::size_t i = 0; i < x0.size(); ++i, ++run) {
      auto t = simulate(sys, region, strategy, adversaries[a], sim.horizon, x0[i]);
      escapes += t.ok ? 0 : 1;
      mismatches += t.decode_mismatches;
      csv.row({std::to_string(run), std::to_string(i), std::to_string(a), std::to_string(t.steps),
               t.ok ? "1" : "0", t.first_escape ? std::to_string(*t.first_escape) : "",
               std::to_string(t.decode_mismatches)});
      if (!shown || (shown->ok && !t.ok)) shown = std::move(t);
    }
  }
  const auto rates = achieved_rates(strategy);
  std::cout << "block length " << strategy.tau << ", " << strategy.links.size() << " link(s), "
            << "codebook sizes";
  for (const auto& l : strategy.links) std::cout << ' ' << l.codebook.size();
  std::cout << "\nachieved rates (bits/step):";
  for (double r : rates) std::cout << ' ' << r;
  std::cout << "\n" << run << " run(s), " << escapes << " escape(s), " << mismatches
            << " decoder mismatch(es)\nverdict: " << (escapes == 0 ? "invariant" : "escaped")
            << '\n';
  csv.write(c.out / "simulate.csv");
  {
    std::ofstream jl(c.out / "transcript.jsonl", std::ios::binary);
    write_transcript_jsonl(jl, *shown, c.provenance);
  }
  write_json(c.out / "simulate.json",
             {{"command", "simulate"},
              {"runs", run},
              {"escapes", escapes},
              {"decode_mismatches", mismatches},
              {"achieved_rates", rates},
              {"truncated", strategy.truncated}},
             c.provenance);
  return 0;
}

int cmd_verify(const Context& c) {
  const auto report = run_property_suites(c.seed);
  CsvTable csv({"suite", "property", "passed"}, c.provenance);
  for (const auto& r : report.results) {
    std::cout << (r.passed ? "[ok]   " : "[FAIL] ") << r.suite << ": " << r.name
              << (r.passed ? "" : " — " + r.detail) << '\n';
    std::string name = r.name;
    std::replace(name.begin(), name.end(), ',', ';');
    csv.row({r.suite, name, r.passed ? "1" : "0"});
  }
  std::cout << report.results.size() - report.failures() << "/" << report.results.size()
            << " properties hold\n";
  csv.write(c.out / "verify.csv");
  return report.all_passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Invariance entropy, network entropy sets and data-rate checks"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::optional<std::uint64_t> threads, seed;
  app.add_option("--config", config_path, "Scenario configuration (JSON)")->required();
  app.add_option("--out", out_dir, "Output directory (default: the config's output.dir)");
  app.add_option("--threads", threads, "Worker threads (overrides INVARION_THREADS)");
  app.add_option("--seed", seed, "Pool and adversary seed (overrides INVARION_SEED)");

  const std::vector<std::pair<std::string, std::string>> commands{
      {"entropy", "r_inv sweep over the configured horizons"},
      {"subsystem-entropy", "subsystem r_inv sweep per component"},
      {"frontier", "finite-time entropy vectors (Pareto points)"},
      {"capacity", "zero-error capacity bounds of the configured channels"},
      {"linear-formula", "eigenvalue thresholds of linear components"},
      {"simulate", "closed-loop block-coding simulation"},
      {"verify", "run the property suites"}};
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Context c;
    c.config = load_config(config_path);
    c.seed = seed ? *seed : env_uint("INVARION_SEED").value_or(c.config.seed);
    const auto t = threads ? threads : env_uint("INVARION_THREADS");
    if (t && *t == 0) throw ConfigError("threads", "must be positive");
    if (t || c.config.threads) omp_set_num_threads(static_cast<int>(t ? *t : *c.config.threads));
    c.out = out_dir.empty() ? fs::path(c.config.output_dir) : fs::path(out_dir);
    fs::create_directories(c.out);
    c.provenance = {c.config.config_hash, c.seed};

    if (command == "entropy") return cmd_entropy(c);
    if (command == "subsystem-entropy") return cmd_subsystem(c);
    if (command == "frontier") return cmd_frontier(c);
    if (command == "capacity") return cmd_capacity(c);
    if (command == "linear-formula") return cmd_linear(c);
    if (command == "simulate") return cmd_simulate(c);
    return cmd_verify(c);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return 3;
  } catch (const CapacityError& e) {
    std::cerr << "insufficient capacity: " << e.what() << " (required " << e.required()
              << ", available " << e.available() << ")\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
