#include "invarion/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "invarion/errors.hpp"

namespace invarion {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string join(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& require(const json& j, const std::string& path, const std::string& key) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "required field is missing");
  return *it;
}

double as_double(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path, "expected a number");
  return j.get<double>();
}

std::uint64_t as_uint(const json& j, const std::string& path) {
  if (!j.is_number_integer() || (j.is_number_integer() && !j.is_number_unsigned() &&
                                 j.get<std::int64_t>() < 0)) {
    throw ConfigError(path, "expected a nonnegative integer");
  }
  return j.get<std::uint64_t>();
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ConfigError(path, "expected a string");
  return j.get<std::string>();
}

bool as_bool(const json& j, const std::string& path) {
  if (!j.is_boolean()) throw ConfigError(path, "expected true or false");
  return j.get<bool>();
}

std::vector<double> as_vector(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>()};
  if (!j.is_array()) throw ConfigError(path, "expected a number or an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_double(j[i], join(path, i)));
  return out;
}

Eigen::MatrixXd as_matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw ConfigError(path, "expected a nonempty row-major matrix");
  const std::size_t rows = j.size();
  std::size_t cols = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].empty()) throw ConfigError(join(path, r), "expected a row");
    if (r == 0) cols = j[r].size();
    if (j[r].size() != cols) throw ConfigError(join(path, r), "rows differ in length");
  }
  Eigen::MatrixXd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(r, c) = as_double(j[r][c], join(join(path, r), c));
    }
  }
  return m;
}

template <typename T, typename F>
T optional_field(const json& j, const std::string& path, const std::string& key, T fallback,
                 F convert) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return convert(*it, join(path, key));
}

ControlSpec parse_controls(const json& j, const std::string& path, std::size_t inputs) {
  ControlSpec c;
  c.lower.assign(inputs, -1.0);
  c.upper.assign(inputs, 1.0);
  if (j.is_null()) return c;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (j.contains("values")) {
    const auto& v = j["values"];
    const auto vp = join(path, "values");
    if (!v.is_array() || v.empty()) throw ConfigError(vp, "expected a nonempty list");
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto value = as_vector(v[i], join(vp, i));
      if (value.size() != inputs) {
        throw ConfigError(join(vp, i), "control value has length " + std::to_string(value.size()) +
                                           ", expected " + std::to_string(inputs));
      }
      c.values.push_back(std::move(value));
    }
    return c;
  }
  if (j.contains("lower")) c.lower = as_vector(j["lower"], join(path, "lower"));
  if (j.contains("upper")) c.upper = as_vector(j["upper"], join(path, "upper"));
  if (c.lower.size() == 1 && inputs > 1) c.lower.assign(inputs, c.lower[0]);
  if (c.upper.size() == 1 && inputs > 1) c.upper.assign(inputs, c.upper[0]);
  if (c.lower.size() != inputs || c.upper.size() != inputs) {
    throw ConfigError(path, "bounds must have one entry per input");
  }
  for (std::size_t i = 0; i < inputs; ++i) {
    if (!(c.lower[i] <= c.upper[i])) throw ConfigError(join(path, "lower"), "lower exceeds upper");
  }
  c.levels = optional_field<std::size_t>(j, path, "levels", 33, as_uint);
  if (c.levels < 1) throw ConfigError(join(path, "levels"), "need at least one level");
  return c;
}

SystemSpec parse_system(const json& j, const std::string& path) {
  SystemSpec s;
  const auto kind = as_string(require(j, path, "kind"), join(path, "kind"));
  if (kind == "linear") {
    s.kind = SystemSpec::Kind::kLinear;
    s.A = as_matrix(require(j, path, "A"), join(path, "A"));
    s.B = as_matrix(require(j, path, "B"), join(path, "B"));
    if (s.A.rows() != s.A.cols()) throw ConfigError(join(path, "A"), "must be square");
    if (s.B.rows() != s.A.rows()) {
      throw ConfigError(join(path, "B"), "must have as many rows as A");
    }
    s.controls = parse_controls(j.value("controls", json()), join(path, "controls"),
                                static_cast<std::size_t>(s.B.cols()));
  } else if (kind == "circle") {
    s.kind = SystemSpec::Kind::kCircle;
    const auto& a = require(j, path, "alpha");
    if (!a.is_number_integer()) throw ConfigError(join(path, "alpha"), "expected an integer");
    s.alpha = a.get<int>();
    if (std::abs(s.alpha) < 2) throw ConfigError(join(path, "alpha"), "|alpha| must be at least 2");
    s.controls = parse_controls(j.value("controls", json()), join(path, "controls"), 1);
  } else {
    throw ConfigError(join(path, "kind"), "unknown system kind '" + kind + "'");
  }
  return s;
}

RegionSpec parse_region(const json& j, const std::string& path) {
  RegionSpec r;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  r.shape = as_string(require(j, path, "shape"), join(path, "shape"));
  r.resolution = as_uint(require(j, path, "resolution"), join(path, "resolution"));
  if (r.resolution < 2) throw ConfigError(join(path, "resolution"), "must be at least 2");
  if (j.contains("margin") && !j["margin"].is_null()) {
    r.margin = as_double(j["margin"], join(path, "margin"));
    if (*r.margin < 0) throw ConfigError(join(path, "margin"), "must be nonnegative");
  }
  if (r.shape == "box" || r.shape == "linear_image") {
    r.lower = as_vector(require(j, path, "lower"), join(path, "lower"));
    r.upper = as_vector(require(j, path, "upper"), join(path, "upper"));
    if (r.lower.size() != r.upper.size() || r.lower.empty()) {
      throw ConfigError(join(path, "upper"), "bounds must have equal nonzero length");
    }
    for (std::size_t a = 0; a < r.lower.size(); ++a) {
      if (!(r.lower[a] < r.upper[a])) {
        throw ConfigError(join(join(path, "lower"), a), "lower must be below upper");
      }
    }
    if (r.shape == "linear_image") {
      r.map = as_matrix(require(j, path, "map"), join(path, "map"));
      if (r.map.rows() != r.map.cols() ||
          static_cast<std::size_t>(r.map.rows()) != r.lower.size()) {
        throw ConfigError(join(path, "map"), "must be square with one row per axis");
      }
    }
  } else if (r.shape == "circle_band") {
    r.delta = as_double(require(j, path, "delta"), join(path, "delta"));
    if (!(r.delta > 0 && r.delta < 0.25)) {
      throw ConfigError(join(path, "delta"), "must lie in (0, 0.25)");
    }
  } else if (r.shape == "ball") {
    r.center = as_vector(require(j, path, "center"), join(path, "center"));
    r.radius = as_double(require(j, path, "radius"), join(path, "radius"));
    if (!(r.radius > 0)) throw ConfigError(join(path, "radius"), "must be positive");
  } else if (r.shape != "circle") {
    throw ConfigError(join(path, "shape"), "unknown shape '" + r.shape + "'");
  }
  return r;
}

std::size_t region_dim(const RegionSpec& r) {
  if (r.shape == "circle") return 1;
  if (r.shape == "circle_band") return 2;
  if (r.shape == "ball") return r.center.size();
  return r.lower.size();
}

SimulationSpec parse_simulation(const json& j, const std::string& path, std::size_t channels,
                                std::size_t dim) {
  SimulationSpec s;
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  s.mode = optional_field<std::string>(j, path, "mode", "single", as_string);
  if (s.mode != "single" && s.mode != "network") {
    throw ConfigError(join(path, "mode"), "expected 'single' or 'network'");
  }
  s.tau = as_uint(require(j, path, "tau"), join(path, "tau"));
  if (s.tau == 0) throw ConfigError(join(path, "tau"), "must be positive");
  s.horizon = optional_field<std::size_t>(j, path, "horizon", 100, as_uint);
  s.adversary = optional_field<std::string>(j, path, "adversary", "seeded-random", as_string);
  if (s.adversary != "exhaustive" && s.adversary != "seeded-random" &&
      s.adversary != "greedy-escape") {
    throw ConfigError(join(path, "adversary"),
                      "expected 'exhaustive', 'seeded-random' or 'greedy-escape'");
  }
  const auto& ch = require(j, path, "channels");
  if (!ch.is_array() || ch.empty()) throw ConfigError(join(path, "channels"), "expected a list");
  for (std::size_t i = 0; i < ch.size(); ++i) {
    const auto c = as_uint(ch[i], join(join(path, "channels"), i));
    if (c >= channels) {
      throw ConfigError(join(join(path, "channels"), i),
                        "refers to channel " + std::to_string(c) + " but only " +
                            std::to_string(channels) + " are defined");
    }
    s.channels.push_back(c);
  }
  if (j.contains("x0")) {
    const auto& x = j["x0"];
    const auto xp = join(path, "x0");
    if (!x.is_array()) throw ConfigError(xp, "expected a list of states");
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto v = as_vector(x[i], join(xp, i));
      if (v.size() != dim) throw ConfigError(join(xp, i), "state has the wrong dimension");
      s.x0.push_back(std::move(v));
    }
  }
  s.x0_samples = optional_field<std::size_t>(j, path, "x0_samples", 0, as_uint);
  if (s.x0.empty() && s.x0_samples == 0) s.x0_samples = 1;
  s.max_adversaries = optional_field<std::size_t>(j, path, "max_adversaries", 64, as_uint);
  return s;
}

}  // namespace

Channel parse_channel(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  if (j.contains("preset")) {
    const auto p = as_string(j["preset"], join(path, "preset"));
    if (p == "pentagon") return Channel::pentagon();
    const auto n = as_uint(require(j, path, "size"), join(path, "size"));
    if (n == 0) throw ConfigError(join(path, "size"), "must be positive");
    if (p == "noiseless") return Channel::noiseless(n);
    if (p == "all_confusable") return Channel::all_confusable(n);
    throw ConfigError(join(path, "preset"), "unknown preset '" + p + "'");
  }
  const auto& a = require(j, path, "alphabet");
  const auto ap = join(path, "alphabet");
  if (!a.is_array() || a.empty()) throw ConfigError(ap, "expected a nonempty list");
  std::vector<std::string> names;
  std::map<std::string, Symbol> index;
  for (std::size_t i = 0; i < a.size(); ++i) {
    names.push_back(a[i].is_string() ? a[i].get<std::string>() : a[i].dump());
    if (!index.emplace(names.back(), static_cast<Symbol>(i)).second) {
      throw ConfigError(join(ap, i), "duplicate symbol '" + names.back() + "'");
    }
  }
  const auto& rel = require(j, path, "relation");
  const auto rp = join(path, "relation");
  if (!rel.is_object()) throw ConfigError(rp, "expected an object keyed by symbol");
  std::vector<std::vector<Symbol>> relation(names.size());
  for (const auto& [key, outs] : rel.items()) {
    auto it = index.find(key);
    if (it == index.end()) throw ConfigError(join(rp, key), "unknown symbol");
    if (!outs.is_array() || outs.empty()) {
      throw ConfigError(join(rp, key), "expected a nonempty list of outputs");
    }
    for (std::size_t i = 0; i < outs.size(); ++i) {
      const auto name = outs[i].is_string() ? outs[i].get<std::string>() : outs[i].dump();
      auto o = index.find(name);
      if (o == index.end()) throw ConfigError(join(join(rp, key), i), "unknown symbol '" + name + "'");
      relation[it->second].push_back(o->second);
    }
  }
  for (std::size_t b = 0; b < names.size(); ++b) {
    if (relation[b].empty()) throw ConfigError(join(rp, names[b]), "symbol has no outputs");
  }
  try {
    return Channel(std::move(names), std::move(relation));
  } catch (const InputError& e) {
    throw ConfigError(path, e.what());
  }
}

ScenarioConfig parse_config(const json& doc) {
  ScenarioConfig c;
  if (!doc.is_object()) throw ConfigError("", "configuration must be a JSON object");
  c.source = doc;
  c.config_hash = config_hash(doc);
  c.name = optional_field<std::string>(doc, "", "name", "", as_string);

  const auto& systems = require(doc, "", "systems");
  if (!systems.is_array() || systems.empty()) {
    throw ConfigError("systems", "expected a nonempty list");
  }
  std::size_t dim = 0;
  for (std::size_t i = 0; i < systems.size(); ++i) {
    c.systems.push_back(parse_system(systems[i], join("systems", i)));
    dim += c.systems.back().state_dim();
  }

  c.region = parse_region(require(doc, "", "region"), "region");
  if (region_dim(c.region) != dim) {
    throw ConfigError("region", "region has dimension " + std::to_string(region_dim(c.region)) +
                                    " but the systems have " + std::to_string(dim));
  }

  const auto& taus = require(doc, "", "taus");
  if (!taus.is_array()) throw ConfigError("taus", "expected a list of horizons");
  if (taus.empty()) throw ConfigError("taus", "list of horizons is empty");
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto t = as_uint(taus[i], join("taus", i));
    if (t == 0) throw ConfigError(join("taus", i), "horizons must be positive");
    c.taus.push_back(t);
  }

  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    if (!s.is_object()) throw ConfigError("solver", "expected an object");
    const auto mode = optional_field<std::string>(s, "solver", "mode", "exact", as_string);
    if (mode == "exact") {
      c.mode = SolveMode::kExact;
    } else if (mode == "greedy") {
      c.mode = SolveMode::kGreedy;
    } else {
      throw ConfigError("solver.mode", "expected 'exact' or 'greedy'");
    }
    c.pool_cap = optional_field<std::uint64_t>(s, "solver", "pool_cap", c.pool_cap, as_uint);
    if (c.pool_cap == 0) throw ConfigError("solver.pool_cap", "must be positive");
    c.seed = optional_field<std::uint64_t>(s, "solver", "seed", 0, as_uint);
    c.node_budget = optional_field<std::uint64_t>(s, "solver", "node_budget", c.node_budget, as_uint);
  }

  if (doc.contains("subsystems")) {
    const auto& s = doc["subsystems"];
    if (!s.is_array()) throw ConfigError("subsystems", "expected a list of component indices");
    for (std::size_t i = 0; i < s.size(); ++i) {
      const auto k = as_uint(s[i], join("subsystems", i));
      if (k >= c.systems.size()) {
        throw ConfigError(join("subsystems", i), "no component " + std::to_string(k));
      }
      c.subsystems.push_back(k);
    }
  } else {
    for (std::size_t i = 0; i < c.systems.size(); ++i) c.subsystems.push_back(i);
  }

  if (doc.contains("frontier")) {
    const auto& f = doc["frontier"];
    if (!f.is_object()) throw ConfigError("frontier", "expected an object");
    c.frontier_max_words =
        optional_field<std::size_t>(f, "frontier", "max_words", c.frontier_max_words, as_uint);
    c.refine_rounds =
        optional_field<std::size_t>(f, "frontier", "refine_rounds", c.refine_rounds, as_uint);
    c.frontier_exact = optional_field<bool>(f, "frontier", "exact", false, as_bool);
  }

  if (doc.contains("channels")) {
    const auto& ch = doc["channels"];
    if (!ch.is_array()) throw ConfigError("channels", "expected a list");
    for (std::size_t i = 0; i < ch.size(); ++i) {
      c.channels.push_back(parse_channel(ch[i], join("channels", i)));
    }
  }
  if (doc.contains("capacity")) {
    c.capacity_k_max =
        optional_field<std::size_t>(doc["capacity"], "capacity", "k_max", 2, as_uint);
    if (c.capacity_k_max == 0) throw ConfigError("capacity.k_max", "must be positive");
  }

  if (doc.contains("simulation")) {
    c.simulation = parse_simulation(doc["simulation"], "simulation", c.channels.size(), dim);
    if (c.simulation->mode == "network" && c.simulation->channels.size() != c.systems.size()) {
      throw ConfigError("simulation.channels", "network mode needs one channel per system");
    }
    if (c.simulation->mode == "single" && c.simulation->channels.size() != 1) {
      throw ConfigError("simulation.channels", "single mode uses exactly one channel");
    }
  }

  if (doc.contains("absorbing")) {
    c.absorbing = parse_region(doc["absorbing"], "absorbing");
    if (region_dim(*c.absorbing) != dim) {
      throw ConfigError("absorbing", "absorbing set has the wrong dimension");
    }
  }

  if (doc.contains("threads")) {
    c.threads = as_uint(doc["threads"], "threads");
    if (*c.threads == 0) throw ConfigError("threads", "must be positive");
  }
  if (doc.contains("output")) {
    c.output_dir = optional_field<std::string>(doc["output"], "output", "dir", "out", as_string);
  }

  // Band validity for synchronization of circle multipliers.
  if (c.region.shape == "circle_band") {
    for (std::size_t i = 0; i < c.systems.size(); ++i) {
      if (c.systems[i].kind != SystemSpec::Kind::kCircle) continue;
      const double bound = 1.0 / (2.0 * std::abs(1.0 - c.systems[i].alpha));
      if (c.region.delta > bound) {
        throw ConfigError("region.delta", "delta " + std::to_string(c.region.delta) +
                                              " exceeds 1/(2|1-alpha|) = " + std::to_string(bound));
      }
    }
  }

  // The margin must absorb nearest-cell snapping.
  try {
    const auto region = build_region(c.region);
    double diag2 = 0.0;
    for (double h : region.frame().spacing) diag2 += h * h;
    const double half_diag = 0.5 * std::sqrt(diag2);
    if (region.margin() < half_diag) {
      throw ConfigError("region.margin", "margin " + std::to_string(region.margin()) +
                                             " is below half a cell diagonal " +
                                             std::to_string(half_diag));
    }
    discretize(region);
  } catch (const InputError& e) {
    throw ConfigError("region", e.what());
  }
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open configuration file " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

SystemDef build_system(const SystemSpec& spec) {
  ControlAlphabet alphabet;
  if (!spec.controls.values.empty()) {
    alphabet = ControlAlphabet::from_values(spec.controls.values);
  } else if (spec.controls.lower.size() == 1) {
    alphabet = ControlAlphabet::uniform(spec.controls.lower[0], spec.controls.upper[0],
                                        spec.controls.levels);
  } else {
    alphabet = ControlAlphabet::uniform_grid(spec.controls.lower, spec.controls.upper,
                                             spec.controls.levels);
  }
  if (spec.kind == SystemSpec::Kind::kCircle) {
    return SystemDef::circle_multiplier(spec.alpha, std::move(alphabet));
  }
  return SystemDef::linear(spec.A, spec.B, std::move(alphabet));
}

SystemDef build_system(const ScenarioConfig& config) {
  if (config.systems.size() == 1) return build_system(config.systems.front());
  std::vector<SystemDef> parts;
  for (const auto& s : config.systems) parts.push_back(build_system(s));
  return SystemDef::product(std::move(parts));
}

GridRegion build_region(const RegionSpec& r) {
  if (r.shape == "box") return GridRegion::box(r.lower, r.upper, r.resolution, r.margin);
  if (r.shape == "circle") return GridRegion::circle(r.resolution, r.margin);
  if (r.shape == "circle_band") return GridRegion::circle_band(r.delta, r.resolution, r.margin);
  if (r.shape == "ball") return GridRegion::ball(r.center, r.radius, r.resolution, r.margin);
  if (r.shape == "linear_image") {
    return GridRegion::linear_image(r.map, r.lower, r.upper, r.resolution, r.margin);
  }
  throw ConfigError("region.shape", "unknown shape '" + r.shape + "'");
}

std::vector<LinearPair> linear_pairs(const ScenarioConfig& config) {
  std::vector<LinearPair> out;
  for (std::size_t i = 0; i < config.systems.size(); ++i) {
    const auto& s = config.systems[i];
    if (s.kind != SystemSpec::Kind::kLinear) {
      throw ConfigError(join("systems", i), "linear analysis needs linear systems");
    }
    out.push_back({s.A, s.B});
  }
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t config_hash(const json& document) { return fnv1a(document.dump()); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace invarion
