#include "invarion/records.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "invarion/config.hpp"
#include "invarion/errors.hpp"

namespace invarion {

using nlohmann::json;

void to_json(json& j, const ControlWord& w) { j = w.entries; }
void from_json(const json& j, ControlWord& w) { w.entries = j.get<std::vector<ControlIndex>>(); }

void to_json(json& j, const SpanningSolution& s) {
  j = json{{"tau", s.tau},
           {"cardinality", s.cardinality()},
           {"optimal", s.optimal},
           {"words", s.words},
           {"selector", s.selector}};
}

void from_json(const json& j, SpanningSolution& s) {
  s.tau = j.at("tau").get<std::size_t>();
  s.optimal = j.at("optimal").get<bool>();
  s.words = j.at("words").get<std::vector<ControlWord>>();
  s.selector = j.at("selector").get<std::vector<std::uint32_t>>();
}

void to_json(json& j, const FrontierPoint& p) {
  std::vector<std::size_t> sizes;
  for (const auto& s : p.witness) sizes.push_back(s.size());
  j = json{{"rates", p.rates}, {"sizes", sizes}, {"witness", p.witness}};
}

void from_json(const json& j, FrontierPoint& p) {
  p.rates = j.at("rates").get<std::vector<double>>();
  p.witness = j.at("witness").get<std::vector<std::vector<ControlWord>>>();
}

void to_json(json& j, const EntropyFrontier& f) {
  j = json{{"tau", f.tau},
           {"exact", f.exact},
           {"upper_bound_only", f.upper_bound_only},
           {"diagnostics", f.diagnostics},
           {"points", f.points}};
}

void from_json(const json& j, EntropyFrontier& f) {
  f.tau = j.at("tau").get<std::size_t>();
  f.exact = j.at("exact").get<bool>();
  f.upper_bound_only = j.at("upper_bound_only").get<bool>();
  f.diagnostics = j.at("diagnostics").get<std::vector<std::string>>();
  f.points = j.at("points").get<std::vector<FrontierPoint>>();
}

void to_json(json& j, const BlockRecord& b) {
  j = json{{"start", b.start},
           {"sent_index", b.sent_index},
           {"decoded_index", b.decoded_index},
           {"sent", b.sent},
           {"received", b.received}};
}

void from_json(const json& j, BlockRecord& b) {
  b.start = j.at("start").get<std::size_t>();
  b.sent_index = j.at("sent_index").get<std::vector<std::uint32_t>>();
  b.decoded_index = j.at("decoded_index").get<std::vector<std::uint32_t>>();
  b.sent = j.at("sent").get<std::vector<std::vector<Symbol>>>();
  b.received = j.at("received").get<std::vector<std::vector<Symbol>>>();
}

void to_json(json& j, const CapacityBounds& c) {
  json per = json::array();
  for (const auto& b : c.per_k) {
    per.push_back({{"k", b.k},
                   {"independence", b.independence},
                   {"clique_cover", b.clique_cover},
                   {"lower", b.lower},
                   {"upper", b.upper}});
  }
  j = json{{"lower", c.lower}, {"upper", c.upper}, {"per_k", per}, {"diagnostics", c.diagnostics}};
}

bool operator==(const SpanningSolution& a, const SpanningSolution& b) {
  return a.tau == b.tau && a.words == b.words && a.selector == b.selector &&
         a.optimal == b.optimal;
}

bool operator==(const FrontierPoint& a, const FrontierPoint& b) {
  return a.rates == b.rates && a.witness == b.witness;
}

bool operator==(const EntropyFrontier& a, const EntropyFrontier& b) {
  return a.tau == b.tau && a.exact == b.exact && a.upper_bound_only == b.upper_bound_only &&
         a.diagnostics == b.diagnostics && a.points == b.points;
}

bool operator==(const BlockRecord& a, const BlockRecord& b) {
  return a.start == b.start && a.sent_index == b.sent_index &&
         a.decoded_index == b.decoded_index && a.sent == b.sent && a.received == b.received;
}

bool operator==(const Transcript& a, const Transcript& b) {
  return a.steps == b.steps && a.states == b.states && a.blocks == b.blocks && a.ok == b.ok &&
         a.first_escape == b.first_escape && a.decode_mismatches == b.decode_mismatches;
}

void write_transcript_jsonl(std::ostream& out, const Transcript& t, const Provenance& p) {
  for (std::size_t k = 0; k < t.states.size(); ++k) {
    out << json{{"type", "step"}, {"step", k}, {"state", t.states[k]}}.dump() << '\n';
  }
  for (std::size_t b = 0; b < t.blocks.size(); ++b) {
    json j = t.blocks[b];
    j["type"] = "block";
    j["block"] = b;
    out << j.dump() << '\n';
  }
  json s{{"type", "summary"},
         {"steps", t.steps},
         {"ok", t.ok},
         {"first_escape", t.first_escape ? json(*t.first_escape) : json(nullptr)},
         {"decode_mismatches", t.decode_mismatches},
         {"config_hash", hex64(p.config_hash)},
         {"seed", p.seed}};
  out << s.dump() << '\n';
}

Transcript read_transcript_jsonl(std::istream& in) {
  Transcript t;
  bool summary = false;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    const auto type = j.at("type").get<std::string>();
    if (type == "step") {
      if (j.at("step").get<std::size_t>() != t.states.size()) {
        throw InputError("transcript steps out of order");
      }
      t.states.push_back(j.at("state").get<State>());
    } else if (type == "block") {
      t.blocks.push_back(j.get<BlockRecord>());
    } else if (type == "summary") {
      t.steps = j.at("steps").get<std::size_t>();
      t.ok = j.at("ok").get<bool>();
      if (!j.at("first_escape").is_null()) t.first_escape = j["first_escape"].get<std::size_t>();
      t.decode_mismatches = j.at("decode_mismatches").get<std::size_t>();
      summary = true;
    } else {
      throw InputError("unknown transcript record type '" + type + "'");
    }
  }
  if (!summary) throw InputError("transcript has no summary record");
  return t;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvTable::CsvTable(std::vector<std::string> columns, Provenance provenance)
    : columns_(std::move(columns)), provenance_(provenance) {}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_.size()) throw InputError("CSV row has the wrong number of cells");
  rows_.push_back(cells);
  return *this;
}

std::string CsvTable::str() const {
  std::ostringstream out;
  out << "config_hash,seed";
  for (const auto& c : columns_) out << ',' << c;
  out << '\n';
  for (const auto& r : rows_) {
    out << hex64(provenance_.config_hash) << ',' << provenance_.seed;
    for (const auto& c : r) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

void CsvTable::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << str();
}

void write_json(const std::filesystem::path& path, json body, const Provenance& p) {
  body["config_hash"] = hex64(p.config_hash);
  body["seed"] = p.seed;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << body.dump(2) << '\n';
}

}  // namespace invarion
