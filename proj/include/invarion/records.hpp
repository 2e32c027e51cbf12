#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "invarion/channel.hpp"
#include "invarion/closed_loop.hpp"
#include "invarion/cover.hpp"
#include "invarion/frontier.hpp"
#include "invarion/system.hpp"

namespace invarion {

/// Stamped into every output file.
struct Provenance {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

// JSON mappings (nlohmann ADL hooks). Doubles are written in shortest
// round-trip form, so parsing restores them bit for bit.
void to_json(nlohmann::json& j, const ControlWord& w);
void from_json(const nlohmann::json& j, ControlWord& w);
void to_json(nlohmann::json& j, const SpanningSolution& s);
void from_json(const nlohmann::json& j, SpanningSolution& s);
void to_json(nlohmann::json& j, const FrontierPoint& p);
void from_json(const nlohmann::json& j, FrontierPoint& p);
void to_json(nlohmann::json& j, const EntropyFrontier& f);
void from_json(const nlohmann::json& j, EntropyFrontier& f);
void to_json(nlohmann::json& j, const BlockRecord& b);
void from_json(const nlohmann::json& j, BlockRecord& b);
void to_json(nlohmann::json& j, const CapacityBounds& c);

bool operator==(const SpanningSolution& a, const SpanningSolution& b);
bool operator==(const FrontierPoint& a, const FrontierPoint& b);
bool operator==(const EntropyFrontier& a, const EntropyFrontier& b);
bool operator==(const BlockRecord& a, const BlockRecord& b);
bool operator==(const Transcript& a, const Transcript& b);

/// One "step" record per recorded state, one "block" record per block and a
/// final "summary" record carrying the verdict and provenance.
void write_transcript_jsonl(std::ostream& out, const Transcript& t, const Provenance& p);
Transcript read_transcript_jsonl(std::istream& in);

/// `%.17g`.
std::string format_double(double v);

/// CSV table whose first two columns are the config hash and the seed.
class CsvTable {
 public:
  CsvTable(std::vector<std::string> columns, Provenance provenance);

  CsvTable& row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::string> columns_;
  Provenance provenance_;
  std::vector<std::vector<std::string>> rows_;
};

/// Pretty-printed JSON document with the provenance fields added at the top
/// level, newline terminated.
void write_json(const std::filesystem::path& path, nlohmann::json body, const Provenance& p);

}  // namespace invarion
