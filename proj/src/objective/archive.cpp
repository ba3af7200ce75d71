#include "hpo/objective/archive.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hpo/core/errors.hpp"
#include "hpo/space/space_io.hpp"

namespace hpo {

using nlohmann::json;

std::size_t Archive::append(ArchiveEntry entry) {
  if (entry.index == 0) {
    entry.index = next_index();
  } else if (!entries_.empty() && entry.index <= entries_.back().index) {
    throw InvalidArgument("archive indices must strictly increase (got " + std::to_string(entry.index) + " after " +
                          std::to_string(entries_.back().index) + ")");
  }
  if (!entry.failed && !std::isfinite(entry.score)) throw InvalidArgument("archive score must be finite");
  entries_.push_back(std::move(entry));
  return entries_.back().index;
}

std::size_t Archive::n_failed() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.failed;
  return n;
}

double Archive::total_fidelity() const {
  double s = 0.0;
  for (const auto& e : entries_) s += e.fidelity;
  return s;
}

std::optional<double> Archive::worst_score() const {
  std::optional<double> w;
  for (const auto& e : entries_)
    if (!e.failed && (!w || e.score > *w)) w = e.score;
  return w;
}

const ArchiveEntry& incumbent(const Archive& archive) {
  const ArchiveEntry* best = nullptr;
  for (const auto& e : archive.entries())
    if (!e.failed && (!best || e.score < best->score)) best = &e;
  if (!best) throw Error(archive.empty() ? "archive is empty" : "every archived evaluation failed");
  return *best;
}

std::vector<TracePoint> trace(const Archive& archive) {
  std::vector<TracePoint> out;
  out.reserve(archive.size());
  double fid = 0.0, sec = 0.0, best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& e : archive.entries()) {
    fid += e.fidelity;
    sec += e.seconds;
    if (!e.failed && (std::isnan(best) || e.score < best)) best = e.score;
    out.push_back({e.index, fid, sec, best});
  }
  return out;
}

json entry_to_json(const ArchiveEntry& e) {
  json per = json::array();
  for (const auto& s : e.per_split) per.push_back(s ? json(*s) : json(nullptr));
  json j{{"schema", archive_schema_version},
         {"index", e.index},
         {"tag", e.tag},
         {"config", config_to_json(e.config)},
         {"fidelity", e.fidelity},
         {"score", e.score},
         {"failed", e.failed},
         {"per_split", per}};
  if (e.failed) j["error"] = e.error;
  return j;
}

ArchiveEntry entry_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("", "archive entry must be an object");
  if (j.value("schema", 0) != archive_schema_version) throw ConfigError("/schema", "unsupported archive schema");
  for (const char* key : {"index", "config", "fidelity", "score", "failed"})
    if (!j.contains(key)) throw ConfigError(std::string("/") + key, "missing field");
  ArchiveEntry e;
  e.index = j.at("index").get<std::size_t>();
  e.tag = j.value("tag", std::string());
  e.config = config_from_json(j.at("config"));
  e.fidelity = j.at("fidelity").get<double>();
  e.score = j.at("score").get<double>();
  e.failed = j.at("failed").get<bool>();
  e.error = j.value("error", std::string());
  if (j.contains("per_split"))
    for (const auto& s : j.at("per_split"))
      e.per_split.push_back(s.is_null() ? std::nullopt : std::optional<double>(s.get<double>()));
  return e;
}

std::string archive_to_jsonl(const Archive& archive) {
  std::string out;
  for (const auto& e : archive.entries()) out += entry_to_json(e).dump() + "\n";
  return out;
}

Archive archive_from_jsonl(const std::string& text) {
  Archive a;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      a.append(entry_from_json(json::parse(line)));
    } catch (const json::exception& ex) {
      throw ConfigError("line " + std::to_string(lineno), ex.what());
    } catch (const ConfigError& ex) {
      throw ConfigError("line " + std::to_string(lineno) + ex.field(), ex.what());
    }
  }
  return a;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

std::string archive_to_csv(const Archive& archive, const SearchSpace& space) {
  std::string out = "index,tag,fidelity,score,failed";
  for (const auto& s : space.specs()) out += "," + csv_cell(s.name);
  out += "\n";
  for (const auto& e : archive.entries()) {
    out += std::to_string(e.index) + "," + csv_cell(e.tag) + "," + num(e.fidelity) + "," + num(e.score) + "," +
           (e.failed ? "1" : "0");
    for (const auto& s : space.specs()) {
      out += ",";
      if (e.config.has(s.name)) out += csv_cell(format_value(e.config.at(s.name)));
    }
    out += "\n";
  }
  return out;
}

json archive_timing_json(const Archive& archive) {
  json rows = json::array();
  double total = 0.0;
  for (const auto& e : archive.entries()) {
    rows.push_back({{"index", e.index}, {"seconds", e.seconds}});
    total += e.seconds;
  }
  return {{"total_seconds", total}, {"entries", rows}};
}

std::string trace_to_csv(const std::vector<TracePoint>& t) {
  std::string out = "index,cumulative_fidelity,best\n";
  for (const auto& p : t)
    out += std::to_string(p.index) + "," + num(p.cumulative_fidelity) + "," + (std::isnan(p.best) ? "" : num(p.best)) + "\n";
  return out;
}

}  // namespace hpo
