#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpo/space/search_space.hpp"

namespace hpo {

struct ArchiveEntry {
  std::size_t index = 0;  // 1-based evaluation index
  Config config;
  double fidelity = 1.0;
  double score = 0.0;  // minimization scale; failure sentinel when failed
  std::vector<std::optional<double>> per_split;
  double seconds = 0.0;
  std::string tag;  // proposer
  bool failed = false;
  std::string error;
};

/// Append-only evaluation log. Entries cannot be modified once stored.
class Archive {
 public:
  /// Assigns the next index when entry.index == 0; otherwise the index must
  /// exceed the last stored one. Returns the stored index.
  std::size_t append(ArchiveEntry entry);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const ArchiveEntry& operator[](std::size_t pos) const { return entries_.at(pos); }
  const std::vector<ArchiveEntry>& entries() const { return entries_; }
  std::size_t next_index() const { return entries_.empty() ? 1 : entries_.back().index + 1; }
  const ArchiveEntry& back() const { return entries_.back(); }

  std::size_t n_failed() const;
  double total_fidelity() const;
  /// Largest score among non-failed entries.
  std::optional<double> worst_score() const;

 private:
  std::vector<ArchiveEntry> entries_;
};

/// Best-observed identification: minimal score among non-failed entries, ties
/// to the earliest index. Throws Error if there is none.
const ArchiveEntry& incumbent(const Archive& archive);

struct TracePoint {
  std::size_t index = 0;
  double cumulative_fidelity = 0.0;
  double cumulative_seconds = 0.0;
  double best = 0.0;  // NaN until the first non-failed entry
};

/// Anytime best-so-far series, one point per entry.
std::vector<TracePoint> trace(const Archive& archive);

// Serialization. The JSON-lines form carries no wall time, so identical runs give
// identical bytes; timings go to a separate document.
inline constexpr int archive_schema_version = 1;

nlohmann::json entry_to_json(const ArchiveEntry& e);
ArchiveEntry entry_from_json(const nlohmann::json& j);
std::string archive_to_jsonl(const Archive& archive);
Archive archive_from_jsonl(const std::string& text);
/// Header: index,tag,fidelity,score,failed,<one column per space parameter>.
/// Inactive parameters are empty cells.
std::string archive_to_csv(const Archive& archive, const SearchSpace& space);
nlohmann::json archive_timing_json(const Archive& archive);
std::string trace_to_csv(const std::vector<TracePoint>& t);

}  // namespace hpo
