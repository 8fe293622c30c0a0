#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "literalis/corpus.hpp"
#include "literalis/signals.hpp"

namespace literalis {

/// One line of `score` output: the record's metadata plus its raw signals.
struct ScoredRecord {
  std::string id;
  std::string lp;
  std::string system;
  Task task = Task::single;
  std::optional<int> position;
  Domain domain = Domain::unknown;
  std::optional<std::string> segment;
  SignalVector signals;

  friend bool operator==(const ScoredRecord&, const ScoredRecord&) = default;
};

ScoredRecord score(const FeatureRecord& r);

/// Missing signals are written as null.
std::string serialize_scored(const ScoredRecord& r);
ScoredRecord parse_scored(std::string_view line, std::size_t line_no);
std::vector<ScoredRecord> read_scored(std::istream& in);

}  // namespace literalis
