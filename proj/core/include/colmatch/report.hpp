#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "colmatch/matcher.hpp"

namespace colmatch {

struct ReferenceMatches {
  ColumnRef reference;
  std::vector<MatchCandidate> candidates;
  bool fallback_used = false;
};

struct SkippedColumn {
  ColumnRef column;
  std::string reason;
};

struct MatchReport {
  std::string reference_db;
  std::vector<std::string> unknown_dbs;
  MatchConfig config;
  std::vector<ReferenceMatches> matches;
  std::vector<SkippedColumn> skipped;

  // Entry for a reference column name, or nullptr.
  const ReferenceMatches* find(std::string_view column) const;
  bool is_skipped(std::string_view column) const;
};

// Stable-key-order JSON; scores printed with six decimals. Output is a
// pure function of the report, so equal reports serialize byte-equal.
std::string serialize_report(const MatchReport& report);

// Inverse of serialize_report (scores carry the printed precision; target
// table lists are not serialized). Throws InputError on schema violations.
MatchReport parse_report(std::string_view json);

}  // namespace colmatch
