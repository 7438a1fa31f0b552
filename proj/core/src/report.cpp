#include "colmatch/report.hpp"

#include <cstdio>
#include <set>

#include <json.hpp>

#include "colmatch/error.hpp"

namespace colmatch {
namespace {

using nlohmann::json;

std::string quote(std::string_view s) { return json(s).dump(); }

std::string fixed6(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string out(buf);
  if (out == "-0.000000") out = "0.000000";
  return out;
}

std::string string_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += quote(items[i]);
  }
  return out + "]";
}

std::vector<std::string> get_strings(const json& j) {
  std::vector<std::string> out;
  for (const auto& item : j) out.push_back(item.get<std::string>());
  return out;
}

}  // namespace

const ReferenceMatches* MatchReport::find(std::string_view column) const {
  for (const auto& m : matches) {
    if (m.reference.column_name == column) return &m;
  }
  return nullptr;
}

bool MatchReport::is_skipped(std::string_view column) const {
  for (const auto& s : skipped) {
    if (s.column.column_name == column) return true;
  }
  return false;
}

std::string serialize_report(const MatchReport& report) {
  std::string out = "{\n";
  out += "  \"reference_db\": " + quote(report.reference_db) + ",\n";
  out += "  \"unknown_dbs\": " + string_array(report.unknown_dbs) + ",\n";
  out += "  \"config\": {\"k\": " + std::to_string(report.config.k) +
         ", \"threshold\": " + fixed6(report.config.threshold) +
         ", \"mode\": " + quote(to_string(report.config.mode)) + "},\n";

  out += "  \"matches\": [";
  for (std::size_t i = 0; i < report.matches.size(); ++i) {
    const auto& m = report.matches[i];
    out += i ? ",\n" : "\n";
    out += "    {\n";
    out += "      \"reference\": {\"db\": " + quote(m.reference.database) +
           ", \"column\": " + quote(m.reference.column_name) +
           ", \"tables\": " + string_array(m.reference.tables) + "},\n";
    out += "      \"candidates\": [";
    for (std::size_t j = 0; j < m.candidates.size(); ++j) {
      const auto& c = m.candidates[j];
      out += j ? ",\n" : "\n";
      out += "        {\"db\": " + quote(c.target.database) +
             ", \"column\": " + quote(c.target.column_name) +
             ", \"value_score\": " + fixed6(c.value_score) + ", \"metadata_score\": " +
             (c.metadata_score ? fixed6(*c.metadata_score) : std::string("null")) +
             ", \"contributing_fields\": " + string_array(c.contributing_fields.labels()) +
             ", \"rank\": " + std::to_string(c.rank) + "}";
    }
    out += m.candidates.empty() ? "],\n" : "\n      ],\n";
    out += std::string("      \"fallback_used\": ") + (m.fallback_used ? "true" : "false") +
           "\n    }";
  }
  out += report.matches.empty() ? "],\n" : "\n  ],\n";

  out += "  \"skipped\": [";
  for (std::size_t i = 0; i < report.skipped.size(); ++i) {
    const auto& s = report.skipped[i];
    out += i ? ",\n" : "\n";
    out += "    {\"column\": " + quote(s.column.column_name) +
           ", \"reason\": " + quote(s.reason) + "}";
  }
  out += report.skipped.empty() ? "]\n" : "\n  ]\n";
  out += "}\n";
  return out;
}

MatchReport parse_report(std::string_view text) {
  MatchReport report;
  try {
    const auto j = json::parse(text);
    report.reference_db = j.at("reference_db").get<std::string>();
    report.unknown_dbs = get_strings(j.at("unknown_dbs"));
    const auto& cfg = j.at("config");
    report.config.k = cfg.at("k").get<std::size_t>();
    report.config.threshold = cfg.at("threshold").get<double>();
    const auto mode = parse_match_mode(cfg.at("mode").get<std::string>());
    if (!mode) throw InputError("report has unknown mode " + cfg.at("mode").dump());
    report.config.mode = *mode;

    for (const auto& m : j.at("matches")) {
      ReferenceMatches entry;
      const auto& ref = m.at("reference");
      entry.reference.database = ref.at("db").get<std::string>();
      entry.reference.column_name = ref.at("column").get<std::string>();
      entry.reference.tables = get_strings(ref.at("tables"));
      for (const auto& c : m.at("candidates")) {
        MatchCandidate cand;
        cand.target.database = c.at("db").get<std::string>();
        cand.target.column_name = c.at("column").get<std::string>();
        cand.value_score = c.at("value_score").get<double>();
        if (!c.at("metadata_score").is_null()) {
          cand.metadata_score = c.at("metadata_score").get<double>();
        }
        cand.contributing_fields = FieldSet::from_labels(get_strings(c.at("contributing_fields")));
        cand.rank = c.at("rank").get<std::size_t>();
        entry.candidates.push_back(std::move(cand));
      }
      entry.fallback_used = m.at("fallback_used").get<bool>();
      report.matches.push_back(std::move(entry));
    }
    for (const auto& s : j.at("skipped")) {
      SkippedColumn skipped;
      skipped.column.database = report.reference_db;
      skipped.column.column_name = s.at("column").get<std::string>();
      skipped.reason = s.at("reason").get<std::string>();
      report.skipped.push_back(std::move(skipped));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed match report: ") + e.what());
  }
  report.config.validate();

  std::set<std::string> seen;
  for (const auto& m : report.matches) {
    if (!seen.insert(m.reference.column_name).second) {
      throw InputError("malformed match report: duplicate reference " + m.reference.column_name);
    }
    if (m.candidates.size() > report.config.k) {
      throw InputError("malformed match report: more than k candidates for " +
                       m.reference.column_name);
    }
    for (std::size_t i = 0; i < m.candidates.size(); ++i) {
      if (m.candidates[i].rank != i + 1) {
        throw InputError("malformed match report: non-consecutive ranks for " +
                         m.reference.column_name);
      }
    }
  }
  return report;
}

}  // namespace colmatch
