#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/jsonl.hpp"

namespace hindsight {

/// One idea's row in the plot-data files.
struct IdeaRow {
  std::string idea_id;
  std::string system;
  double hindsight = 0.0;
  std::size_t match_count = 0;
  std::optional<double> judge_overall;
  std::optional<std::string> quadrant;
};

/// Everything the report renders. Tables are the JSON forms produced by the
/// analysis stages; a null table is written as an explicit empty marker.
struct ReportInputs {
  Json metadata = Json::object();
  Json comparison;
  Json correlations;
  Json quadrants;
  Json sweep;
  std::vector<IdeaRow> ideas;
};

inline constexpr int kReportSchemaVersion = 1;

/// Writes report.json plus scores.csv, sweep.csv and scatter.csv into `dir`.
void emit_report(const ReportInputs& inputs, const std::filesystem::path& dir);

}  // namespace hindsight
