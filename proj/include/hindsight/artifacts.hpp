#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "hindsight/jsonl.hpp"
#include "hindsight/matcher.hpp"
#include "hindsight/scorer.hpp"

// Line-delimited stage handoff files. Each starts with a header record that
// carries the schema name, version and the producing run's config hash.

namespace hindsight {

void write_rankings(const std::filesystem::path& path, const std::vector<Ranking>& rankings,
                    const Json& header_extra = Json::object());
std::vector<Ranking> read_rankings(const std::filesystem::path& path);

void write_match_sets(const std::filesystem::path& path, const std::vector<MatchSet>& sets,
                      const Json& header_extra = Json::object());
std::vector<MatchSet> read_match_sets(const std::filesystem::path& path);

void write_impact_table(const std::filesystem::path& path, const ImpactTable& table,
                        const Json& header_extra = Json::object());
ImpactTable read_impact_table(const std::filesystem::path& path);

/// Score export: idea_id, score, best_paper_id, match_count, theta, k.
struct ScoreRecord {
  HindsightScore score;
  double theta = 0.0;
  std::size_t k = 0;
};

void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& scores,
                  const Json& header_extra = Json::object());
std::vector<ScoreRecord> read_scores(const std::filesystem::path& path);

}  // namespace hindsight
