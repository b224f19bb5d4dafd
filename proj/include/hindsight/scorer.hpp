#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hindsight/corpus.hpp"
#include "hindsight/matcher.hpp"

namespace hindsight {

/// Top-venue list, alias table and the citation/venue blend weights.
struct VenueConfig {
  /// Canonical venue names, e.g. "NeurIPS".
  std::set<std::string> top_venues;
  /// Normalized venue string -> canonical name.
  std::map<std::string, std::string> aliases;
  double weight_citations = 0.6;
  double weight_venue = 0.4;

  /// The seven default venues with their common spellings.
  static VenueConfig defaults();
  /// Throws ConfigError unless both weights are >= 0 and sum to 1.
  void validate() const;
};

/// Lower-cased, punctuation-free venue string with year/ordinal tokens and
/// filler words ("proceedings", "the", "annual", "ieee", ...) removed.
std::string normalize_venue(std::string_view venue);

/// Min-max normalized citation counts, aligned with `pool`. A pool without
/// spread maps every paper to 0. Throws ScoringError on an empty pool.
std::vector<double> normalize_citations(const std::vector<Paper>& pool);

/// 1 iff the venue resolves to a configured top venue.
int venue_indicator(const Paper& paper, const VenueConfig& cfg);

/// weight_citations * c_hat + weight_venue * v. Throws ScoringError when
/// c_hat is outside [0, 1] or v is not 0/1.
double impact_score(double c_hat, int v, const VenueConfig& cfg);

struct ImpactEntry {
  double c_hat = 0.0;
  int v = 0;
  double h = 0.0;
};

/// Per-paper impact over a deduplicated pool. Immutable after build.
class ImpactTable {
 public:
  ImpactTable() = default;
  static ImpactTable build(const std::vector<Paper>& pool, const VenueConfig& cfg);

  void insert(const std::string& paper_id, ImpactEntry entry);
  const ImpactEntry* find(const std::string& paper_id) const;
  std::size_t size() const { return entries_.size(); }
  /// Entries sorted by paper id.
  std::vector<std::pair<std::string, ImpactEntry>> sorted() const;

 private:
  std::unordered_map<std::string, ImpactEntry> entries_;
};

struct HindsightScore {
  std::string idea_id;
  double score = 0.0;
  std::optional<std::string> best_paper_id;
  std::size_t match_count = 0;
};

/// Maximum impact over the match set; 0 with no best paper when empty.
/// Ties go to the lowest paper id. Throws ScoringError naming any matched
/// paper missing from `table`.
HindsightScore hindsight_score(const MatchSet& matches, const ImpactTable& table);

}  // namespace hindsight
