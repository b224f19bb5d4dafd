#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hindsight/date.hpp"

namespace hindsight {

/// Literal placed between the two halves of a composed document text.
inline constexpr std::string_view kSeparator = " [SEP] ";

/// One ground-truth publication.
struct Paper {
  std::string paper_id;
  std::string title;
  std::string abstract;
  std::uint64_t citation_count = 0;
  std::string venue;
  Date published;
  std::vector<std::string> topics;
  /// Set when the abstract is missing; matching then runs on the title only.
  bool degraded = false;

  bool operator==(const Paper&) const = default;
};

/// One generated research idea. Provenance dates cover every piece of
/// literature the generator read.
struct Idea {
  std::string idea_id;
  std::string system;
  std::string topic;
  std::string problem;
  std::string method;
  std::optional<std::string> seed_paper_id;
  std::vector<Date> provenance_dates;

  bool operator==(const Idea&) const = default;
};

struct TimeSplitConfig {
  Date cutoff;
  int window_delta_months = 30;
  Date model_knowledge_cutoff;
  int min_margin_months = 6;
};

/// Case-folded, punctuation-stripped, whitespace-collapsed title used as a
/// duplicate key. Non-ASCII bytes pass through untouched.
std::string normalize_title(std::string_view title);

/// Removes duplicates by paper id or normalized title. Within a duplicate
/// group the most-cited record survives (earliest on ties); survivors keep
/// their input order and their fields untouched.
std::vector<Paper> dedup(const std::vector<Paper>& papers);

enum class ViolationKind { PoolPaperBeforeCutoff, IdeaProvenanceLeak, MarginShortfall, EmptyWindow };

struct Violation {
  ViolationKind kind;
  std::string subject;  // paper id, idea id, or "config"
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool leakage_safe() const { return violations.empty(); }
};

std::string_view to_string(ViolationKind kind);

ValidationReport validate_time_split(const TimeSplitConfig& config, const std::vector<Paper>& pool,
                                     const std::vector<Idea>& ideas);

struct ComposedText {
  std::string text;
  bool degraded = false;
};

/// title + separator + abstract. An empty abstract yields "title [SEP]".
ComposedText compose_paper_text(const Paper& paper);

/// problem + separator + method; throws CompositionError on an empty half.
std::string compose_idea_text(const Idea& idea);

// Line-delimited persistence. Papers and ideas files start with a header
// record carrying the schema name, version and (for papers) ingest time.

inline constexpr int kCorpusSchemaVersion = 1;

void write_papers(const std::filesystem::path& path, const std::vector<Paper>& papers,
                  const std::string& ingested_at);
std::vector<Paper> read_papers(const std::filesystem::path& path);

void write_ideas(const std::filesystem::path& path, const std::vector<Idea>& ideas);
std::vector<Idea> read_ideas(const std::filesystem::path& path);

}  // namespace hindsight
