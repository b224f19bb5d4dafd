#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "hindsight/config.hpp"
#include "hindsight/corpus.hpp"
#include "hindsight/report.hpp"
#include "hindsight/scholar.hpp"

// File-based pipeline stages. Each stage reads only its declared inputs
// from the run's work directory and writes only its declared outputs.
// A missing input raises MissingInputError naming the producing stage.

namespace hindsight {

std::string tool_version();

/// Derived artifact locations inside the work directory.
struct StageFiles {
  std::filesystem::path validation, paper_texts, idea_texts, alignment, rankings, matches, impact, scores,
      comparison, sweep, quadrants, report_dir, oracle, ingest_report, lock;

  static StageFiles of(const RunConfig& cfg);
};

/// Exclusive lock on a work directory for the lifetime of the object.
class WorkDirLock {
 public:
  explicit WorkDirLock(const RunConfig& cfg);
  ~WorkDirLock();
  WorkDirLock(const WorkDirLock&) = delete;
  WorkDirLock& operator=(const WorkDirLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct IngestSummary {
  std::size_t raw = 0;
  std::size_t unique = 0;
  DegradationReport report;
};

/// Queries every configured topic over [cutoff, cutoff + delta] and writes
/// the deduplicated pool. `transport` null means cache-only.
IngestSummary run_ingest(const RunConfig& cfg, std::shared_ptr<HttpTransport> transport,
                         const std::string& ingested_at);

ValidationReport run_validate(const RunConfig& cfg);

/// Writes the encoder input files (id + composed text per line).
void run_compose(const RunConfig& cfg);

/// Composes texts and runs the external encoder for papers and ideas.
void run_embed(const RunConfig& cfg);

void run_match(const RunConfig& cfg);
void run_score(const RunConfig& cfg);
void run_compare(const RunConfig& cfg);
void run_sweep(const RunConfig& cfg);
void run_quadrants(const RunConfig& cfg);
/// Aggregates persisted stage outputs into the report directory.
void run_report(const RunConfig& cfg, const std::string& generated_at);

/// Generates a synthetic fixture into the configured input paths.
void run_fixture(const RunConfig& cfg);

/// Report inputs assembled from persisted stage files.
ReportInputs collect_report_inputs(const RunConfig& cfg, const std::string& generated_at);

/// Run metadata embedded in stage outputs and the report.
Json run_metadata(const RunConfig& cfg);

}  // namespace hindsight
