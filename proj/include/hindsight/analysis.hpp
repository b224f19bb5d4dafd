#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hindsight/jsonl.hpp"
#include "hindsight/matcher.hpp"
#include "hindsight/scorer.hpp"
#include "hindsight/stats.hpp"

namespace hindsight {

/// idea_id -> system label.
using SystemOf = std::unordered_map<std::string, std::string>;

/// The two systems being compared; ratios are treatment / baseline.
struct SystemPair {
  std::string treatment = "RA";
  std::string baseline = "BL";
};

// ---- System comparison ------------------------------------------------------

struct ComparisonRow {
  std::string label;
  double treatment = 0.0;
  double baseline = 0.0;
  double delta = 0.0;
  std::optional<TestResult> test;  // Mann-Whitney, where reported
};

struct SystemComparison {
  SystemPair systems;
  std::size_t n_treatment = 0;
  std::size_t n_baseline = 0;
  std::vector<ComparisonRow> rows;
};

/// HindSight rows (mean with p, median, match rate, average matches) and,
/// when judge scores are given, one row per judge dimension with p.
SystemComparison compare_systems(const std::vector<HindsightScore>& scores, const std::vector<JudgeScores>& judge,
                                 const SystemOf& system_of, const SystemPair& systems);

// ---- Judge correlations -----------------------------------------------------

struct CorrelationRow {
  std::string system;
  std::string dimension;
  std::size_t n = 0;
  std::optional<double> rho;
  std::optional<double> p_value;
  std::string stars;
  std::string error;  // set when rho is undefined and not strict
};

/// "*", "**", "***" for p below 0.05, 0.01, 0.001.
std::string significance_stars(double p);

/// Spearman rho between HindSight and each judge dimension, per system in
/// `system_order`. With `strict`, StatsError from spearman propagates;
/// otherwise the row records the error.
std::vector<CorrelationRow> correlation_matrix(const std::vector<HindsightScore>& scores,
                                               const std::vector<JudgeScores>& judge, const SystemOf& system_of,
                                               const std::vector<std::string>& system_order, bool strict = true);

// ---- Threshold sweep -------------------------------------------------------

struct SweepSystemPoint {
  std::size_t n = 0;
  double mean = 0.0;
  double match_rate = 0.0;
};

struct SweepPoint {
  double theta = 0.0;
  std::map<std::string, SweepSystemPoint> systems;
  std::optional<double> ratio;  // undefined when the baseline mean is 0
};

/// Re-filters one fixed top-K retrieval at each theta of a strictly
/// increasing grid. Throws AnalysisError on an empty or unordered grid.
std::vector<SweepPoint> threshold_sweep(const std::vector<Ranking>& rankings, const SystemOf& system_of,
                                        const ImpactTable& impact, std::span<const double> theta_grid,
                                        const SystemPair& systems);

/// Runs retrieval once at `k`, then sweeps.
std::vector<SweepPoint> threshold_sweep(const FlatIndex& index, const EmbeddingMatrix& idea_vectors,
                                        const SystemOf& system_of, const ImpactTable& impact,
                                        std::span<const double> theta_grid, std::size_t k, const SystemPair& systems);

// ---- Quadrants -------------------------------------------------------------

enum class Quadrant { TruePositive, HiddenGem, Overhyped, TrueNegative };

std::string_view to_string(Quadrant q);
inline constexpr Quadrant kQuadrants[] = {Quadrant::TruePositive, Quadrant::HiddenGem, Quadrant::Overhyped,
                                          Quadrant::TrueNegative};

struct QuadrantResult {
  /// Medians are pooled over every idea, regardless of system.
  double median_hindsight = 0.0;
  double median_judge = 0.0;
  std::map<std::string, Quadrant> labels;

  std::map<Quadrant, std::size_t> counts() const;
  std::map<Quadrant, std::size_t> counts(const SystemOf& system_of, const std::string& system) const;
};

/// "High" means strictly above the pooled median. Throws AnalysisError
/// listing the symmetric difference when the id sets differ.
QuadrantResult classify_quadrants(const std::map<std::string, double>& hindsight,
                                  const std::map<std::string, double>& judge_overall);

// ---- JSON forms used by stage files and the report --------------------------

Json to_json(const TestResult& t);
Json to_json(const SystemComparison& c);
Json to_json(const std::vector<CorrelationRow>& rows);
Json to_json(const std::vector<SweepPoint>& sweep, const SystemPair& systems);
Json to_json(const QuadrantResult& q, const SystemOf& system_of, const std::vector<std::string>& system_order);

}  // namespace hindsight
