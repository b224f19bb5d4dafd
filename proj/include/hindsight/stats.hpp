#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hindsight {

enum class TestMethod { ExactPermutation, NormalApproximation, TApproximation };

std::string_view to_string(TestMethod method);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  TestMethod method = TestMethod::NormalApproximation;
  std::size_t n1 = 0;
  std::size_t n2 = 0;  // 0 for single-sample tests
};

/// 1-based ranks; tied values share the average of their positions.
std::vector<double> average_ranks(std::span<const double> values);

/// Pooled sizes up to this bound use exact enumeration in Auto mode.
inline constexpr std::size_t kExactMannWhitneyMax = 12;

enum class MannWhitneyMode { Auto, Exact, Normal };

/// Two-sided Mann-Whitney U. `statistic` is U for sample `a`. Exact mode
/// counts every split of the pooled ranks (ties keep their average ranks);
/// the normal approximation uses tie-corrected variance and a 0.5
/// continuity correction. Throws StatsError on an empty sample.
TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b,
                          MannWhitneyMode mode = MannWhitneyMode::Auto);

/// Spearman rho as the Pearson correlation of average ranks; two-sided p
/// from Student's t with n-2 degrees of freedom. Throws StatsError for
/// mismatched lengths, n < 3, or a constant input.
TestResult spearman(std::span<const double> x, std::span<const double> y);

/// Two-sided permutation p-value for Spearman rho over all n! pairings.
/// Limited to n <= 8.
double spearman_permutation_p(std::span<const double> x, std::span<const double> y);

double mean(std::span<const double> values);
/// Midpoint of the two central order statistics for even sizes.
double median(std::span<const double> values);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double median = 0.0;
  /// Fraction of strictly positive scores.
  double match_rate = 0.0;
  std::size_t positive = 0;
  std::optional<double> avg_matches;
};

/// Throws StatsError on an empty sample. `match_counts`, when non-empty,
/// must align with `scores`.
Summary summary(std::span<const double> scores, std::span<const std::size_t> match_counts = {});

/// Subjective judge scores for one idea, each the mean of repeated runs.
struct JudgeScores {
  std::string idea_id;
  double novelty = 0.0;
  double feasibility = 0.0;
  double impact = 0.0;
  double overall = 0.0;
};

inline constexpr std::string_view kJudgeDimensions[] = {"novelty", "feasibility", "impact", "overall"};

/// Value of a named dimension; throws StatsError for an unknown name.
double dimension(const JudgeScores& scores, std::string_view name);

/// Reads line-delimited judge records; every dimension must be in [1, 10].
std::vector<JudgeScores> read_judge_scores(const std::filesystem::path& path);
void write_judge_scores(const std::filesystem::path& path, const std::vector<JudgeScores>& scores);

}  // namespace hindsight
