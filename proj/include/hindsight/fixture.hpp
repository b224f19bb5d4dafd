#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/corpus.hpp"
#include "hindsight/embed_io.hpp"
#include "hindsight/stats.hpp"

namespace hindsight {

/// How one system's ideas are planted against the pool.
struct PlantProfile {
  double match_probability = 0.8;  // chance an idea gets any planted papers
  std::size_t min_planted = 1;
  std::size_t max_planted = 6;
  std::vector<double> levels;  // cosine levels drawn uniformly per planted paper
};

struct PlantedPaperSpec {
  double similarity = 0.0;
  std::optional<std::uint64_t> citations;
  std::optional<bool> top_venue;
};

/// An idea whose planted papers are given explicitly.
struct PlantedIdeaSpec {
  std::string system;
  std::vector<PlantedPaperSpec> papers;
};

struct FixtureSpec {
  std::vector<std::string> systems{"RA", "BL"};
  std::size_t ideas_per_system = 50;
  std::size_t papers = 2000;
  std::map<std::string, PlantProfile> profiles;
  std::vector<PlantedIdeaSpec> explicit_ideas;
  /// Correlation of planted papers' off-idea components within one cluster.
  double residual_correlation = 0.3;
  std::size_t background_dim = 16;
  double top_venue_fraction = 0.08;
  double missing_abstract_fraction = 0.02;
  double pareto_alpha = 1.1;
  double weight_citations = 0.6;
  double weight_venue = 0.4;
  double theta = 0.96;
  std::size_t k = 20;
  Date cutoff{2023, 6, 1};
  int window_months = 30;
  std::uint64_t seed = 1;

  /// Two systems with a planted gap: RA matches often and high, BL rarely.
  static FixtureSpec defaults(std::uint64_t seed = 1);
};

struct PlantedMatch {
  std::string paper_id;
  double similarity = 0.0;  // exact stored cosine (float-representable)
};

struct OracleIdea {
  std::string idea_id;
  std::string system;
  std::vector<PlantedMatch> planted;
};

struct OracleOutcome {
  std::vector<std::string> matches;  // ranked
  double score = 0.0;
  std::optional<std::string> best_paper_id;
};

/// Synthetic pool + ideas whose similarities are planted geometrically, so
/// every idea's match set and score are known analytically.
struct Fixture {
  FixtureSpec spec;
  std::vector<Paper> pool;
  std::vector<Idea> ideas;
  std::vector<JudgeScores> judge;
  EmbeddingMatrix paper_vectors;
  EmbeddingMatrix idea_vectors;
  std::vector<OracleIdea> oracle;
  /// Generation-time impact, derived from planted citations and the venue
  /// class each paper was drawn from.
  std::map<std::string, double> oracle_impact;

  /// Analytic match set and score for one idea at (theta, k): planted
  /// papers carry their planted cosine, every other paper cosine 0.
  OracleOutcome expected(const OracleIdea& idea, double theta, std::size_t k) const;

 private:
  friend Fixture generate_fixture(const FixtureSpec& spec);
  std::vector<std::string> sorted_ids_;
};

/// Throws AnalysisError when the planted structure is infeasible (a level
/// outside [-1, 1] or a cluster Gram matrix that is not positive definite).
Fixture generate_fixture(const FixtureSpec& spec);

struct FixturePaths {
  std::filesystem::path papers;
  std::filesystem::path ideas;
  std::filesystem::path paper_vectors;
  std::filesystem::path idea_vectors;
  std::filesystem::path judge;
  std::filesystem::path oracle;

  static FixturePaths in(const std::filesystem::path& dir);
};

/// Persists pool, ideas, vectors, judge scores and the oracle (expected
/// score per idea at the fixture's theta and k).
void write_fixture(const Fixture& fixture, const FixturePaths& paths);

}  // namespace hindsight
