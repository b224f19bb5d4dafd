#include <doctest.h>

#include <algorithm>
#include <random>

#include "hindsight/error.hpp"
#include "hindsight/scorer.hpp"

using namespace hindsight;

namespace {

Paper cited(const std::string& id, std::uint64_t c, const std::string& venue = "") {
  Paper p;
  p.paper_id = id;
  p.title = id;
  p.citation_count = c;
  p.venue = venue;
  return p;
}

MatchSet matches_of(std::vector<std::string> ids) {
  MatchSet m;
  m.idea_id = "I";
  for (auto& id : ids) m.matches.push_back({id, 0.97});
  return m;
}

}  // namespace

TEST_CASE("min-max citation normalization") {
  auto c = normalize_citations({cited("a", 0), cited("b", 50), cited("c", 100)});
  CHECK(c == std::vector<double>{0.0, 0.5, 1.0});
  CHECK(normalize_citations({cited("a", 7), cited("b", 7)}) == std::vector<double>{0.0, 0.0});
  CHECK(normalize_citations({cited("a", 12)}) == std::vector<double>{0.0});
  CHECK_THROWS_AS(normalize_citations({}), ScoringError);
}

TEST_CASE("venue indicator") {
  const auto cfg = VenueConfig::defaults();
  auto v = [&](const std::string& venue) { return venue_indicator(cited("x", 0, venue), cfg); };
  CHECK(v("arXiv") == 0);
  CHECK(v("") == 0);
  CHECK(v("NeurIPS") == 1);
  CHECK(v("neurips") == 1);
  CHECK(v("Neural Information Processing Systems") == 1);
  CHECK(v("Advances in Neural Information Processing Systems 36") == 1);
  CHECK(v("Proceedings of the 40th International Conference on Machine Learning") == 1);
  CHECK(v("International Conference on Learning Representations") == 1);
  CHECK(v("2024 IEEE/CVF Conference on Computer Vision and Pattern Recognition (CVPR)") == 1);
  CHECK(v("Annual Meeting of the Association for Computational Linguistics") == 1);
  CHECK(v("AAAI Conference on Artificial Intelligence") == 1);
  CHECK(v("EMNLP") == 1);
  CHECK(v("Findings of the Association for Computational Linguistics: EMNLP 2023") == 0);
  CHECK(v("NeurIPS Workshop on Efficient Systems") == 0);
  CHECK(v("North American Chapter of the Association for Computational Linguistics") == 0);
  CHECK(v("NAACL") == 0);
  CHECK(v("Transactions on Machine Learning Research") == 0);
  CHECK(v("Nature") == 0);
}

TEST_CASE("venue normalization drops filler tokens") {
  CHECK(normalize_venue("Proceedings of the 37th Annual Conference, 2023") == "conference");
  CHECK(normalize_venue("  IEEE/CVF   CVPR ") == "cvpr");
}

TEST_CASE("impact blend") {
  const auto cfg = VenueConfig::defaults();
  CHECK(impact_score(0.0, 0, cfg) == 0.0);
  CHECK(impact_score(1.0, 1, cfg) == 1.0);
  CHECK(impact_score(0.5, 1, cfg) == 0.7);
  CHECK_THROWS_AS(impact_score(1.2, 0, cfg), ScoringError);
  CHECK_THROWS_AS(impact_score(0.5, 2, cfg), ScoringError);
}

TEST_CASE("impact stays in [0, 1] and is monotone in citations at fixed venue") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::uint64_t> c(0, 5000);
  const auto cfg = VenueConfig::defaults();
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Paper> pool;
    for (int i = 0; i < 40; ++i) pool.push_back(cited("p" + std::to_string(i), c(rng), i % 3 ? "arXiv" : "ICML"));
    const auto table = ImpactTable::build(pool, cfg);
    for (const auto& a : pool) {
      const auto* ea = table.find(a.paper_id);
      CHECK(ea->h >= 0.0);
      CHECK(ea->h <= 1.0);
      for (const auto& b : pool) {
        const auto* eb = table.find(b.paper_id);
        if (ea->v == eb->v && a.citation_count <= b.citation_count) CHECK(ea->h <= eb->h);
      }
    }
  }
}

TEST_CASE("invalid weights are rejected") {
  auto cfg = VenueConfig::defaults();
  cfg.weight_citations = 0.7;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.weight_citations = -0.1;
  cfg.weight_venue = 1.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("hindsight score is the max impact over matches") {
  ImpactTable table;
  table.insert("a", {0, 0, 0.2});
  table.insert("b", {0, 0, 0.7});
  table.insert("c", {0, 0, 0.4});
  table.insert("d", {0, 0, 0.33});
  table.insert("e", {0, 0, 0.7});

  auto s = hindsight_score(matches_of({"a", "b", "c"}), table);
  CHECK(s.score == 0.7);
  CHECK(s.best_paper_id == std::optional<std::string>("b"));
  CHECK(s.match_count == 3);

  CHECK(hindsight_score(matches_of({"d"}), table).score == 0.33);

  auto empty = hindsight_score(matches_of({}), table);
  CHECK(empty.score == 0.0);
  CHECK_FALSE(empty.best_paper_id);

  SUBCASE("ties go to the lowest paper id regardless of match order") {
    CHECK(hindsight_score(matches_of({"e", "b"}), table).best_paper_id == std::optional<std::string>("b"));
    CHECK(hindsight_score(matches_of({"b", "e"}), table).best_paper_id == std::optional<std::string>("b"));
  }
  SUBCASE("missing paper") { CHECK_THROWS_AS(hindsight_score(matches_of({"zzz"}), table), ScoringError); }
}

TEST_CASE("score never decreases when matches are added") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ImpactTable table;
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) {
    ids.push_back("p" + std::to_string(i));
    table.insert(ids.back(), {0, 0, u(rng)});
  }
  for (int trial = 0; trial < 100; ++trial) {
    std::shuffle(ids.begin(), ids.end(), rng);
    double previous = 0.0;
    for (std::size_t n = 0; n <= ids.size(); ++n) {
      const double s = hindsight_score(matches_of({ids.begin(), ids.begin() + n}), table).score;
      CHECK(s >= previous);
      previous = s;
    }
  }
}
