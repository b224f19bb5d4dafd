#include <doctest.h>

#include "hindsight/corpus.hpp"
#include "hindsight/error.hpp"
#include "support.hpp"

using namespace hindsight;

namespace {

Paper paper(std::string id, std::string title, std::uint64_t citations = 0, Date published = Date(2024, 1, 10)) {
  Paper p;
  p.paper_id = std::move(id);
  p.title = std::move(title);
  p.abstract = "abstract of " + p.paper_id;
  p.citation_count = citations;
  p.venue = "NeurIPS";
  p.published = published;
  return p;
}

Idea idea(std::string id, std::vector<Date> provenance = {Date(2023, 3, 1)}) {
  Idea i;
  i.idea_id = std::move(id);
  i.system = "RA";
  i.topic = "LLM Agents";
  i.problem = "Agents forget tool outputs.";
  i.method = "Cache tool outputs in a scratchpad.";
  i.provenance_dates = std::move(provenance);
  return i;
}

TimeSplitConfig split() { return {Date(2023, 6, 1), 30, Date(2023, 12, 1), 6}; }

}  // namespace

TEST_CASE("dates parse partial forms and count whole months") {
  CHECK(Date::parse("2023") == Date(2023, 1, 1));
  CHECK(Date::parse("2023-05") == Date(2023, 5, 1));
  CHECK(Date::parse("2023-05-31").str() == "2023-05-31");
  CHECK_THROWS_AS(Date::parse("2023-13-01"), FormatError);
  CHECK_THROWS_AS(Date::parse("May 2023"), FormatError);
  CHECK(Date(2023, 6, 1).add_months(30) == Date(2025, 12, 1));
  CHECK(months_between(Date(2023, 6, 1), Date(2023, 12, 1)) == 6);
  CHECK(months_between(Date(2023, 6, 2), Date(2023, 12, 1)) == 5);
  CHECK(Date(2023, 5, 31) < Date(2023, 6, 1));
}

TEST_CASE("dedup") {
  SUBCASE("same id collapses to one record") {
    auto out = dedup({paper("A", "One"), paper("A", "One")});
    CHECK(out.size() == 1);
  }
  SUBCASE("title differing by case and trailing period keeps the higher-cited record") {
    auto out = dedup({paper("A", "Sparse Attention Is All You Need.", 3), paper("B", "sparse attention is all you need", 10)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].paper_id == "B");
    CHECK(out[0].citation_count == 10);
  }
  SUBCASE("disjoint ids and titles are unchanged") {
    std::vector<Paper> in{paper("A", "One"), paper("B", "Two"), paper("C", "Three")};
    CHECK(dedup(in) == in);
  }
  SUBCASE("citation tie keeps the earliest record") {
    auto out = dedup({paper("A", "Same", 5), paper("B", "same", 5)});
    REQUIRE(out.size() == 1);
    CHECK(out[0].paper_id == "A");
  }
  SUBCASE("groups join transitively through id and title") {
    // A~B by title, B~C by id.
    auto out = dedup({paper("A", "Title X", 1), paper("B", "title x", 2), paper("B", "Other", 7), paper("D", "Z")});
    REQUIRE(out.size() == 2);
    CHECK(out[0].title == "Other");
    CHECK(out[1].paper_id == "D");
  }
  SUBCASE("idempotent") {
    std::vector<Paper> in{paper("A", "x", 1), paper("B", "X.", 4), paper("A", "y", 2), paper("C", "z")};
    auto once = dedup(in);
    CHECK(dedup(once) == once);
  }
}

TEST_CASE("normalize_title folds case, punctuation and whitespace only") {
  CHECK(normalize_title("  Hello,   World! ") == "hello world");
  CHECK(normalize_title("Caf\xC3\xA9 Models.") == "caf\xC3\xA9 models");
}

TEST_CASE("time-split validation") {
  SUBCASE("clean split") {
    auto r = validate_time_split(split(), {paper("A", "a", 0, Date(2023, 6, 1))}, {idea("I1")});
    CHECK(r.leakage_safe());
  }
  SUBCASE("pool paper dated 2023-05 names that paper") {
    auto r = validate_time_split(split(), {paper("A", "a"), paper("OLD", "b", 0, Date::parse("2023-05"))}, {});
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::PoolPaperBeforeCutoff);
    CHECK(r.violations[0].subject == "OLD");
  }
  SUBCASE("provenance dated exactly T leaks") {
    auto r = validate_time_split(split(), {}, {idea("I1", {Date(2023, 6, 1)})});
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::IdeaProvenanceLeak);
    CHECK(r.violations[0].subject == "I1");
  }
  SUBCASE("margin below six months") {
    auto cfg = split();
    cfg.model_knowledge_cutoff = Date(2023, 11, 30);
    auto r = validate_time_split(cfg, {}, {});
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].kind == ViolationKind::MarginShortfall);
  }
  SUBCASE("every offending record is listed") {
    auto r = validate_time_split(split(), {paper("A", "a", 0, Date(2020, 1, 1)), paper("B", "b", 0, Date(2021, 1, 1))},
                                 {idea("I1", {Date(2022, 1, 1), Date(2024, 1, 1)})});
    CHECK(r.violations.size() == 3);
  }
}

TEST_CASE("text composition") {
  auto p = paper("A", "Title");
  p.abstract = "Body text.";
  CHECK(compose_paper_text(p).text == "Title [SEP] Body text.");
  CHECK_FALSE(compose_paper_text(p).degraded);

  p.abstract.clear();
  auto degraded = compose_paper_text(p);
  CHECK(degraded.text == "Title [SEP]");
  CHECK(degraded.degraded);

  auto i = idea("I1");
  CHECK(compose_idea_text(i) == "Agents forget tool outputs. [SEP] Cache tool outputs in a scratchpad.");
  CHECK(compose_idea_text(i) == compose_idea_text(i));
  i.method.clear();
  CHECK_THROWS_AS(compose_idea_text(i), CompositionError);

  auto u = idea("I2");
  u.problem = "\xE2\x80\x9CQuoted\xE2\x80\x9D  problem\t";
  u.method = "m\xC3\xA9thode";
  CHECK(compose_idea_text(u) == u.problem + " [SEP] " + u.method);
}

TEST_CASE("papers and ideas round-trip through line-delimited files") {
  testsupport::TempDir dir("corpus");
  auto a = paper("A", "Alpha \xCE\xB1", 12);
  a.topics = {"Diffusion Models", "LLM Agents"};  // stored sorted
  auto b = paper("B", "Beta", 0);
  b.abstract.clear();
  b.degraded = true;
  write_papers(dir / "papers.jsonl", {a, b}, "2025-01-01T00:00:00Z");
  CHECK(read_papers(dir / "papers.jsonl") == std::vector<Paper>{a, b});

  auto i = idea("I1");
  i.seed_paper_id = "S1";
  write_ideas(dir / "ideas.jsonl", {i, idea("I2", {})});
  auto back = read_ideas(dir / "ideas.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[0] == i);

  write_papers(dir / "dup.jsonl", {a, a}, "x");
  CHECK_THROWS_AS(read_papers(dir / "dup.jsonl"), FormatError);
  CHECK_THROWS_AS(read_papers(dir / "missing.jsonl"), IoError);
}
