#include <doctest.h>

#include <deque>
#include <mutex>

#include "hindsight/corpus.hpp"
#include "hindsight/error.hpp"
#include "hindsight/scholar.hpp"
#include "support.hpp"

using namespace hindsight;

namespace {

/// Serves scripted responses per request target; records every call.
class FakeTransport : public HttpTransport {
 public:
  HttpResponse get(const std::string& target, const HttpHeaders& headers) override {
    std::lock_guard lock(mutex_);
    calls.push_back(target);
    last_headers = headers;
    auto& queue = script[target];
    if (queue.empty()) return fallback;
    auto r = queue.front();
    queue.pop_front();
    return r;
  }

  std::map<std::string, std::deque<HttpResponse>> script;
  HttpResponse fallback{404, "", ""};
  std::vector<std::string> calls;
  HttpHeaders last_headers;

 private:
  std::mutex mutex_;
};

Json record(const std::string& id, int citations, const std::string& date = "2024-02-01") {
  return {{"paperId", id},          {"title", "Paper " + id}, {"abstract", "About " + id},
          {"citationCount", citations}, {"venue", "ICML"},       {"publicationDate", date}};
}

std::map<std::string, std::string> params_for(const std::string& query, const QueryPlan& plan) {
  return {{"query", query},
          {"fields", "paperId,title,abstract,citationCount,venue,publicationDate"},
          {"publicationDateOrYear", plan.from.str() + ":" + plan.to.str()}};
}

QueryPlan plan_of(std::vector<std::string> topics) {
  QueryPlan plan;
  plan.from = Date(2023, 6, 1);
  plan.to = plan.from.add_months(30);
  for (auto& t : topics) plan.queries.push_back({t, t});
  return plan;
}

IngestOptions options_in(const testsupport::TempDir& dir) {
  IngestOptions o;
  o.cache_dir = dir / "cache";
  o.sleep = [](std::chrono::milliseconds) {};
  return o;
}

}  // namespace

TEST_CASE("canonical query sorts and percent-encodes parameters") {
  CHECK(canonical_query("/p", {{"b", "x y"}, {"a", "A&B/é"}}) == "/p?a=A%26B%2F%C3%A9&b=x%20y");
  CHECK(canonical_query("/p", {}) == "/p");
}

TEST_CASE("search records") {
  auto p = paper_from_search_record(record("X", 4), "Agents");
  REQUIRE(p);
  CHECK(p->paper_id == "X");
  CHECK(p->citation_count == 4);
  CHECK(p->topics == std::vector<std::string>{"Agents"});

  auto no_abstract = record("Y", 0);
  no_abstract["abstract"] = nullptr;
  auto q = paper_from_search_record(no_abstract, "t");
  REQUIRE(q);
  CHECK(q->degraded);

  auto bad = record("Z", 1);
  bad.erase("publicationDate");
  CHECK_FALSE(paper_from_search_record(bad, "t"));
  bad = record("Z", -1);
  CHECK_FALSE(paper_from_search_record(bad, "t"));
}

TEST_CASE("empty query plan yields an empty pool without touching the network") {
  testsupport::TempDir dir("ingest");
  auto fake = std::make_shared<FakeTransport>();
  auto result = ingest_papers(plan_of({}), Date(2023, 6, 1), options_in(dir), fake);
  CHECK(result.papers.empty());
  CHECK(fake->calls.empty());
}

TEST_CASE("query range must start at the cutoff") {
  testsupport::TempDir dir("ingest");
  auto plan = plan_of({"t"});
  plan.from = Date(2023, 5, 1);
  CHECK_THROWS_AS(ingest_papers(plan, Date(2023, 6, 1), options_in(dir), nullptr), ConfigError);
}

TEST_CASE("cached fixture of 50 records with 5 duplicate ids dedups to 45") {
  testsupport::TempDir dir("ingest");
  const auto plan = plan_of({"LLM Agents"});
  auto options = options_in(dir);
  ResponseCache cache(options.cache_dir);

  // Two cached pages; ids 0..44 plus 5 repeats of ids 0..4.
  Json page1, page2;
  page1["data"] = Json::array();
  page2["data"] = Json::array();
  for (int i = 0; i < 25; ++i) page1["data"].push_back(record("P" + std::to_string(i), i));
  for (int i = 25; i < 45; ++i) page2["data"].push_back(record("P" + std::to_string(i), i));
  for (int i = 0; i < 5; ++i) page2["data"].push_back(record("P" + std::to_string(i), 100 + i));
  page1["token"] = "next";
  auto params = params_for("LLM Agents", plan);
  cache.store(canonical_query(options.search_path, params), page1.dump());
  params["token"] = "next";
  cache.store(canonical_query(options.search_path, params), page2.dump());

  auto result = ingest_papers(plan, plan.from, options, nullptr);
  CHECK(result.papers.size() == 50);
  CHECK(result.report.cache_hits == 2);
  CHECK(result.report.network_requests == 0);
  auto pool = dedup(result.papers);
  CHECK(pool.size() == 45);
  // The higher-cited duplicate survives.
  auto it = std::find_if(pool.begin(), pool.end(), [](const Paper& p) { return p.paper_id == "P3"; });
  REQUIRE(it != pool.end());
  CHECK(it->citation_count == 103);
}

TEST_CASE("pagination, retries and caching against a scripted transport") {
  testsupport::TempDir dir("ingest");
  const auto plan = plan_of({"RAG"});
  auto options = options_in(dir);
  options.api_key = "secret";
  std::vector<std::chrono::milliseconds> sleeps;
  options.sleep = [&](std::chrono::milliseconds d) { sleeps.push_back(d); };

  auto fake = std::make_shared<FakeTransport>();
  auto params = params_for("RAG", plan);
  const auto first = canonical_query(options.search_path, params);
  params["token"] = "t2";
  const auto second = canonical_query(options.search_path, params);

  Json p1{{"data", {record("A", 1), record("B", 2), Json{{"paperId", "broken"}}}}, {"token", "t2"}};
  Json p2{{"data", {record("C", 3)}}};
  fake->script[first] = {{429, "", ""}, {-1, "", "connection reset"}, {200, p1.dump(), ""}};
  fake->script[second] = {{503, "", ""}, {200, p2.dump(), ""}};

  auto result = ingest_papers(plan, plan.from, options, fake);
  CHECK(result.papers.size() == 3);
  CHECK(result.report.malformed_records == 1);
  CHECK(result.report.network_requests == 2);
  CHECK(fake->calls.size() == 5);
  CHECK(sleeps == std::vector<std::chrono::milliseconds>{std::chrono::milliseconds(500),
                                                         std::chrono::milliseconds(1000),
                                                         std::chrono::milliseconds(500)});
  auto key = fake->last_headers.find("x-api-key");
  REQUIRE(key != fake->last_headers.end());
  CHECK(key->second == "secret");

  // Second run is served from the cache.
  fake->calls.clear();
  auto again = ingest_papers(plan, plan.from, options, fake);
  CHECK(fake->calls.empty());
  CHECK(again.report.cache_hits == 2);
  CHECK(again.papers == result.papers);
}

TEST_CASE("exhausted retries raise an ingest error naming the topic") {
  testsupport::TempDir dir("ingest");
  auto options = options_in(dir);
  options.max_retries = 2;
  auto fake = std::make_shared<FakeTransport>();
  fake->fallback = {500, "", ""};
  try {
    ingest_papers(plan_of({"Diffusion Models"}), Date(2023, 6, 1), options, fake);
    FAIL("expected IngestError");
  } catch (const IngestError& e) {
    CHECK(std::string(e.what()).find("Diffusion Models") != std::string::npos);
  }
  CHECK(fake->calls.size() == 3);
}

TEST_CASE("client errors are not retried") {
  testsupport::TempDir dir("ingest");
  auto fake = std::make_shared<FakeTransport>();
  fake->fallback = {400, "", ""};
  CHECK_THROWS_AS(ingest_papers(plan_of({"x"}), Date(2023, 6, 1), options_in(dir), fake), IngestError);
  CHECK(fake->calls.size() == 1);
}

TEST_CASE("cache-only mode fails on a miss") {
  testsupport::TempDir dir("ingest");
  CHECK_THROWS_AS(ingest_papers(plan_of({"x"}), Date(2023, 6, 1), options_in(dir), nullptr), IngestError);
}

TEST_CASE("cache is append-only") {
  testsupport::TempDir dir("cache");
  ResponseCache cache(dir.path());
  cache.store("k", "first");
  cache.store("k", "second");
  CHECK(cache.find("k") == std::optional<std::string>("first"));
  CHECK_FALSE(cache.find("other"));
}
