#include <doctest.h>

#include <sys/wait.h>

#include <fstream>

#include "hindsight/artifacts.hpp"
#include "hindsight/config.hpp"
#include "hindsight/error.hpp"
#include "hindsight/fixture.hpp"
#include "hindsight/pipeline.hpp"
#include "support.hpp"

using namespace hindsight;
using testsupport::TempDir;

namespace {

struct CliResult {
  int code = -1;
  std::string err;
};

CliResult cli(const std::string& args, const TempDir& dir) {
  const auto err = dir / "stderr.txt";
  const std::string cmd = std::string(HINDSIGHT_CLI) + " " + args + " > /dev/null 2> " + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, testsupport::read_file(err)};
}

RunConfig small_config(const TempDir& dir) {
  RunConfig cfg;
  cfg.paths.work_dir = dir / "run";
  cfg.fixture_seed = 12;
  return cfg;
}

Json read_json(const std::filesystem::path& p) { return Json::parse(testsupport::read_file(p)); }

}  // namespace

TEST_CASE("config files") {
  TempDir dir("cfg");
  std::ofstream(dir / "c.json") << R"({"theta": 0.95, "k": 10, "cutoff": "2023-07-01",
    "weights": [0.5, 0.5], "paths": {"work_dir": "w"}, "venue_aliases": {"Proc. of TMLR": "TMLR"},
    "top_venues": ["TMLR", "ICML"]})";
  auto cfg = load_config(dir / "c.json");
  CHECK(cfg.theta == 0.95);
  CHECK(cfg.k == 10);
  CHECK(cfg.cutoff == Date(2023, 7, 1));
  CHECK(cfg.venues.weight_venue == 0.5);
  CHECK(cfg.paths.resolve(cfg.paths.corpus) == std::filesystem::path("w") / "papers.jsonl");
  Paper p;
  p.venue = "Proceedings of TMLR";
  CHECK(venue_indicator(p, cfg.venues) == 1);
  cfg.validate();

  const auto round = config_from_json(to_json(cfg));
  CHECK(config_hash(round) == config_hash(cfg));
  auto other = cfg;
  other.theta = 0.96;
  CHECK(config_hash(other) != config_hash(cfg));
  other = cfg;
  other.embed_batch_size = 7;  // not a result-affecting parameter
  CHECK(config_hash(other) == config_hash(cfg));

  std::ofstream(dir / "bad.json") << R"({"theta": "high"})";
  CHECK_THROWS_AS(load_config(dir / "bad.json"), ConfigError);
  std::ofstream(dir / "broken.json") << "{";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), ConfigError);

  RunConfig invalid;
  invalid.theta = 1.5;
  CHECK_THROWS_AS(invalid.validate(), ConfigError);
  invalid = RunConfig{};
  invalid.paths.judge = "papers.jsonl";
  CHECK_THROWS_AS(invalid.validate(), ConfigError);
}

TEST_CASE("stage chain reproduces the fixture oracle") {
  TempDir dir("chain");
  const auto cfg = small_config(dir);
  run_fixture(cfg);
  CHECK(run_validate(cfg).leakage_safe());
  run_match(cfg);
  run_score(cfg);
  run_compare(cfg);
  run_sweep(cfg);
  run_quadrants(cfg);
  run_report(cfg, "t0");

  const auto files = StageFiles::of(cfg);
  auto oracle = read_jsonl(files.oracle, "hindsight.fixture_oracle");
  auto scores = read_scores(files.scores);
  REQUIRE(oracle.records.size() == scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& o = oracle.records[i];
    CHECK(scores[i].score.idea_id == o.at("idea_id").get<std::string>());
    CHECK(scores[i].score.score == o.at("expected_score").get<double>());
    CHECK(scores[i].score.match_count == o.at("expected_match_count").get<std::size_t>());
  }

  const auto report = read_json(files.report_dir / "report.json");
  CHECK(report.at("metadata").at("config_hash") == config_hash(cfg));
  CHECK(report.at("metadata").at("generated_at") == "t0");
  CHECK(report.at("idea_count") == 100);
  CHECK(report.at("comparison").at("rows").size() == 8);
  CHECK(report.at("correlations").size() == 8);
  CHECK(report.at("quadrants").at("counts").at("all").size() == 4);
  CHECK(std::filesystem::exists(files.report_dir / "sweep.csv"));

  // Same inputs, later timestamp: only that field differs.
  const auto first = testsupport::read_file(files.report_dir / "report.json");
  const auto scores_csv = testsupport::read_file(files.report_dir / "scores.csv");
  run_report(cfg, "t1");
  auto second = testsupport::read_file(files.report_dir / "report.json");
  CHECK(second != first);
  second.replace(second.find("\"t1\""), 4, "\"t0\"");
  CHECK(second == first);
  CHECK(testsupport::read_file(files.report_dir / "scores.csv") == scores_csv);
}

TEST_CASE("empty idea set yields a report with explicit empty markers") {
  TempDir dir("empty");
  const auto cfg = small_config(dir);
  run_fixture(cfg);
  write_ideas(cfg.paths.resolve(cfg.paths.ideas), {});
  write_judge_scores(cfg.paths.resolve(cfg.paths.judge), {});
  const auto dim = load_vectors(cfg.paths.resolve(cfg.paths.paper_vectors)).matrix.dim();
  write_vectors(EmbeddingMatrix(dim, {}, {}), cfg.paths.resolve(cfg.paths.idea_vectors));
  run_match(cfg);
  run_score(cfg);
  run_compare(cfg);
  run_sweep(cfg);
  run_quadrants(cfg);
  run_report(cfg, "t");
  const auto report = read_json(StageFiles::of(cfg).report_dir / "report.json");
  CHECK(report.at("empty") == true);
  CHECK(report.at("comparison") == Json{{"empty", true}});
  CHECK(report.at("quadrants") == Json{{"empty", true}});
}

TEST_CASE("ideas without vectors are a format error") {
  TempDir dir("orphans");
  const auto cfg = small_config(dir);
  run_fixture(cfg);
  auto ideas = read_ideas(cfg.paths.resolve(cfg.paths.ideas));
  ideas.push_back(ideas.front());
  ideas.back().idea_id = "RA-999";
  write_ideas(cfg.paths.resolve(cfg.paths.ideas), ideas);
  CHECK_THROWS_AS(run_match(cfg), FormatError);
  const auto alignment = read_json(StageFiles::of(cfg).alignment);
  CHECK(alignment.at("body").at("ideas_without_vector") == Json::array({"RA-999"}));
}

TEST_CASE("work directory lock") {
  TempDir dir("lock");
  const auto cfg = small_config(dir);
  {
    WorkDirLock lock(cfg);
    CHECK_THROWS_AS(WorkDirLock{cfg}, Error);
  }
  WorkDirLock again(cfg);
}

TEST_CASE("CLI exit codes") {
  TempDir dir("cli");
  const std::string wd = "--work-dir " + (dir / "run").string();
  CHECK(cli("fixture " + wd + " --seed 3", dir).code == 0);
  CHECK(cli("validate " + wd, dir).code == 0);

  auto early = cli("score " + wd, dir);
  CHECK(early.code == 2);
  CHECK(early.err.find("run match first") != std::string::npos);

  CHECK(cli("match " + wd + " --theta 2", dir).code == 1);
  CHECK(cli("match " + wd + " --cutoff not-a-date", dir).code == 1);
  CHECK(cli("frobnicate", dir).code == 1);

  // A pool paper before the cutoff is a validation failure.
  const auto papers_path = dir / "run" / "papers.jsonl";
  auto papers = read_papers(papers_path);
  papers[0].published = Date(2023, 5, 31);
  write_papers(papers_path, papers, "edited");
  auto leak = cli("validate " + wd, dir);
  CHECK(leak.code == 1);
  CHECK(leak.err.find(papers[0].paper_id) != std::string::npos);
}

TEST_CASE("embed stage drives the external encoder") {
  TempDir dir("embed");
  auto cfg = small_config(dir);
  run_fixture(cfg);
  cfg.embedder_command = std::string("python3 ") + HINDSIGHT_TEST_DATA + "/fake_encoder.py";
  run_embed(cfg);
  const auto papers = load_vectors(cfg.paths.resolve(cfg.paths.paper_vectors));
  CHECK(papers.matrix.rows() == 2000);
  CHECK(papers.matrix.dim() == 8);
  const auto first = testsupport::read_file(cfg.paths.resolve(cfg.paths.idea_vectors));
  run_embed(cfg);
  CHECK(testsupport::read_file(cfg.paths.resolve(cfg.paths.idea_vectors)) == first);
  run_match(cfg);
  CHECK(read_rankings(StageFiles::of(cfg).rankings).size() == 100);

  auto texts = testsupport::read_file(StageFiles::of(cfg).paper_texts);
  CHECK(texts.find(" [SEP] ") != std::string::npos);

  SUBCASE("encoder failure is an external-service error") {
    auto ideas = read_ideas(cfg.paths.resolve(cfg.paths.ideas));
    ideas[0].problem = "FAIL";
    ideas[0].method = "x";
    write_ideas(cfg.paths.resolve(cfg.paths.ideas), ideas);
    auto broken = cfg;
    broken.embedder_command = "false";
    CHECK_THROWS_AS(run_embed(broken), ExternalServiceError);
    const std::string wd = "--work-dir " + cfg.paths.work_dir.string();
    CHECK(cli("embed " + wd + " --embedder false", dir).code == 3);
  }
}
