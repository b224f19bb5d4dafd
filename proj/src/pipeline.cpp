#include "hindsight/pipeline.hpp"

#include "hindsight/kernels.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>

#include "hindsight/analysis.hpp"
#include "hindsight/artifacts.hpp"
#include "hindsight/embed_io.hpp"
#include "hindsight/error.hpp"
#include "hindsight/fixture.hpp"
#include "hindsight/matcher.hpp"
#include "hindsight/scorer.hpp"
#include "hindsight/stats.hpp"

#ifndef HINDSIGHT_VERSION
#define HINDSIGHT_VERSION "0.0.0"
#endif

namespace hindsight {

std::string tool_version() { return HINDSIGHT_VERSION; }

StageFiles StageFiles::of(const RunConfig& cfg) {
  const auto& w = cfg.paths.work_dir;
  return {w / "validation.json", w / "paper_texts.jsonl", w / "idea_texts.jsonl", w / "alignment.json",
          w / "rankings.jsonl", w / "matches.jsonl",    w / "impact.jsonl",      w / "scores.jsonl",
          w / "comparison.json", w / "sweep.json",       w / "quadrants.json",    cfg.paths.resolve(cfg.paths.report_dir),
          w / "fixture_oracle.jsonl", w / "ingest_report.json", w / ".hindsight.lock"};
}

WorkDirLock::WorkDirLock(const RunConfig& cfg) : path_(StageFiles::of(cfg).lock) {
  std::filesystem::create_directories(path_.parent_path());
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    throw Error("work directory is locked by another hindsight process (remove " + path_.string() +
                " if it is stale)");
  }
  ::close(fd);
}

WorkDirLock::~WorkDirLock() {
  std::error_code ec;
  std::filesystem::remove(path_, ec);
}

namespace {

void require(const std::filesystem::path& path, const std::string& producer) {
  if (!std::filesystem::exists(path)) {
    throw MissingInputError("missing " + path.string() + ": run " + producer + " first");
  }
}

Json stage_header(const RunConfig& cfg) {
  return Json{{"config_hash", config_hash(cfg)}, {"tool_version", tool_version()}};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << "\n";
  if (!out) throw IoError("write failed for " + path.string());
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

Json stage_document(const RunConfig& cfg, const std::string& schema, Json body) {
  Json j = make_header(schema, 1);
  const Json extra = stage_header(cfg);
  for (const auto& [k, v] : extra.items()) j[k] = v;
  j["body"] = std::move(body);
  return j;
}

std::vector<Paper> load_corpus(const RunConfig& cfg) {
  const auto path = cfg.paths.resolve(cfg.paths.corpus);
  require(path, "ingest (or fixture)");
  return read_papers(path);
}

std::vector<Idea> load_ideas(const RunConfig& cfg) {
  const auto path = cfg.paths.resolve(cfg.paths.ideas);
  require(path, "fixture (or supply an ideas file)");
  return read_ideas(path);
}

SystemOf systems_of(const std::vector<Idea>& ideas) {
  SystemOf out;
  for (const auto& i : ideas) out[i.idea_id] = i.system;
  return out;
}

std::vector<std::string> system_order(const RunConfig& cfg, const std::vector<Idea>& ideas) {
  std::vector<std::string> order{cfg.systems.treatment, cfg.systems.baseline};
  std::set<std::string> others;
  for (const auto& i : ideas) {
    if (i.system != cfg.systems.treatment && i.system != cfg.systems.baseline) others.insert(i.system);
  }
  order.insert(order.end(), others.begin(), others.end());
  std::erase_if(order, [&](const std::string& s) {
    return std::none_of(ideas.begin(), ideas.end(), [&](const Idea& i) { return i.system == s; });
  });
  return order;
}

std::vector<HindsightScore> plain_scores(const std::vector<ScoreRecord>& records) {
  std::vector<HindsightScore> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.score);
  return out;
}

std::vector<JudgeScores> load_judge_if_present(const RunConfig& cfg) {
  const auto path = cfg.paths.resolve(cfg.paths.judge);
  if (!std::filesystem::exists(path)) return {};
  return read_judge_scores(path);
}

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "'\\''";
    else out += c;
  }
  return out + "'";
}

}  // namespace

Json run_metadata(const RunConfig& cfg) {
  Json j;
  j["tool_version"] = tool_version();
  j["config_hash"] = config_hash(cfg);
  j["config"] = to_json(cfg);
  j["median_pooling"] = "pooled across systems";
  j["theta_comparison"] = "inclusive (similarity >= theta)";
  j["separator"] = std::string(kSeparator);
  j["simd"] = std::string(kernels::name(kernels::active_isa()));
  return j;
}

IngestSummary run_ingest(const RunConfig& cfg, std::shared_ptr<HttpTransport> transport,
                         const std::string& ingested_at) {
  QueryPlan plan;
  plan.from = cfg.cutoff;
  plan.to = cfg.cutoff.add_months(cfg.window_delta_months);
  for (const auto& topic : cfg.topics) plan.queries.push_back({topic, topic});

  IngestOptions options;
  options.endpoint = cfg.api.endpoint;
  options.cache_dir = cfg.paths.resolve(cfg.paths.cache_dir);
  options.max_retries = cfg.api.max_retries;
  options.initial_backoff = std::chrono::milliseconds(cfg.api.initial_backoff_ms);
  options.concurrency = cfg.api.concurrency;
  options.max_pages_per_query = cfg.api.max_pages_per_query;
  if (const char* key = std::getenv(cfg.api.api_key_env.c_str()); key && *key) options.api_key = key;

  auto result = ingest_papers(plan, cfg.cutoff, options, std::move(transport));
  IngestSummary summary;
  summary.raw = result.papers.size();
  const auto pool = dedup(result.papers);
  summary.unique = pool.size();
  summary.report = result.report;
  write_papers(cfg.paths.resolve(cfg.paths.corpus), pool, ingested_at);

  Json report{{"raw_records", summary.raw},
              {"unique_papers", summary.unique},
              {"malformed_records", summary.report.malformed_records},
              {"cache_hits", summary.report.cache_hits},
              {"network_requests", summary.report.network_requests},
              {"notes", summary.report.notes}};
  write_json(StageFiles::of(cfg).ingest_report, stage_document(cfg, "hindsight.ingest_report", report));
  return summary;
}

ValidationReport run_validate(const RunConfig& cfg) {
  const auto pool = load_corpus(cfg);
  const auto ideas = load_ideas(cfg);
  auto report = validate_time_split(cfg.time_split(), pool, ideas);
  Json violations = Json::array();
  for (const auto& v : report.violations) {
    violations.push_back({{"kind", std::string(to_string(v.kind))}, {"subject", v.subject}, {"message", v.message}});
  }
  write_json(StageFiles::of(cfg).validation,
             stage_document(cfg, "hindsight.validation",
                            {{"leakage_safe", report.leakage_safe()}, {"violations", std::move(violations)}}));
  return report;
}

void run_compose(const RunConfig& cfg) {
  const auto pool = load_corpus(cfg);
  const auto ideas = load_ideas(cfg);
  const auto files = StageFiles::of(cfg);
  JsonlWriter papers(files.paper_texts);
  papers.write(make_header("hindsight.texts", 1));
  for (const auto& p : pool) {
    const auto composed = compose_paper_text(p);
    papers.write({{"id", p.paper_id}, {"text", composed.text}, {"degraded", composed.degraded}});
  }
  papers.close();
  JsonlWriter out(files.idea_texts);
  out.write(make_header("hindsight.texts", 1));
  for (const auto& i : ideas) out.write({{"id", i.idea_id}, {"text", compose_idea_text(i)}});
  out.close();
}

void run_embed(const RunConfig& cfg) {
  run_compose(cfg);
  const auto files = StageFiles::of(cfg);
  const std::pair<std::filesystem::path, std::filesystem::path> jobs[] = {
      {files.paper_texts, cfg.paths.resolve(cfg.paths.paper_vectors)},
      {files.idea_texts, cfg.paths.resolve(cfg.paths.idea_vectors)}};
  for (const auto& [input, output] : jobs) {
    const std::string command = cfg.embedder_command + " encode --input " + shell_quote(input.string()) +
                                " --output " + shell_quote(output.string()) + " --batch-size " +
                                std::to_string(cfg.embed_batch_size);
    const int status = std::system(command.c_str());
    if (status != 0) {
      throw ExternalServiceError("encoder command failed (status " + std::to_string(status) + "): " + command);
    }
    load_vectors(output);  // format check
  }
}

void run_match(const RunConfig& cfg) {
  const auto pool = load_corpus(cfg);
  const auto ideas = load_ideas(cfg);
  const auto paper_path = cfg.paths.resolve(cfg.paths.paper_vectors);
  const auto idea_path = cfg.paths.resolve(cfg.paths.idea_vectors);
  require(paper_path, "embed (or fixture)");
  require(idea_path, "embed (or fixture)");
  auto papers = load_vectors(paper_path);
  auto idea_vecs = load_vectors(idea_path);

  const auto paper_align = align(papers.matrix, pool, [](const Paper& p) { return p.paper_id; });
  const auto idea_align = align(idea_vecs.matrix, ideas, [](const Idea& i) { return i.idea_id; });
  const auto files = StageFiles::of(cfg);
  write_json(files.alignment,
             stage_document(cfg, "hindsight.alignment",
                            {{"papers_paired", paper_align.pairs.size()},
                             {"paper_rows_without_record", paper_align.orphan_rows},
                             {"papers_without_vector", paper_align.orphan_records},
                             {"ideas_paired", idea_align.pairs.size()},
                             {"idea_rows_without_record", idea_align.orphan_rows},
                             {"ideas_without_vector", idea_align.orphan_records},
                             {"renormalized_rows", papers.report.renormalized.size() +
                                                       idea_vecs.report.renormalized.size()}}));
  if (!idea_align.orphan_records.empty()) {
    throw FormatError(std::to_string(idea_align.orphan_records.size()) + " ideas have no vector (first: " +
                      idea_align.orphan_records.front() + "); see " + files.alignment.string());
  }

  // Index only rows that belong to pool papers, in pool order.
  std::vector<std::string> ids;
  std::vector<float> values;
  for (const auto& pair : paper_align.pairs) {
    ids.push_back(pool[pair.record].paper_id);
    auto row = papers.matrix.row(pair.row);
    values.insert(values.end(), row.begin(), row.end());
  }
  if (ids.empty()) throw IndexError("no pool paper has a vector; cannot build an index");
  FlatIndex index(EmbeddingMatrix(papers.matrix.dim(), std::move(ids), std::move(values)));

  std::vector<std::string> qids;
  std::vector<float> qvalues;
  for (const auto& pair : idea_align.pairs) {
    qids.push_back(ideas[pair.record].idea_id);
    auto row = idea_vecs.matrix.row(pair.row);
    qvalues.insert(qvalues.end(), row.begin(), row.end());
  }
  std::vector<Ranking> rankings;
  if (!qids.empty()) {
    rankings = index.top_k_all(EmbeddingMatrix(idea_vecs.matrix.dim(), std::move(qids), std::move(qvalues)), cfg.k);
  }
  std::vector<MatchSet> sets;
  sets.reserve(rankings.size());
  for (const auto& r : rankings) sets.push_back(filter_matches(r, cfg.theta));

  auto header = stage_header(cfg);
  header["k"] = cfg.k;
  header["theta"] = cfg.theta;
  write_rankings(files.rankings, rankings, header);
  write_match_sets(files.matches, sets, header);
}

void run_score(const RunConfig& cfg) {
  const auto files = StageFiles::of(cfg);
  require(files.matches, "match");
  const auto pool = load_corpus(cfg);
  const auto sets = read_match_sets(files.matches);
  const auto table = ImpactTable::build(pool, cfg.venues);
  std::vector<ScoreRecord> scores;
  scores.reserve(sets.size());
  for (const auto& set : sets) scores.push_back({hindsight_score(set, table), set.theta_used, set.k_used});
  write_impact_table(files.impact, table, stage_header(cfg));
  write_scores(files.scores, scores, stage_header(cfg));
}

void run_compare(const RunConfig& cfg) {
  const auto files = StageFiles::of(cfg);
  require(files.scores, "score");
  const auto ideas = load_ideas(cfg);
  const auto scores = plain_scores(read_scores(files.scores));
  const auto judge = load_judge_if_present(cfg);
  const auto system_of = systems_of(ideas);
  Json body;
  if (scores.empty()) {
    body = {{"comparison", nullptr}, {"correlations", nullptr}};
  } else {
    body["comparison"] = to_json(compare_systems(scores, judge, system_of, cfg.systems));
    body["correlations"] = judge.empty() ? Json(nullptr)
                                   : to_json(correlation_matrix(scores, judge, system_of, system_order(cfg, ideas),
                                                                /*strict=*/false));
  }
  body["judge_scores"] = judge.empty() ? "absent" : "present";
  write_json(files.comparison, stage_document(cfg, "hindsight.comparison", body));
}

void run_sweep(const RunConfig& cfg) {
  const auto files = StageFiles::of(cfg);
  require(files.rankings, "match");
  require(files.impact, "score");
  const auto ideas = load_ideas(cfg);
  const auto rankings = read_rankings(files.rankings);
  const auto impact = read_impact_table(files.impact);
  const auto sweep = threshold_sweep(rankings, systems_of(ideas), impact, cfg.theta_grid, cfg.systems);
  write_json(files.sweep, stage_document(cfg, "hindsight.sweep", to_json(sweep, cfg.systems)));
}

void run_quadrants(const RunConfig& cfg) {
  const auto files = StageFiles::of(cfg);
  require(files.scores, "score");
  const auto judge_path = cfg.paths.resolve(cfg.paths.judge);
  require(judge_path, "fixture (or supply judge scores)");
  const auto ideas = load_ideas(cfg);
  const auto scores = read_scores(files.scores);
  const auto judge = read_judge_scores(judge_path);
  std::map<std::string, double> h, j;
  for (const auto& s : scores) h[s.score.idea_id] = s.score.score;
  for (const auto& s : judge) j[s.idea_id] = s.overall;
  const auto result = classify_quadrants(h, j);
  write_json(files.quadrants, stage_document(cfg, "hindsight.quadrants",
                                             to_json(result, systems_of(ideas), system_order(cfg, ideas))));
}

ReportInputs collect_report_inputs(const RunConfig& cfg, const std::string& generated_at) {
  const auto files = StageFiles::of(cfg);
  require(files.comparison, "compare");
  require(files.sweep, "sweep");
  require(files.quadrants, "quadrants");
  require(files.scores, "score");
  const auto ideas = load_ideas(cfg);
  const auto scores = read_scores(files.scores);
  const auto judge = load_judge_if_present(cfg);
  const auto comparison = read_json(files.comparison).at("body");
  const auto quadrants = read_json(files.quadrants).at("body");

  ReportInputs in;
  in.metadata = run_metadata(cfg);
  in.metadata["generated_at"] = generated_at;
  in.comparison = comparison.at("comparison");
  in.correlations = comparison.at("correlations");
  in.quadrants = quadrants.value("labels", Json::object()).empty() ? Json(nullptr) : quadrants;
  in.sweep = read_json(files.sweep).at("body");

  std::map<std::string, const JudgeScores*> judge_by_id;
  for (const auto& j : judge) judge_by_id[j.idea_id] = &j;
  const auto system_of = systems_of(ideas);
  const auto labels = quadrants.value("labels", Json::object());
  for (const auto& s : scores) {
    IdeaRow row;
    row.idea_id = s.score.idea_id;
    row.system = system_of.count(row.idea_id) ? system_of.at(row.idea_id) : "";
    row.hindsight = s.score.score;
    row.match_count = s.score.match_count;
    if (auto it = judge_by_id.find(row.idea_id); it != judge_by_id.end()) row.judge_overall = it->second->overall;
    if (labels.contains(row.idea_id)) row.quadrant = labels.at(row.idea_id).get<std::string>();
    in.ideas.push_back(std::move(row));
  }
  return in;
}

void run_report(const RunConfig& cfg, const std::string& generated_at) {
  emit_report(collect_report_inputs(cfg, generated_at), StageFiles::of(cfg).report_dir);
}

void run_fixture(const RunConfig& cfg) {
  auto spec = FixtureSpec::defaults(cfg.fixture_seed);
  spec.systems = {cfg.systems.treatment, cfg.systems.baseline};
  spec.profiles[cfg.systems.treatment] = FixtureSpec::defaults().profiles.at("RA");
  spec.profiles[cfg.systems.baseline] = FixtureSpec::defaults().profiles.at("BL");
  spec.theta = cfg.theta;
  spec.k = cfg.k;
  spec.cutoff = cfg.cutoff;
  spec.window_months = cfg.window_delta_months;
  spec.weight_citations = cfg.venues.weight_citations;
  spec.weight_venue = cfg.venues.weight_venue;
  const auto fixture = generate_fixture(spec);
  FixturePaths paths{cfg.paths.resolve(cfg.paths.corpus),        cfg.paths.resolve(cfg.paths.ideas),
                     cfg.paths.resolve(cfg.paths.paper_vectors), cfg.paths.resolve(cfg.paths.idea_vectors),
                     cfg.paths.resolve(cfg.paths.judge),         StageFiles::of(cfg).oracle};
  write_fixture(fixture, paths);
}

}  // namespace hindsight
