// hindsight: stage-by-stage CLI for the retrospective idea evaluation pipeline.
//
//   hindsight fixture  --work-dir run --seed 3
//   hindsight match    --work-dir run
//   hindsight score    --work-dir run --theta 0.95
//
// Exit codes: 0 ok, 1 validation or configuration failure,
// 2 missing inputs, 3 external-service failure.

#include <chrono>
#include <ctime>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "hindsight/config.hpp"
#include "hindsight/error.hpp"
#include "hindsight/pipeline.hpp"

namespace {

using namespace hindsight;

struct Overrides {
  std::string config;
  std::optional<double> theta;
  std::optional<std::size_t> k;
  std::string cutoff;
  std::string report_dir;
  std::string cache_dir;
  std::string work_dir;
  std::optional<std::uint64_t> seed;
  std::string embedder;
};

RunConfig resolve_config(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : load_config(o.config);
  if (o.theta) cfg.theta = *o.theta;
  if (o.k) cfg.k = *o.k;
  if (!o.cutoff.empty()) {
    try {
      cfg.cutoff = Date::parse(o.cutoff);
    } catch (const Error& e) {
      throw ConfigError(std::string("--cutoff: ") + e.what());
    }
  }
  if (!o.work_dir.empty()) cfg.paths.work_dir = o.work_dir;
  if (!o.report_dir.empty()) cfg.paths.report_dir = o.report_dir;
  if (!o.cache_dir.empty()) cfg.paths.cache_dir = o.cache_dir;
  if (o.seed) cfg.fixture_seed = *o.seed;
  if (!o.embedder.empty()) cfg.embedder_command = o.embedder;
  cfg.validate();
  return cfg;
}

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run_stage(const std::string& stage, const RunConfig& cfg) {
  WorkDirLock lock(cfg);
  if (stage == "ingest") {
    auto s = run_ingest(cfg, std::make_shared<HttplibTransport>(cfg.api.endpoint), utc_now());
    std::cout << "ingested " << s.raw << " records, " << s.unique << " unique papers ("
              << s.report.malformed_records << " malformed, " << s.report.cache_hits << " cache hits)\n";
  } else if (stage == "validate") {
    const auto report = run_validate(cfg);
    for (const auto& v : report.violations) {
      std::cerr << to_string(v.kind) << " " << v.subject << ": " << v.message << "\n";
    }
    if (!report.leakage_safe()) {
      std::cerr << report.violations.size() << " time-split violation(s)\n";
      return 1;
    }
    std::cout << "time split is leakage-safe\n";
  } else if (stage == "compose") {
    run_compose(cfg);
  } else if (stage == "embed") {
    run_embed(cfg);
  } else if (stage == "match") {
    run_match(cfg);
  } else if (stage == "score") {
    run_score(cfg);
  } else if (stage == "compare") {
    run_compare(cfg);
  } else if (stage == "sweep") {
    run_sweep(cfg);
  } else if (stage == "quadrants") {
    run_quadrants(cfg);
  } else if (stage == "report") {
    run_report(cfg, utc_now());
    std::cout << "report written to " << StageFiles::of(cfg).report_dir.string() << "\n";
  } else if (stage == "fixture") {
    run_fixture(cfg);
    std::cout << "fixture written to " << cfg.paths.work_dir.string() << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HindSight evaluation pipeline"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  Overrides o;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "JSON config file")->check(CLI::ExistingFile);
    sub->add_option("--work-dir", o.work_dir, "Directory holding stage artifacts");
    sub->add_option("--theta", o.theta, "Similarity threshold (inclusive)");
    sub->add_option("--k", o.k, "Neighbours retrieved per idea");
    sub->add_option("--cutoff", o.cutoff, "Evaluation cutoff date (YYYY-MM-DD)");
    sub->add_option("--report-dir", o.report_dir, "Report output directory");
    sub->add_option("--cache-dir", o.cache_dir, "Ingest response cache");
    sub->add_option("--seed", o.seed, "Fixture seed");
    sub->add_option("--embedder", o.embedder, "Encoder command prefix");
  };

  const std::pair<const char*, const char*> stages[] = {
      {"ingest", "Fetch the future paper pool"},
      {"validate", "Check the time split for leakage"},
      {"compose", "Write encoder input texts"},
      {"embed", "Encode papers and ideas with the external encoder"},
      {"match", "Top-K retrieval and threshold filtering"},
      {"score", "Impact scores and per-idea HindSight scores"},
      {"compare", "System comparison and judge correlation tables"},
      {"sweep", "Threshold sensitivity sweep"},
      {"quadrants", "Agreement quadrants against judge scores"},
      {"report", "Aggregate stage outputs into the report"},
      {"fixture", "Generate a synthetic corpus with a known oracle"},
  };
  for (const auto& [name, help] : stages) add_common(app.add_subcommand(name, help));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string stage = app.get_subcommands().front()->get_name();
  try {
    return run_stage(stage, resolve_config(o));
  } catch (const MissingInputError& e) {
    std::cerr << "hindsight " << stage << ": " << e.what() << "\n";
    return 2;
  } catch (const ExternalServiceError& e) {
    std::cerr << "hindsight " << stage << ": " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "hindsight " << stage << ": " << e.what() << "\n";
    return 1;
  }
}
