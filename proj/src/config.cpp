#include "hindsight/config.hpp"

#include <fstream>
#include <set>

#include "hindsight/error.hpp"
#include "hindsight/hash.hpp"

namespace hindsight {

std::filesystem::path RunPaths::resolve(const std::filesystem::path& p) const {
  return p.is_absolute() ? p : work_dir / p;
}

TimeSplitConfig RunConfig::time_split() const {
  return {cutoff, window_delta_months, model_knowledge_cutoff, min_margin_months};
}

void RunConfig::validate() const {
  if (!(theta > -1.0 && theta <= 1.0)) throw ConfigError("theta must lie in (-1, 1], got " + std::to_string(theta));
  if (k < 1) throw ConfigError("k must be at least 1");
  if (window_delta_months <= 0) throw ConfigError("window_delta_months must be positive");
  venues.validate();
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > theta_grid[i - 1])) throw ConfigError("theta_grid must be strictly increasing");
  }
  if (systems.treatment == systems.baseline) throw ConfigError("treatment and baseline systems must differ");
  const std::filesystem::path all[] = {paths.corpus, paths.ideas, paths.paper_vectors, paths.idea_vectors,
                                       paths.judge, paths.report_dir, paths.cache_dir};
  std::set<std::filesystem::path> seen;
  for (const auto& p : all) {
    const auto resolved = paths.resolve(p).lexically_normal();
    if (!seen.insert(resolved).second) throw ConfigError("configured paths must be distinct: " + resolved.string());
  }
}

RunConfig config_from_json(const Json& j) {
  RunConfig cfg;
  try {
    if (j.contains("cutoff")) cfg.cutoff = Date::parse(j.at("cutoff").get<std::string>());
    cfg.window_delta_months = j.value("window_delta_months", cfg.window_delta_months);
    if (j.contains("model_knowledge_cutoff")) {
      cfg.model_knowledge_cutoff = Date::parse(j.at("model_knowledge_cutoff").get<std::string>());
    }
    cfg.min_margin_months = j.value("min_margin_months", cfg.min_margin_months);
    cfg.theta = j.value("theta", cfg.theta);
    cfg.k = j.value("k", cfg.k);
    if (j.contains("theta_grid")) cfg.theta_grid = j.at("theta_grid").get<std::vector<double>>();
    if (j.contains("weights")) {
      cfg.venues.weight_citations = j.at("weights").at(0).get<double>();
      cfg.venues.weight_venue = j.at("weights").at(1).get<double>();
    }
    if (j.contains("top_venues")) {
      cfg.venues.top_venues.clear();
      for (const auto& v : j.at("top_venues")) cfg.venues.top_venues.insert(v.get<std::string>());
    }
    if (j.contains("venue_aliases")) {
      for (const auto& [alias, canonical] : j.at("venue_aliases").items()) {
        cfg.venues.aliases[normalize_venue(alias)] = canonical.get<std::string>();
      }
    }
    if (j.contains("topics")) cfg.topics = j.at("topics").get<std::vector<std::string>>();
    if (j.contains("systems")) {
      cfg.systems.treatment = j.at("systems").value("treatment", cfg.systems.treatment);
      cfg.systems.baseline = j.at("systems").value("baseline", cfg.systems.baseline);
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      auto set = [&](const char* key, std::filesystem::path& target) {
        if (p.contains(key)) target = p.at(key).get<std::string>();
      };
      set("work_dir", cfg.paths.work_dir);
      set("corpus", cfg.paths.corpus);
      set("ideas", cfg.paths.ideas);
      set("paper_vectors", cfg.paths.paper_vectors);
      set("idea_vectors", cfg.paths.idea_vectors);
      set("judge", cfg.paths.judge);
      set("report_dir", cfg.paths.report_dir);
      set("cache_dir", cfg.paths.cache_dir);
    }
    if (j.contains("api")) {
      const auto& a = j.at("api");
      cfg.api.endpoint = a.value("endpoint", cfg.api.endpoint);
      cfg.api.api_key_env = a.value("api_key_env", cfg.api.api_key_env);
      cfg.api.max_retries = a.value("max_retries", cfg.api.max_retries);
      cfg.api.initial_backoff_ms = a.value("initial_backoff_ms", cfg.api.initial_backoff_ms);
      cfg.api.concurrency = a.value("concurrency", cfg.api.concurrency);
      cfg.api.max_pages_per_query = a.value("max_pages_per_query", cfg.api.max_pages_per_query);
    }
    cfg.embedder_command = j.value("embedder_command", cfg.embedder_command);
    cfg.embed_batch_size = j.value("embed_batch_size", cfg.embed_batch_size);
    cfg.fixture_seed = j.value("fixture_seed", cfg.fixture_seed);
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  } catch (const FormatError& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

Json to_json(const RunConfig& cfg) {
  Json j;
  j["cutoff"] = cfg.cutoff.str();
  j["window_delta_months"] = cfg.window_delta_months;
  j["model_knowledge_cutoff"] = cfg.model_knowledge_cutoff.str();
  j["min_margin_months"] = cfg.min_margin_months;
  j["theta"] = cfg.theta;
  j["k"] = cfg.k;
  j["theta_grid"] = cfg.theta_grid;
  j["weights"] = Json::array({cfg.venues.weight_citations, cfg.venues.weight_venue});
  j["top_venues"] = cfg.venues.top_venues;
  Json aliases = Json::object();
  for (const auto& [alias, canonical] : cfg.venues.aliases) aliases[alias] = canonical;
  j["venue_aliases"] = std::move(aliases);
  j["topics"] = cfg.topics;
  j["systems"] = {{"treatment", cfg.systems.treatment}, {"baseline", cfg.systems.baseline}};
  j["paths"] = {{"work_dir", cfg.paths.work_dir.string()},   {"corpus", cfg.paths.corpus.string()},
                {"ideas", cfg.paths.ideas.string()},         {"paper_vectors", cfg.paths.paper_vectors.string()},
                {"idea_vectors", cfg.paths.idea_vectors.string()}, {"judge", cfg.paths.judge.string()},
                {"report_dir", cfg.paths.report_dir.string()}, {"cache_dir", cfg.paths.cache_dir.string()}};
  j["api"] = {{"endpoint", cfg.api.endpoint},
              {"api_key_env", cfg.api.api_key_env},
              {"max_retries", cfg.api.max_retries},
              {"initial_backoff_ms", cfg.api.initial_backoff_ms},
              {"concurrency", cfg.api.concurrency},
              {"max_pages_per_query", cfg.api.max_pages_per_query}};
  j["embedder_command"] = cfg.embedder_command;
  j["embed_batch_size"] = cfg.embed_batch_size;
  j["fixture_seed"] = cfg.fixture_seed;
  j["separator"] = std::string(kSeparator);
  return j;
}

std::string config_hash(const RunConfig& cfg) {
  Json j;
  j["theta"] = cfg.theta;
  j["k"] = cfg.k;
  j["weights"] = Json::array({cfg.venues.weight_citations, cfg.venues.weight_venue});
  j["top_venues"] = cfg.venues.top_venues;  // std::set, already ordered
  j["cutoff"] = cfg.cutoff.str();
  j["window_delta_months"] = cfg.window_delta_months;
  j["separator"] = std::string(kSeparator);
  return sha256_hex(j.dump());
}

}  // namespace hindsight
