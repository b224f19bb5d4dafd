#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/analysis.hpp"
#include "hindsight/corpus.hpp"
#include "hindsight/jsonl.hpp"
#include "hindsight/scorer.hpp"

namespace hindsight {

/// Stage artifact locations. Relative paths resolve against `work_dir`.
struct RunPaths {
  std::filesystem::path work_dir = "hindsight-run";
  std::filesystem::path corpus = "papers.jsonl";
  std::filesystem::path ideas = "ideas.jsonl";
  std::filesystem::path paper_vectors = "paper_vectors.hsve";
  std::filesystem::path idea_vectors = "idea_vectors.hsve";
  std::filesystem::path judge = "judge.jsonl";
  std::filesystem::path report_dir = "report";
  std::filesystem::path cache_dir = ".hindsight-cache";

  std::filesystem::path resolve(const std::filesystem::path& p) const;
};

struct ApiSettings {
  std::string endpoint = "https://api.semanticscholar.org";
  std::string api_key_env = "HINDSIGHT_API_KEY";
  int max_retries = 5;
  int initial_backoff_ms = 500;
  int concurrency = 2;
  int max_pages_per_query = 50;
};

struct RunConfig {
  Date cutoff{2023, 6, 1};
  int window_delta_months = 30;
  Date model_knowledge_cutoff{2023, 12, 1};
  int min_margin_months = 6;
  double theta = 0.96;
  std::size_t k = 20;
  std::vector<double> theta_grid{0.93, 0.935, 0.94, 0.945, 0.95, 0.955, 0.96, 0.965};
  VenueConfig venues = VenueConfig::defaults();
  std::vector<std::string> topics{
      "Alignment & Safety", "Chain-of-Thought Reasoning", "Diffusion Models", "Efficient Inference",
      "Hallucination Mitigation", "In-Context Learning", "Instruction Tuning & RLHF", "LLM Agents",
      "Multimodal LLMs", "Retrieval-Augmented Generation"};
  SystemPair systems;
  RunPaths paths;
  ApiSettings api;
  /// Command prefix for the external encoder (`encode --input ... --output ...`).
  std::string embedder_command = "hindsight-embed";
  std::size_t embed_batch_size = 32;
  std::uint64_t fixture_seed = 1;

  TimeSplitConfig time_split() const;
  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Reads a JSON config file; absent keys keep their defaults.
RunConfig load_config(const std::filesystem::path& path);
RunConfig config_from_json(const Json& j);
Json to_json(const RunConfig& cfg);

/// SHA-256 over theta, K, weights, venue list, T, delta and the separator.
std::string config_hash(const RunConfig& cfg);

}  // namespace hindsight
