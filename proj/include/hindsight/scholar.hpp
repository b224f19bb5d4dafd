#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "hindsight/corpus.hpp"
#include "hindsight/jsonl.hpp"

namespace hindsight {

struct TopicQuery {
  std::string topic;
  std::string query;
};

/// Topic queries over a publication-date range. The lower bound must equal
/// the evaluation cutoff.
struct QueryPlan {
  std::vector<TopicQuery> queries;
  Date from;
  Date to;
};

struct HttpResponse {
  int status = 0;  // negative on connection failure
  std::string body;
  std::string error;
};

using HttpHeaders = std::multimap<std::string, std::string>;

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& path_and_query, const HttpHeaders& headers) = 0;
};

/// cpp-httplib backed transport; `endpoint` is scheme://host[:port].
class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::string endpoint, std::chrono::seconds timeout = std::chrono::seconds(30));
  HttpResponse get(const std::string& path_and_query, const HttpHeaders& headers) override;

 private:
  std::string endpoint_;
  std::chrono::seconds timeout_;
};

struct IngestOptions {
  std::string endpoint = "https://api.semanticscholar.org";
  std::string search_path = "/graph/v1/paper/search/bulk";
  std::optional<std::string> api_key;
  std::filesystem::path cache_dir = ".hindsight-cache";
  int max_retries = 5;
  std::chrono::milliseconds initial_backoff{500};
  int max_pages_per_query = 50;
  int concurrency = 2;
  /// Replaceable so tests do not sleep.
  std::function<void(std::chrono::milliseconds)> sleep;
};

struct DegradationReport {
  std::size_t malformed_records = 0;
  std::size_t cache_hits = 0;
  std::size_t network_requests = 0;
  std::vector<std::string> notes;
};

struct IngestResult {
  std::vector<Paper> papers;  // before dedup
  DegradationReport report;
};

/// Percent-encodes and sorts parameters into "path?k=v&k=v". Used both as
/// the request target and as the cache key.
std::string canonical_query(const std::string& path, const std::map<std::string, std::string>& params);

/// Append-only on-disk response cache keyed by canonical query string.
class ResponseCache {
 public:
  explicit ResponseCache(std::filesystem::path dir);
  std::optional<std::string> find(const std::string& key) const;
  /// No-op when the key is already cached.
  void store(const std::string& key, const std::string& body);
  std::filesystem::path path_for(const std::string& key) const;

 private:
  std::filesystem::path dir_;
  mutable std::mutex mutex_;
};

/// Converts one search-result record into a Paper tagged with `topic`;
/// nullopt when a required field is missing or malformed.
std::optional<Paper> paper_from_search_record(const Json& record, const std::string& topic);

/// Fetches every page of every topic query, serving from the cache when
/// possible. `transport` may be null for cache-only operation. Throws
/// IngestError naming the query that failed after all retries.
IngestResult ingest_papers(const QueryPlan& plan, const Date& cutoff, const IngestOptions& options,
                           std::shared_ptr<HttpTransport> transport);

}  // namespace hindsight
