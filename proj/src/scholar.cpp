#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "hindsight/scholar.hpp"


#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "hindsight/error.hpp"
#include "hindsight/hash.hpp"

namespace hindsight {

namespace {

std::string percent_encode(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~' || c == ':' || c == ',') {
      out.push_back(static_cast<char>(c));
    } else {
      char buf[4];
      std::snprintf(buf, sizeof buf, "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

}  // namespace

HttplibTransport::HttplibTransport(std::string endpoint, std::chrono::seconds timeout)
    : endpoint_(std::move(endpoint)), timeout_(timeout) {}

HttpResponse HttplibTransport::get(const std::string& path_and_query, const HttpHeaders& headers) {
  httplib::Client client(endpoint_);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  httplib::Headers h(headers.begin(), headers.end());
  auto res = client.Get(path_and_query, h);
  if (!res) return {-1, {}, httplib::to_string(res.error())};
  return {res->status, res->body, {}};
}

std::string canonical_query(const std::string& path, const std::map<std::string, std::string>& params) {
  std::string out = path;
  char sep = '?';
  for (const auto& [key, value] : params) {
    out += sep;
    out += percent_encode(key);
    out += '=';
    out += percent_encode(value);
    sep = '&';
  }
  return out;
}

ResponseCache::ResponseCache(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::filesystem::path ResponseCache::path_for(const std::string& key) const {
  return dir_ / (sha256_hex(key) + ".json");
}

std::optional<std::string> ResponseCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  std::ifstream in(path_for(key), std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    auto entry = Json::parse(ss.str());
    if (entry.value("request", "") != key) return std::nullopt;
    return entry.at("body").get<std::string>();
  } catch (const Json::exception&) {
    return std::nullopt;
  }
}

void ResponseCache::store(const std::string& key, const std::string& body) {
  std::lock_guard lock(mutex_);
  auto target = path_for(key);
  if (std::filesystem::exists(target)) return;
  Json entry;
  entry["request"] = key;
  entry["body"] = body;
  auto tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << entry.dump();
    if (!out) throw IoError("cannot write cache entry " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::optional<Paper> paper_from_search_record(const Json& record, const std::string& topic) {
  if (!record.is_object()) return std::nullopt;
  auto str = [&](const char* key) -> std::optional<std::string> {
    auto it = record.find(key);
    if (it == record.end() || !it->is_string()) return std::nullopt;
    return it->get<std::string>();
  };
  auto id = str("paperId");
  auto title = str("title");
  auto date = str("publicationDate");
  auto cites = record.find("citationCount");
  if (!id || id->empty() || !title || title->empty() || !date) return std::nullopt;
  if (cites == record.end() || !cites->is_number_integer() || cites->get<std::int64_t>() < 0) {
    return std::nullopt;
  }
  Paper p;
  try {
    p.published = Date::parse(*date);
  } catch (const FormatError&) {
    return std::nullopt;
  }
  p.paper_id = *id;
  p.title = *title;
  p.abstract = str("abstract").value_or("");
  p.citation_count = cites->get<std::uint64_t>();
  p.venue = str("venue").value_or("");
  p.topics = {topic};
  p.degraded = p.abstract.empty();
  return p;
}

namespace {

struct QueryOutcome {
  std::vector<Paper> papers;
  DegradationReport report;
};

class QueryRunner {
 public:
  QueryRunner(const IngestOptions& options, std::shared_ptr<HttpTransport> transport, ResponseCache& cache)
      : options_(options), transport_(std::move(transport)), cache_(cache) {}

  QueryOutcome run(const TopicQuery& query, const QueryPlan& plan) {
    QueryOutcome outcome;
    std::map<std::string, std::string> params{
        {"query", query.query},
        {"fields", "paperId,title,abstract,citationCount,venue,publicationDate"},
        {"publicationDateOrYear", plan.from.str() + ":" + plan.to.str()},
    };
    for (int page = 0; page < options_.max_pages_per_query; ++page) {
      const auto key = canonical_query(options_.search_path, params);
      auto body = cache_.find(key);
      if (body) {
        ++outcome.report.cache_hits;
      } else {
        body = fetch(key, query);
        ++outcome.report.network_requests;
        cache_.store(key, *body);
      }
      Json response;
      try {
        response = Json::parse(*body);
      } catch (const Json::parse_error& e) {
        throw IngestError("query '" + query.topic + "': unparseable response: " + e.what());
      }
      if (auto data = response.find("data"); data != response.end() && data->is_array()) {
        for (const auto& record : *data) {
          if (auto paper = paper_from_search_record(record, query.topic)) {
            outcome.papers.push_back(std::move(*paper));
          } else {
            ++outcome.report.malformed_records;
          }
        }
      }
      auto token = response.find("token");
      if (token == response.end() || !token->is_string() || token->get<std::string>().empty()) break;
      params["token"] = token->get<std::string>();
    }
    return outcome;
  }

 private:
  std::string fetch(const std::string& target, const TopicQuery& query) {
    if (!transport_) {
      throw IngestError("query '" + query.topic + "': not cached and no network transport available");
    }
    HttpHeaders headers;
    if (options_.api_key) headers.emplace("x-api-key", *options_.api_key);
    std::string last_error;
    auto backoff = options_.initial_backoff;
    for (int attempt = 0; attempt <= options_.max_retries; ++attempt) {
      if (attempt > 0) {
        if (options_.sleep) {
          options_.sleep(backoff);
        } else {
          std::this_thread::sleep_for(backoff);
        }
        backoff *= 2;
      }
      auto res = transport_->get(target, headers);
      if (res.status == 200) return res.body;
      last_error = res.status < 0 ? res.error : "HTTP " + std::to_string(res.status);
      const bool retryable = res.status < 0 || res.status == 429 || res.status >= 500;
      if (!retryable) break;
    }
    throw IngestError("query '" + query.topic + "' failed: " + last_error);
  }

  const IngestOptions& options_;
  std::shared_ptr<HttpTransport> transport_;
  ResponseCache& cache_;
};

}  // namespace

IngestResult ingest_papers(const QueryPlan& plan, const Date& cutoff, const IngestOptions& options,
                           std::shared_ptr<HttpTransport> transport) {
  if (plan.from != cutoff) {
    throw ConfigError("query date range starts " + plan.from.str() + " but cutoff T is " + cutoff.str());
  }
  IngestResult result;
  if (plan.queries.empty()) return result;

  ResponseCache cache(options.cache_dir);
  QueryRunner runner(options, std::move(transport), cache);
  const std::size_t limit = static_cast<std::size_t>(std::max(1, options.concurrency));

  std::vector<QueryOutcome> outcomes(plan.queries.size());
  for (std::size_t start = 0; start < plan.queries.size(); start += limit) {
    const std::size_t end = std::min(plan.queries.size(), start + limit);
    std::vector<std::future<QueryOutcome>> batch;
    for (std::size_t i = start; i < end; ++i) {
      batch.push_back(std::async(std::launch::async,
                                 [&runner, &plan, i] { return runner.run(plan.queries[i], plan); }));
    }
    for (std::size_t i = start; i < end; ++i) outcomes[i] = batch[i - start].get();
  }

  for (auto& outcome : outcomes) {
    for (auto& paper : outcome.papers) result.papers.push_back(std::move(paper));
    result.report.malformed_records += outcome.report.malformed_records;
    result.report.cache_hits += outcome.report.cache_hits;
    result.report.network_requests += outcome.report.network_requests;
  }
  if (result.report.malformed_records > 0) {
    result.report.notes.push_back(std::to_string(result.report.malformed_records) +
                                  " malformed records skipped");
  }
  return result;
}

}  // namespace hindsight
