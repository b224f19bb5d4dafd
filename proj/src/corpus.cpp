#include "hindsight/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hindsight/corpus_json.hpp"
#include "hindsight/error.hpp"

namespace hindsight {

std::string normalize_title(std::string_view title) {
  std::string out;
  out.reserve(title.size());
  bool pending_space = false;
  for (unsigned char c : title) {
    if (c < 0x80 && std::isspace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (c < 0x80 && std::ispunct(c)) continue;
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c < 0x80 ? static_cast<char>(std::tolower(c)) : static_cast<char>(c));
  }
  return out;
}

namespace {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<Paper> dedup(const std::vector<Paper>& papers) {
  DisjointSets sets(papers.size());
  std::unordered_map<std::string, std::size_t> by_id;
  std::unordered_map<std::string, std::size_t> by_title;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    auto [id_it, id_new] = by_id.emplace(papers[i].paper_id, i);
    if (!id_new) sets.unite(id_it->second, i);
    auto key = normalize_title(papers[i].title);
    if (key.empty()) continue;
    auto [t_it, t_new] = by_title.emplace(std::move(key), i);
    if (!t_new) sets.unite(t_it->second, i);
  }

  // Survivor per group: highest citation count, earliest index on ties.
  std::unordered_map<std::size_t, std::size_t> survivor;
  for (std::size_t i = 0; i < papers.size(); ++i) {
    auto [it, inserted] = survivor.emplace(sets.find(i), i);
    if (!inserted && papers[i].citation_count > papers[it->second].citation_count) it->second = i;
  }
  std::vector<std::size_t> keep;
  keep.reserve(survivor.size());
  for (const auto& [root, index] : survivor) keep.push_back(index);
  std::sort(keep.begin(), keep.end());

  std::vector<Paper> out;
  out.reserve(keep.size());
  for (auto i : keep) out.push_back(papers[i]);
  return out;
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::PoolPaperBeforeCutoff: return "pool_paper_before_cutoff";
    case ViolationKind::IdeaProvenanceLeak: return "idea_provenance_leak";
    case ViolationKind::MarginShortfall: return "margin_shortfall";
    case ViolationKind::EmptyWindow: return "empty_window";
  }
  return "unknown";
}

ValidationReport validate_time_split(const TimeSplitConfig& config, const std::vector<Paper>& pool,
                                     const std::vector<Idea>& ideas) {
  ValidationReport report;
  const int margin = months_between(config.cutoff, config.model_knowledge_cutoff);
  if (margin < config.min_margin_months) {
    report.violations.push_back(
        {ViolationKind::MarginShortfall, "config",
         "knowledge cutoff " + config.model_knowledge_cutoff.str() + " is " + std::to_string(margin) +
             " months after T=" + config.cutoff.str() + ", need " +
             std::to_string(config.min_margin_months)});
  }
  if (config.window_delta_months <= 0) {
    report.violations.push_back({ViolationKind::EmptyWindow, "config",
                                 "window_delta_months must be positive, got " +
                                     std::to_string(config.window_delta_months)});
  }
  for (const auto& paper : pool) {
    if (paper.published < config.cutoff) {
      report.violations.push_back({ViolationKind::PoolPaperBeforeCutoff, paper.paper_id,
                                   "published " + paper.published.str() + " before T=" +
                                       config.cutoff.str()});
    }
  }
  for (const auto& idea : ideas) {
    for (const auto& date : idea.provenance_dates) {
      if (date >= config.cutoff) {
        report.violations.push_back({ViolationKind::IdeaProvenanceLeak, idea.idea_id,
                                     "read literature dated " + date.str() + ", not before T=" +
                                         config.cutoff.str()});
      }
    }
  }
  return report;
}

ComposedText compose_paper_text(const Paper& paper) {
  if (paper.title.empty()) throw CompositionError("paper " + paper.paper_id + " has an empty title");
  ComposedText out;
  out.text.reserve(paper.title.size() + kSeparator.size() + paper.abstract.size());
  out.text += paper.title;
  if (paper.abstract.empty()) {
    // Keep the separator visible but drop its trailing space.
    out.text += kSeparator.substr(0, kSeparator.size() - 1);
    out.degraded = true;
  } else {
    out.text += kSeparator;
    out.text += paper.abstract;
  }
  return out;
}

std::string compose_idea_text(const Idea& idea) {
  if (idea.problem.empty() || idea.method.empty()) {
    throw CompositionError("idea " + idea.idea_id + " needs both a problem and a method");
  }
  std::string text;
  text.reserve(idea.problem.size() + kSeparator.size() + idea.method.size());
  text += idea.problem;
  text += kSeparator;
  text += idea.method;
  return text;
}

Json to_json(const Paper& paper) {
  Json j;
  j["paper_id"] = paper.paper_id;
  j["title"] = paper.title;
  j["abstract"] = paper.abstract;
  j["citation_count"] = paper.citation_count;
  j["venue"] = paper.venue;
  j["published"] = paper.published.str();
  j["topics"] = paper.topics;
  j["degraded"] = paper.degraded;
  return j;
}

namespace {

std::string require_string(const Json& record, const char* key, const char* kind) {
  auto it = record.find(key);
  if (it == record.end() || !it->is_string()) {
    throw FormatError(std::string(kind) + " record missing string field '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

Paper paper_from_json(const Json& record) {
  Paper p;
  p.paper_id = require_string(record, "paper_id", "paper");
  if (p.paper_id.empty()) throw FormatError("paper record has an empty paper_id");
  p.title = require_string(record, "title", "paper");
  if (p.title.empty()) throw FormatError("paper " + p.paper_id + " has an empty title");
  p.abstract = record.value("abstract", "");
  auto cites = record.find("citation_count");
  if (cites == record.end() || !cites->is_number_integer() || cites->get<std::int64_t>() < 0) {
    throw FormatError("paper " + p.paper_id + " needs a non-negative integer citation_count");
  }
  p.citation_count = cites->get<std::uint64_t>();
  p.venue = record.value("venue", "");
  p.published = Date::parse(require_string(record, "published", "paper"));
  if (auto t = record.find("topics"); t != record.end() && t->is_array()) {
    std::set<std::string> unique;
    for (const auto& topic : *t) unique.insert(topic.get<std::string>());
    p.topics.assign(unique.begin(), unique.end());
  }
  p.degraded = record.value("degraded", false) || p.abstract.empty();
  return p;
}

Json to_json(const Idea& idea) {
  Json j;
  j["idea_id"] = idea.idea_id;
  j["system"] = idea.system;
  j["topic"] = idea.topic;
  j["problem"] = idea.problem;
  j["method"] = idea.method;
  j["seed_paper_id"] = idea.seed_paper_id ? Json(*idea.seed_paper_id) : Json(nullptr);
  Json dates = Json::array();
  for (const auto& d : idea.provenance_dates) dates.push_back(d.str());
  j["provenance_dates"] = std::move(dates);
  return j;
}

Idea idea_from_json(const Json& record) {
  Idea idea;
  idea.idea_id = require_string(record, "idea_id", "idea");
  if (idea.idea_id.empty()) throw FormatError("idea record has an empty idea_id");
  idea.system = require_string(record, "system", "idea");
  idea.topic = record.value("topic", "");
  idea.problem = require_string(record, "problem", "idea");
  idea.method = require_string(record, "method", "idea");
  if (idea.problem.empty() || idea.method.empty()) {
    throw FormatError("idea " + idea.idea_id + " needs a non-empty problem and method");
  }
  if (auto s = record.find("seed_paper_id"); s != record.end() && s->is_string()) {
    idea.seed_paper_id = s->get<std::string>();
  }
  if (auto d = record.find("provenance_dates"); d != record.end() && d->is_array()) {
    for (const auto& date : *d) idea.provenance_dates.push_back(Date::parse(date.get<std::string>()));
  }
  return idea;
}

void write_papers(const std::filesystem::path& path, const std::vector<Paper>& papers,
                  const std::string& ingested_at) {
  JsonlWriter out(path);
  auto header = make_header("hindsight.papers", kCorpusSchemaVersion);
  header["ingested_at"] = ingested_at;
  header["separator"] = std::string(kSeparator);
  out.write(header);
  for (const auto& p : papers) out.write(to_json(p));
  out.close();
}

std::vector<Paper> read_papers(const std::filesystem::path& path) {
  auto doc = read_jsonl(path, "hindsight.papers");
  std::vector<Paper> papers;
  papers.reserve(doc.records.size());
  std::set<std::string> seen;
  for (const auto& record : doc.records) {
    papers.push_back(paper_from_json(record));
    if (!seen.insert(papers.back().paper_id).second) {
      throw FormatError(path.string() + ": duplicate paper_id " + papers.back().paper_id);
    }
  }
  return papers;
}

void write_ideas(const std::filesystem::path& path, const std::vector<Idea>& ideas) {
  JsonlWriter out(path);
  auto header = make_header("hindsight.ideas", kCorpusSchemaVersion);
  header["separator"] = std::string(kSeparator);
  out.write(header);
  for (const auto& idea : ideas) out.write(to_json(idea));
  out.close();
}

std::vector<Idea> read_ideas(const std::filesystem::path& path) {
  auto doc = read_jsonl(path, "hindsight.ideas");
  std::vector<Idea> ideas;
  ideas.reserve(doc.records.size());
  std::set<std::string> seen;
  for (const auto& record : doc.records) {
    ideas.push_back(idea_from_json(record));
    if (!seen.insert(ideas.back().idea_id).second) {
      throw FormatError(path.string() + ": duplicate idea_id " + ideas.back().idea_id);
    }
  }
  return ideas;
}

}  // namespace hindsight
