#include "hindsight/artifacts.hpp"

#include "hindsight/error.hpp"

namespace hindsight {

namespace {

Json header_with(const std::string& schema, const Json& extra) {
  auto header = make_header(schema, 1);
  for (const auto& [key, value] : extra.items()) header[key] = value;
  return header;
}

Json matches_json(const std::vector<Match>& matches) {
  Json arr = Json::array();
  for (const auto& m : matches) arr.push_back(Json::array({m.paper_id, m.similarity}));
  return arr;
}

std::vector<Match> matches_from(const Json& arr) {
  std::vector<Match> out;
  for (const auto& item : arr) out.push_back({item.at(0).get<std::string>(), item.at(1).get<double>()});
  return out;
}

template <typename Fn>
auto parse_records(const std::filesystem::path& path, const std::string& schema, Fn fn) {
  auto doc = read_jsonl(path, schema);
  std::vector<decltype(fn(std::declval<const Json&>()))> out;
  out.reserve(doc.records.size());
  try {
    for (const auto& r : doc.records) out.push_back(fn(r));
  } catch (const Json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return out;
}

}  // namespace

void write_rankings(const std::filesystem::path& path, const std::vector<Ranking>& rankings, const Json& extra) {
  JsonlWriter out(path);
  out.write(header_with("hindsight.rankings", extra));
  for (const auto& r : rankings) {
    Json j;
    j["idea_id"] = r.idea_id;
    j["k"] = r.k;
    j["hits"] = matches_json(r.hits);
    out.write(j);
  }
  out.close();
}

std::vector<Ranking> read_rankings(const std::filesystem::path& path) {
  return parse_records(path, "hindsight.rankings", [](const Json& r) {
    return Ranking{r.at("idea_id").get<std::string>(), r.at("k").get<std::size_t>(), matches_from(r.at("hits"))};
  });
}

void write_match_sets(const std::filesystem::path& path, const std::vector<MatchSet>& sets, const Json& extra) {
  JsonlWriter out(path);
  out.write(header_with("hindsight.matches", extra));
  for (const auto& s : sets) {
    Json j;
    j["idea_id"] = s.idea_id;
    j["k_used"] = s.k_used;
    j["theta_used"] = s.theta_used;
    j["matches"] = matches_json(s.matches);
    out.write(j);
  }
  out.close();
}

std::vector<MatchSet> read_match_sets(const std::filesystem::path& path) {
  return parse_records(path, "hindsight.matches", [](const Json& r) {
    return MatchSet{r.at("idea_id").get<std::string>(), matches_from(r.at("matches")),
                    r.at("k_used").get<std::size_t>(), r.at("theta_used").get<double>()};
  });
}

void write_impact_table(const std::filesystem::path& path, const ImpactTable& table, const Json& extra) {
  JsonlWriter out(path);
  out.write(header_with("hindsight.impact", extra));
  for (const auto& [id, e] : table.sorted()) {
    Json j;
    j["paper_id"] = id;
    j["c_hat"] = e.c_hat;
    j["v"] = e.v;
    j["h"] = e.h;
    out.write(j);
  }
  out.close();
}

ImpactTable read_impact_table(const std::filesystem::path& path) {
  auto rows = parse_records(path, "hindsight.impact", [](const Json& r) {
    return std::pair{r.at("paper_id").get<std::string>(),
                     ImpactEntry{r.at("c_hat").get<double>(), r.at("v").get<int>(), r.at("h").get<double>()}};
  });
  ImpactTable table;
  for (auto& [id, entry] : rows) table.insert(id, entry);
  return table;
}

void write_scores(const std::filesystem::path& path, const std::vector<ScoreRecord>& scores, const Json& extra) {
  JsonlWriter out(path);
  out.write(header_with("hindsight.scores", extra));
  for (const auto& s : scores) {
    Json j;
    j["idea_id"] = s.score.idea_id;
    j["score"] = s.score.score;
    j["best_paper_id"] = s.score.best_paper_id ? Json(*s.score.best_paper_id) : Json(nullptr);
    j["match_count"] = s.score.match_count;
    j["theta"] = s.theta;
    j["k"] = s.k;
    out.write(j);
  }
  out.close();
}

std::vector<ScoreRecord> read_scores(const std::filesystem::path& path) {
  return parse_records(path, "hindsight.scores", [](const Json& r) {
    ScoreRecord s;
    s.score.idea_id = r.at("idea_id").get<std::string>();
    s.score.score = r.at("score").get<double>();
    if (r.at("best_paper_id").is_string()) s.score.best_paper_id = r.at("best_paper_id").get<std::string>();
    s.score.match_count = r.at("match_count").get<std::size_t>();
    s.theta = r.at("theta").get<double>();
    s.k = r.at("k").get<std::size_t>();
    return s;
  });
}

}  // namespace hindsight
