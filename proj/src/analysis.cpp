#include "hindsight/analysis.hpp"

#include <algorithm>
#include <set>

#include "hindsight/error.hpp"

namespace hindsight {

namespace {

const std::string& system_for(const SystemOf& system_of, const std::string& idea_id) {
  auto it = system_of.find(idea_id);
  if (it == system_of.end()) throw AnalysisError("idea " + idea_id + " has no system label");
  return it->second;
}

std::unordered_map<std::string, const JudgeScores*> judge_index(const std::vector<JudgeScores>& judge) {
  std::unordered_map<std::string, const JudgeScores*> out;
  for (const auto& j : judge) out[j.idea_id] = &j;
  return out;
}

}  // namespace

SystemComparison compare_systems(const std::vector<HindsightScore>& scores, const std::vector<JudgeScores>& judge,
                                 const SystemOf& system_of, const SystemPair& systems) {
  SystemComparison out;
  out.systems = systems;
  std::vector<double> score_t, score_b;
  std::vector<std::size_t> count_t, count_b;
  std::vector<std::string> ids_t, ids_b;
  for (const auto& s : scores) {
    const auto& sys = system_for(system_of, s.idea_id);
    if (sys == systems.treatment) {
      score_t.push_back(s.score);
      count_t.push_back(s.match_count);
      ids_t.push_back(s.idea_id);
    } else if (sys == systems.baseline) {
      score_b.push_back(s.score);
      count_b.push_back(s.match_count);
      ids_b.push_back(s.idea_id);
    }
  }
  out.n_treatment = score_t.size();
  out.n_baseline = score_b.size();
  if (score_t.empty() || score_b.empty()) {
    throw AnalysisError("comparison needs ideas from both '" + systems.treatment + "' and '" + systems.baseline + "'");
  }
  const auto st = summary(score_t, count_t);
  const auto sb = summary(score_b, count_b);
  auto row = [](std::string label, double t, double b, std::optional<TestResult> test = std::nullopt) {
    return ComparisonRow{std::move(label), t, b, t - b, std::move(test)};
  };
  out.rows.push_back(row("Score (mean)", st.mean, sb.mean, mann_whitney_u(score_t, score_b)));
  out.rows.push_back(row("Score (median)", st.median, sb.median));
  out.rows.push_back(row("Match rate", st.match_rate, sb.match_rate));
  out.rows.push_back(row("Avg. matches", *st.avg_matches, *sb.avg_matches));

  if (judge.empty()) return out;
  const auto by_id = judge_index(judge);
  auto collect = [&](const std::vector<std::string>& ids, std::string_view dim) {
    std::vector<double> v;
    for (const auto& id : ids) {
      auto it = by_id.find(id);
      if (it == by_id.end()) throw AnalysisError("no judge scores for idea " + id);
      v.push_back(dimension(*it->second, dim));
    }
    return v;
  };
  const std::pair<const char*, const char*> dims[] = {
      {"Overall", "overall"}, {"Novelty", "novelty"}, {"Impact", "impact"}, {"Feasibility", "feasibility"}};
  for (auto [label, dim] : dims) {
    const auto jt = collect(ids_t, dim);
    const auto jb = collect(ids_b, dim);
    out.rows.push_back(row(label, mean(jt), mean(jb), mann_whitney_u(jt, jb)));
  }
  return out;
}

std::string significance_stars(double p) {
  if (p < 0.001) return "***";
  if (p < 0.01) return "**";
  if (p < 0.05) return "*";
  return "";
}

std::vector<CorrelationRow> correlation_matrix(const std::vector<HindsightScore>& scores,
                                               const std::vector<JudgeScores>& judge, const SystemOf& system_of,
                                               const std::vector<std::string>& system_order, bool strict) {
  const auto by_id = judge_index(judge);
  std::vector<CorrelationRow> rows;
  for (const auto& system : system_order) {
    std::vector<const HindsightScore*> members;
    for (const auto& s : scores) {
      if (system_for(system_of, s.idea_id) == system) members.push_back(&s);
    }
    std::vector<double> h;
    for (const auto* s : members) h.push_back(s->score);
    for (auto dim : kJudgeDimensions) {
      CorrelationRow row{system, std::string(dim), members.size(), std::nullopt, std::nullopt, "", ""};
      std::vector<double> j;
      for (const auto* s : members) {
        auto it = by_id.find(s->idea_id);
        if (it == by_id.end()) throw AnalysisError("no judge scores for idea " + s->idea_id);
        j.push_back(dimension(*it->second, dim));
      }
      try {
        const auto r = spearman(h, j);
        row.rho = r.statistic;
        row.p_value = r.p_value;
        row.stars = significance_stars(r.p_value);
      } catch (const StatsError& e) {
        if (strict) throw;
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepPoint> threshold_sweep(const std::vector<Ranking>& rankings, const SystemOf& system_of,
                                        const ImpactTable& impact, std::span<const double> theta_grid,
                                        const SystemPair& systems) {
  if (theta_grid.empty()) throw AnalysisError("threshold sweep needs a non-empty theta grid");
  for (std::size_t i = 1; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] > theta_grid[i - 1])) throw AnalysisError("theta grid must be strictly increasing");
  }
  std::vector<SweepPoint> out;
  out.reserve(theta_grid.size());
  for (double theta : theta_grid) {
    SweepPoint point;
    point.theta = theta;
    std::map<std::string, std::vector<double>> by_system;
    for (const auto& ranking : rankings) {
      const auto score = hindsight_score(filter_matches(ranking, theta), impact);
      by_system[system_for(system_of, ranking.idea_id)].push_back(score.score);
    }
    for (const auto& [system, values] : by_system) {
      const auto s = summary(values);
      point.systems[system] = {s.n, s.mean, s.match_rate};
    }
    auto t = point.systems.find(systems.treatment);
    auto b = point.systems.find(systems.baseline);
    if (t != point.systems.end() && b != point.systems.end() && b->second.mean != 0.0) {
      point.ratio = t->second.mean / b->second.mean;
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<SweepPoint> threshold_sweep(const FlatIndex& index, const EmbeddingMatrix& idea_vectors,
                                        const SystemOf& system_of, const ImpactTable& impact,
                                        std::span<const double> theta_grid, std::size_t k, const SystemPair& systems) {
  return threshold_sweep(index.top_k_all(idea_vectors, k), system_of, impact, theta_grid, systems);
}

std::string_view to_string(Quadrant q) {
  switch (q) {
    case Quadrant::TruePositive: return "TruePositive";
    case Quadrant::HiddenGem: return "HiddenGem";
    case Quadrant::Overhyped: return "Overhyped";
    case Quadrant::TrueNegative: return "TrueNegative";
  }
  return "TrueNegative";
}

std::map<Quadrant, std::size_t> QuadrantResult::counts() const {
  std::map<Quadrant, std::size_t> out;
  for (auto q : kQuadrants) out[q] = 0;
  for (const auto& [id, q] : labels) ++out[q];
  return out;
}

std::map<Quadrant, std::size_t> QuadrantResult::counts(const SystemOf& system_of, const std::string& system) const {
  std::map<Quadrant, std::size_t> out;
  for (auto q : kQuadrants) out[q] = 0;
  for (const auto& [id, q] : labels) {
    if (system_for(system_of, id) == system) ++out[q];
  }
  return out;
}

QuadrantResult classify_quadrants(const std::map<std::string, double>& hindsight,
                                  const std::map<std::string, double>& judge_overall) {
  std::vector<std::string> only_h, only_j;
  for (const auto& [id, v] : judge_overall) {
    if (!hindsight.count(id)) only_j.push_back(id);
  }
  for (const auto& [id, v] : hindsight) {
    if (!judge_overall.count(id)) only_h.push_back(id);
  }
  if (!only_h.empty() || !only_j.empty()) {
    std::string msg = "idea sets differ:";
    for (const auto& id : only_h) msg += " " + id + "(hindsight only)";
    for (const auto& id : only_j) msg += " " + id + "(judge only)";
    throw AnalysisError(msg);
  }
  QuadrantResult out;
  if (hindsight.empty()) return out;
  std::vector<double> h, j;
  for (const auto& [id, v] : hindsight) h.push_back(v);
  for (const auto& [id, v] : judge_overall) j.push_back(v);
  out.median_hindsight = median(h);
  out.median_judge = median(j);
  for (const auto& [id, hv] : hindsight) {
    const bool high_h = hv > out.median_hindsight;
    const bool high_j = judge_overall.at(id) > out.median_judge;
    out.labels[id] = high_h ? (high_j ? Quadrant::TruePositive : Quadrant::HiddenGem)
                            : (high_j ? Quadrant::Overhyped : Quadrant::TrueNegative);
  }
  return out;
}

Json to_json(const TestResult& t) {
  Json j;
  j["statistic"] = t.statistic;
  j["p_value"] = t.p_value;
  j["method"] = std::string(to_string(t.method));
  j["n1"] = t.n1;
  j["n2"] = t.n2;
  return j;
}

Json to_json(const SystemComparison& c) {
  Json j;
  j["treatment"] = c.systems.treatment;
  j["baseline"] = c.systems.baseline;
  j["n_treatment"] = c.n_treatment;
  j["n_baseline"] = c.n_baseline;
  Json rows = Json::array();
  for (const auto& r : c.rows) {
    Json row;
    row["label"] = r.label;
    row["treatment"] = r.treatment;
    row["baseline"] = r.baseline;
    row["delta"] = r.delta;
    row["test"] = r.test ? to_json(*r.test) : Json(nullptr);
    rows.push_back(std::move(row));
  }
  j["rows"] = std::move(rows);
  return j;
}

Json to_json(const std::vector<CorrelationRow>& rows) {
  Json arr = Json::array();
  for (const auto& r : rows) {
    Json row;
    row["system"] = r.system;
    row["dimension"] = r.dimension;
    row["n"] = r.n;
    row["rho"] = r.rho ? Json(*r.rho) : Json(nullptr);
    row["p_value"] = r.p_value ? Json(*r.p_value) : Json(nullptr);
    row["stars"] = r.stars;
    if (!r.error.empty()) row["error"] = r.error;
    arr.push_back(std::move(row));
  }
  return arr;
}

Json to_json(const std::vector<SweepPoint>& sweep, const SystemPair& systems) {
  Json arr = Json::array();
  for (const auto& p : sweep) {
    Json point;
    point["theta"] = p.theta;
    Json per = Json::object();
    for (const auto& [system, s] : p.systems) {
      per[system] = {{"n", s.n}, {"mean", s.mean}, {"match_rate", s.match_rate}};
    }
    point["systems"] = std::move(per);
    point["ratio"] = p.ratio ? Json(*p.ratio) : Json(nullptr);
    point["ratio_of"] = systems.treatment + "/" + systems.baseline;
    arr.push_back(std::move(point));
  }
  return arr;
}

Json to_json(const QuadrantResult& q, const SystemOf& system_of, const std::vector<std::string>& system_order) {
  Json j;
  j["median_pooling"] = "pooled";
  j["median_hindsight"] = q.median_hindsight;
  j["median_judge_overall"] = q.median_judge;
  j["high_rule"] = "strictly greater than median";
  Json counts = Json::object();
  for (const auto& system : system_order) {
    Json c = Json::object();
    for (const auto& [quadrant, n] : q.counts(system_of, system)) c[std::string(to_string(quadrant))] = n;
    counts[system] = std::move(c);
  }
  Json total = Json::object();
  for (const auto& [quadrant, n] : q.counts()) total[std::string(to_string(quadrant))] = n;
  counts["all"] = std::move(total);
  j["counts"] = std::move(counts);
  Json labels = Json::object();
  for (const auto& [id, quadrant] : q.labels) labels[id] = std::string(to_string(quadrant));
  j["labels"] = std::move(labels);
  return j;
}

}  // namespace hindsight
