#include "hindsight/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "hindsight/error.hpp"
#include "hindsight/jsonl.hpp"

namespace hindsight {

namespace {

const char* const kTopics[] = {
    "Alignment & Safety", "Chain-of-Thought Reasoning", "Diffusion Models", "Efficient Inference",
    "Hallucination Mitigation", "In-Context Learning", "Instruction Tuning & RLHF", "LLM Agents",
    "Multimodal LLMs", "Retrieval-Augmented Generation"};

const char* const kTopVenues[] = {
    "NeurIPS 2024",
    "Proceedings of ICML 2024",
    "International Conference on Learning Representations",
    "Annual Meeting of the Association for Computational Linguistics",
    "Conference on Empirical Methods in Natural Language Processing",
    "2024 IEEE/CVF Conference on Computer Vision and Pattern Recognition (CVPR)",
    "AAAI Conference on Artificial Intelligence"};

const char* const kOtherVenues[] = {
    "arXiv.org", "Transactions on Machine Learning Research", "Findings of the Association for Computational Linguistics",
    "IEEE Access", "", "NeurIPS Workshop on Efficient Natural Language and Speech Processing"};

double snap_to_float(double x) { return static_cast<double>(static_cast<float>(x)); }

std::string padded(const char* prefix, std::size_t n, int width) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, n);
  return buf;
}

/// In-place lower Cholesky factor of a dense symmetric matrix; false when a
/// pivot is not safely positive.
bool cholesky(std::vector<double>& a, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n + k] * a[j * n + k];
    if (!(d > 1e-12)) return false;
    const double ljj = std::sqrt(d);
    a[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i * n + k] * a[j * n + k];
      a[i * n + j] = s / ljj;
    }
    for (std::size_t k = j + 1; k < n; ++k) a[j * n + k] = 0.0;
  }
  return true;
}

struct Cluster {
  std::string idea_id;
  std::string system;
  std::vector<PlantedPaperSpec> planted;
};

}  // namespace

FixtureSpec FixtureSpec::defaults(std::uint64_t seed) {
  FixtureSpec spec;
  spec.seed = seed;
  spec.profiles["RA"] = {0.85, 1, 8, {0.93, 0.945, 0.955, 0.962, 0.968, 0.975, 0.985}};
  spec.profiles["BL"] = {0.5, 1, 4, {0.92, 0.935, 0.95, 0.958, 0.963}};
  return spec;
}

FixturePaths FixturePaths::in(const std::filesystem::path& dir) {
  return {dir / "papers.jsonl", dir / "ideas.jsonl", dir / "paper_vectors.hsve",
          dir / "idea_vectors.hsve", dir / "judge.jsonl", dir / "fixture_oracle.jsonl"};
}

Fixture generate_fixture(const FixtureSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // 1. Decide every idea's planted structure.
  std::vector<Cluster> clusters;
  for (const auto& system : spec.systems) {
    auto profile_it = spec.profiles.find(system);
    for (std::size_t i = 0; i < spec.ideas_per_system; ++i) {
      Cluster c{padded((system + "-").c_str(), i + 1, 3), system, {}};
      if (profile_it != spec.profiles.end() && !profile_it->second.levels.empty() &&
          unit(rng) < profile_it->second.match_probability) {
        const auto& prof = profile_it->second;
        std::uniform_int_distribution<std::size_t> count(prof.min_planted, std::max(prof.min_planted, prof.max_planted));
        std::uniform_int_distribution<std::size_t> level(0, prof.levels.size() - 1);
        const std::size_t m = count(rng);
        for (std::size_t j = 0; j < m; ++j) c.planted.push_back({prof.levels[level(rng)], std::nullopt, std::nullopt});
      }
      clusters.push_back(std::move(c));
    }
  }
  for (std::size_t e = 0; e < spec.explicit_ideas.size(); ++e) {
    const auto& ex = spec.explicit_ideas[e];
    clusters.push_back({padded((ex.system + "-X").c_str(), e + 1, 3), ex.system, ex.papers});
  }

  std::size_t planted_total = 0;
  for (auto& c : clusters) {
    for (auto& p : c.planted) {
      if (!(p.similarity >= -1.0 && p.similarity <= 1.0)) {
        throw AnalysisError("infeasible planted similarity " + std::to_string(p.similarity) + " for " + c.idea_id);
      }
      p.similarity = snap_to_float(p.similarity);
    }
    planted_total += c.planted.size();
  }
  if (planted_total > spec.papers) {
    throw AnalysisError("fixture plants " + std::to_string(planted_total) + " papers but the pool holds " +
                        std::to_string(spec.papers));
  }
  const std::size_t background = spec.papers - planted_total;
  if (background > 0 && spec.background_dim == 0) {
    throw AnalysisError("background papers need background_dim > 0");
  }

  std::size_t dim = spec.background_dim;
  for (const auto& c : clusters) dim += 1 + c.planted.size();

  // 2. Paper ids in shuffled order so planted papers are scattered.
  std::vector<std::string> paper_ids;
  paper_ids.reserve(spec.papers);
  for (std::size_t i = 0; i < spec.papers; ++i) paper_ids.push_back(padded("P", i, 6));
  std::shuffle(paper_ids.begin(), paper_ids.end(), rng);

  Fixture fx;
  fx.spec = spec;
  std::vector<float> paper_values(spec.papers * dim, 0.0f);
  std::vector<float> idea_values(clusters.size() * dim, 0.0f);
  std::vector<std::string> idea_ids;
  std::vector<std::optional<PlantedPaperSpec>> paper_overrides(spec.papers);

  // 3. Each cluster gets a private coordinate block holding the Cholesky
  // factor of its Gram matrix: row 0 is the idea, rows 1..m the papers.
  std::size_t offset = 0;
  std::size_t next_paper = 0;
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    const auto& c = clusters[ci];
    const std::size_t n = 1 + c.planted.size();
    std::vector<double> gram(n * n, 0.0);
    for (std::size_t a = 0; a < n; ++a) gram[a * n + a] = 1.0;
    for (std::size_t j = 0; j < c.planted.size(); ++j) {
      gram[(j + 1) * n] = gram[j + 1] = c.planted[j].similarity;
      for (std::size_t l = 0; l < j; ++l) {
        const double sj = c.planted[j].similarity;
        const double sl = c.planted[l].similarity;
        const double v = sj * sl + spec.residual_correlation * std::sqrt((1.0 - sj * sj) * (1.0 - sl * sl));
        gram[(j + 1) * n + (l + 1)] = gram[(l + 1) * n + (j + 1)] = v;
      }
    }
    if (!cholesky(gram, n)) {
      throw AnalysisError("infeasible similarity structure for " + c.idea_id + ": Gram matrix is not positive definite");
    }
    idea_values[ci * dim + offset] = 1.0f;
    idea_ids.push_back(c.idea_id);

    OracleIdea oracle{c.idea_id, c.system, {}};
    for (std::size_t j = 0; j < c.planted.size(); ++j) {
      const std::size_t row = next_paper++;
      for (std::size_t col = 0; col <= j + 1; ++col) {
        paper_values[row * dim + offset + col] = static_cast<float>(gram[(j + 1) * n + col]);
      }
      paper_overrides[row] = c.planted[j];
      oracle.planted.push_back({paper_ids[row], c.planted[j].similarity});
    }
    fx.oracle.push_back(std::move(oracle));
    offset += n;
  }

  // 4. Background papers live in the trailing block, orthogonal to every idea.
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t row = next_paper; row < spec.papers; ++row) {
    std::vector<double> v(spec.background_dim);
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& x : v) {
        x = gauss(rng);
        norm += x * x;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (std::size_t d = 0; d < spec.background_dim; ++d) {
      paper_values[row * dim + offset + d] = static_cast<float>(v[d] / norm);
    }
  }

  // 5. Paper metadata. Citations are Pareto distributed.
  std::vector<std::uint64_t> citations(spec.papers);
  std::vector<int> top(spec.papers);
  const int window_days = spec.window_months * 30;
  for (std::size_t row = 0; row < spec.papers; ++row) {
    Paper p;
    p.paper_id = paper_ids[row];
    const char* topic = kTopics[row % std::size(kTopics)];
    p.title = "Synthetic study " + std::to_string(row) + " on " + topic;
    if (unit(rng) >= spec.missing_abstract_fraction) {
      p.abstract = "We investigate problem " + std::to_string(row) + " in " + topic + ".";
    }
    p.degraded = p.abstract.empty();
    const double u = std::max(unit(rng), 1e-12);
    citations[row] = static_cast<std::uint64_t>(std::floor(5.0 * std::pow(u, -1.0 / spec.pareto_alpha) - 5.0));
    top[row] = unit(rng) < spec.top_venue_fraction ? 1 : 0;
    if (const auto& o = paper_overrides[row]) {
      if (o->citations) citations[row] = *o->citations;
      if (o->top_venue) top[row] = *o->top_venue ? 1 : 0;
    }
    p.citation_count = citations[row];
    p.venue = top[row] ? kTopVenues[row % std::size(kTopVenues)] : kOtherVenues[row % std::size(kOtherVenues)];
    const auto days = static_cast<int>(unit(rng) * window_days);
    p.published = spec.cutoff.add_months(days / 30);
    p.topics = {topic};
    fx.pool.push_back(std::move(p));
  }

  const auto [lo, hi] = std::minmax_element(citations.begin(), citations.end());
  for (std::size_t row = 0; row < spec.papers; ++row) {
    const double c_hat = *hi == *lo ? 0.0 : static_cast<double>(citations[row] - *lo) / static_cast<double>(*hi - *lo);
    fx.oracle_impact[paper_ids[row]] = spec.weight_citations * c_hat + spec.weight_venue * top[row];
  }

  // 6. Ideas and judge scores (each dimension the mean of three integer votes).
  std::uniform_int_distribution<int> vote(4, 9);
  for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
    Idea idea;
    idea.idea_id = clusters[ci].idea_id;
    idea.system = clusters[ci].system;
    idea.topic = kTopics[ci % std::size(kTopics)];
    idea.problem = "Open problem " + std::to_string(ci) + " in " + idea.topic;
    idea.method = "Proposed method " + std::to_string(ci) + " for " + idea.topic;
    const int reads = 1 + static_cast<int>(ci % 3);
    for (int r = 0; r < reads; ++r) idea.provenance_dates.push_back(spec.cutoff.add_months(-1 - (r * 7 + static_cast<int>(ci)) % 36));
    fx.ideas.push_back(std::move(idea));

    auto avg3 = [&] { return (vote(rng) + vote(rng) + vote(rng)) / 3.0; };
    JudgeScores j;
    j.idea_id = clusters[ci].idea_id;
    j.novelty = avg3();
    j.feasibility = avg3();
    j.impact = avg3();
    j.overall = avg3();
    fx.judge.push_back(j);
  }

  fx.paper_vectors = EmbeddingMatrix(dim, paper_ids, std::move(paper_values));
  fx.idea_vectors = EmbeddingMatrix(dim, std::move(idea_ids), std::move(idea_values));
  fx.sorted_ids_ = paper_ids;
  std::sort(fx.sorted_ids_.begin(), fx.sorted_ids_.end());
  return fx;
}

OracleOutcome Fixture::expected(const OracleIdea& idea, double theta, std::size_t k) const {
  // Candidate order: positive planted cosines (desc, id asc), then the
  // cosine-0 group by id, then negative planted cosines.
  std::vector<PlantedMatch> positive, negative;
  for (const auto& p : idea.planted) {
    if (p.similarity > 0.0) positive.push_back(p);
    else if (p.similarity < 0.0) negative.push_back(p);
  }
  auto by_rank = [](const PlantedMatch& a, const PlantedMatch& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.paper_id < b.paper_id;
  };
  std::sort(positive.begin(), positive.end(), by_rank);
  std::sort(negative.begin(), negative.end(), by_rank);

  std::vector<PlantedMatch> ranked;
  for (const auto& p : positive) {
    if (ranked.size() == k) break;
    ranked.push_back(p);
  }
  if (ranked.size() < k) {
    std::map<std::string, bool> nonzero;
    for (const auto& p : idea.planted) {
      if (p.similarity != 0.0) nonzero[p.paper_id] = true;
    }
    for (const auto& id : sorted_ids_) {
      if (ranked.size() == k) break;
      if (!nonzero.count(id)) ranked.push_back({id, 0.0});
    }
  }
  for (const auto& p : negative) {
    if (ranked.size() == k) break;
    ranked.push_back(p);
  }

  OracleOutcome out;
  for (const auto& m : ranked) {
    if (m.similarity < theta) continue;
    out.matches.push_back(m.paper_id);
    const double h = oracle_impact.at(m.paper_id);
    if (!out.best_paper_id || h > out.score || (h == out.score && m.paper_id < *out.best_paper_id)) {
      out.score = h;
      out.best_paper_id = m.paper_id;
    }
  }
  return out;
}

void write_fixture(const Fixture& fixture, const FixturePaths& paths) {
  write_papers(paths.papers, fixture.pool, "fixture-seed-" + std::to_string(fixture.spec.seed));
  write_ideas(paths.ideas, fixture.ideas);
  write_vectors(fixture.paper_vectors, paths.paper_vectors);
  write_vectors(fixture.idea_vectors, paths.idea_vectors);
  write_judge_scores(paths.judge, fixture.judge);

  JsonlWriter out(paths.oracle);
  auto header = make_header("hindsight.fixture_oracle", 1);
  header["seed"] = fixture.spec.seed;
  header["theta"] = fixture.spec.theta;
  header["k"] = fixture.spec.k;
  out.write(header);
  for (const auto& idea : fixture.oracle) {
    const auto e = fixture.expected(idea, fixture.spec.theta, fixture.spec.k);
    Json j;
    j["idea_id"] = idea.idea_id;
    j["system"] = idea.system;
    Json planted = Json::array();
    for (const auto& p : idea.planted) planted.push_back(Json::array({p.paper_id, p.similarity}));
    j["planted"] = std::move(planted);
    j["expected_score"] = e.score;
    j["expected_best_paper_id"] = e.best_paper_id ? Json(*e.best_paper_id) : Json(nullptr);
    j["expected_match_count"] = e.matches.size();
    out.write(j);
  }
  out.close();
}

}  // namespace hindsight
