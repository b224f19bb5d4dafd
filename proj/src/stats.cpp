#include "hindsight/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "hindsight/error.hpp"
#include "hindsight/jsonl.hpp"

namespace hindsight {

std::string_view to_string(TestMethod method) {
  switch (method) {
    case TestMethod::ExactPermutation: return "exact-permutation";
    case TestMethod::NormalApproximation: return "normal-approximation";
    case TestMethod::TApproximation: return "t-approximation";
  }
  return "unknown";
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i + 1;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t t = i; t < j; ++t) ranks[order[t]] = rank;
    i = j;
  }
  return ranks;
}

namespace {

double exact_mwu_p(const std::vector<long>& doubled_ranks, std::size_t n1, long doubled_r1) {
  // ways[j][s]: number of j-subsets of the pooled sample whose doubled rank
  // sum is s.
  const long total = std::accumulate(doubled_ranks.begin(), doubled_ranks.end(), 0L);
  std::vector<std::vector<double>> ways(n1 + 1, std::vector<double>(static_cast<std::size_t>(total) + 1, 0.0));
  ways[0][0] = 1.0;
  for (long r : doubled_ranks) {
    for (std::size_t j = n1; j >= 1; --j) {
      for (long s = total; s >= r; --s) ways[j][s] += ways[j - 1][s - r];
    }
  }
  const long n = static_cast<long>(doubled_ranks.size());
  const long m1 = static_cast<long>(n1);
  const long m2 = n - m1;
  auto dev = [&](long doubled_sum) {
    // doubled_sum = 2 R1, so 2U = doubled_sum - n1(n1+1) and the distance
    // from the mean n1 n2 / 2 in doubled units is |2U - n1 n2|.
    return std::labs(doubled_sum - m1 * (m1 + 1) - m1 * m2);
  };
  const long observed = dev(doubled_r1);
  double hits = 0.0;
  double all = 0.0;
  for (long s = 0; s <= total; ++s) {
    const double w = ways[n1][static_cast<std::size_t>(s)];
    if (w == 0.0) continue;
    all += w;
    if (dev(s) >= observed) hits += w;
  }
  return std::min(1.0, hits / all);
}

}  // namespace

TestResult mann_whitney_u(std::span<const double> a, std::span<const double> b, MannWhitneyMode mode) {
  if (a.empty() || b.empty()) throw StatsError("Mann-Whitney U needs two non-empty samples");
  const std::size_t n1 = a.size();
  const std::size_t n2 = b.size();
  const std::size_t n = n1 + n2;
  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  for (double v : pooled) {
    if (!std::isfinite(v)) throw StatsError("Mann-Whitney U sample contains a non-finite value");
  }
  const auto ranks = average_ranks(pooled);
  const double r1 = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(n1), 0.0);
  const double u1 = r1 - static_cast<double>(n1) * static_cast<double>(n1 + 1) / 2.0;

  TestResult result;
  result.statistic = u1;
  result.n1 = n1;
  result.n2 = n2;

  const bool exact = mode == MannWhitneyMode::Exact || (mode == MannWhitneyMode::Auto && n <= kExactMannWhitneyMax);
  if (exact) {
    std::vector<long> doubled(n);
    for (std::size_t i = 0; i < n; ++i) doubled[i] = std::lround(2.0 * ranks[i]);
    const long doubled_r1 = std::accumulate(doubled.begin(), doubled.begin() + static_cast<std::ptrdiff_t>(n1), 0L);
    result.p_value = exact_mwu_p(doubled, n1, doubled_r1);
    result.method = TestMethod::ExactPermutation;
    return result;
  }

  // Tie correction: sum over tie groups of t^3 - t.
  std::vector<double> sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] == sorted[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double dn = static_cast<double>(n);
  const double mu = static_cast<double>(n1) * static_cast<double>(n2) / 2.0;
  const double var = static_cast<double>(n1) * static_cast<double>(n2) / 12.0 *
                     ((dn + 1.0) - tie_term / (dn * (dn - 1.0)));
  result.method = TestMethod::NormalApproximation;
  if (!(var > 0.0)) {
    result.p_value = 1.0;
    return result;
  }
  const double z = std::max(0.0, std::abs(u1 - mu) - 0.5) / std::sqrt(var);
  const boost::math::normal_distribution<double> normal;
  result.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(normal, z)));
  return result;
}

namespace {

double pearson(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw StatsError("correlation undefined: an input has zero rank variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

void check_pairs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw StatsError("Spearman inputs differ in length (" + std::to_string(x.size()) + " vs " +
                     std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) throw StatsError("Spearman needs at least 3 pairs");
}

}  // namespace

TestResult spearman(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double rho = pearson(rx, ry);
  TestResult result;
  result.statistic = rho;
  result.n1 = x.size();
  result.method = TestMethod::TApproximation;
  const double df = static_cast<double>(x.size()) - 2.0;
  if (std::abs(rho) >= 1.0) {
    result.p_value = 0.0;
    return result;
  }
  const double t = rho * std::sqrt(df / ((1.0 - rho) * (1.0 + rho)));
  const boost::math::students_t_distribution<double> dist(df);
  result.p_value = std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t))));
  return result;
}

double spearman_permutation_p(std::span<const double> x, std::span<const double> y) {
  check_pairs(x, y);
  if (x.size() > 8) throw StatsError("permutation Spearman is limited to n <= 8");
  const auto rx = average_ranks(x);
  auto ry = average_ranks(y);
  const double observed = std::abs(pearson(rx, ry));
  std::sort(ry.begin(), ry.end());
  std::size_t hits = 0;
  std::size_t total = 0;
  // Permute positions (not values) so tied ranks count every pairing.
  std::vector<std::size_t> perm(ry.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<double> permuted(ry.size());
  do {
    for (std::size_t i = 0; i < perm.size(); ++i) permuted[i] = ry[perm[i]];
    ++total;
    if (std::abs(pearson(rx, permuted)) >= observed - 1e-12) ++hits;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(hits) / static_cast<double>(total);
}

double mean(std::span<const double> values) {
  if (values.empty()) throw StatsError("mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double median(std::span<const double> values) {
  if (values.empty()) throw StatsError("median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : (v[mid - 1] + v[mid]) / 2.0;
}

Summary summary(std::span<const double> scores, std::span<const std::size_t> match_counts) {
  if (scores.empty()) throw StatsError("summary of an empty sample");
  if (!match_counts.empty() && match_counts.size() != scores.size()) {
    throw StatsError("match counts do not align with scores");
  }
  Summary s;
  s.n = scores.size();
  s.mean = mean(scores);
  s.median = median(scores);
  s.positive = static_cast<std::size_t>(std::count_if(scores.begin(), scores.end(), [](double v) { return v > 0.0; }));
  s.match_rate = static_cast<double>(s.positive) / static_cast<double>(s.n);
  if (!match_counts.empty()) {
    const double total = std::accumulate(match_counts.begin(), match_counts.end(), 0.0);
    s.avg_matches = total / static_cast<double>(s.n);
  }
  return s;
}

double dimension(const JudgeScores& scores, std::string_view name) {
  if (name == "novelty") return scores.novelty;
  if (name == "feasibility") return scores.feasibility;
  if (name == "impact") return scores.impact;
  if (name == "overall") return scores.overall;
  throw StatsError("unknown judge dimension '" + std::string(name) + "'");
}

std::vector<JudgeScores> read_judge_scores(const std::filesystem::path& path) {
  auto doc = read_jsonl(path, "hindsight.judge");
  std::vector<JudgeScores> out;
  std::set<std::string> seen;
  for (const auto& record : doc.records) {
    JudgeScores s;
    auto id = record.find("idea_id");
    if (id == record.end() || !id->is_string()) throw FormatError(path.string() + ": judge record without idea_id");
    s.idea_id = id->get<std::string>();
    for (auto dim : kJudgeDimensions) {
      auto it = record.find(std::string(dim));
      if (it == record.end() || !it->is_number()) {
        throw FormatError(path.string() + ": judge record " + s.idea_id + " missing '" + std::string(dim) + "'");
      }
      const double v = it->get<double>();
      if (!(v >= 1.0 && v <= 10.0)) {
        throw FormatError(path.string() + ": judge score " + std::string(dim) + "=" + std::to_string(v) +
                          " for " + s.idea_id + " outside [1, 10]");
      }
      if (dim == "novelty") s.novelty = v;
      else if (dim == "feasibility") s.feasibility = v;
      else if (dim == "impact") s.impact = v;
      else s.overall = v;
    }
    if (!seen.insert(s.idea_id).second) throw FormatError(path.string() + ": duplicate judge record " + s.idea_id);
    out.push_back(std::move(s));
  }
  return out;
}

void write_judge_scores(const std::filesystem::path& path, const std::vector<JudgeScores>& scores) {
  JsonlWriter out(path);
  out.write(make_header("hindsight.judge", 1));
  for (const auto& s : scores) {
    Json j;
    j["idea_id"] = s.idea_id;
    j["novelty"] = s.novelty;
    j["feasibility"] = s.feasibility;
    j["impact"] = s.impact;
    j["overall"] = s.overall;
    out.write(j);
  }
  out.close();
}

}  // namespace hindsight
