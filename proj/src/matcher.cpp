#include "hindsight/matcher.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <exception>
#include <thread>

#include "hindsight/error.hpp"

namespace hindsight {

FlatIndex::FlatIndex(EmbeddingMatrix matrix, kernels::Isa isa) : matrix_(std::move(matrix)), isa_(isa) {
  if (matrix_.empty()) throw IndexError("cannot build an index over an empty matrix");
  if (!kernels::supported(isa_)) isa_ = kernels::Isa::Scalar;
  std::vector<std::size_t> order(matrix_.rows());
  std::iota(order.begin(), order.end(), 0);
  const auto& ids = matrix_.ids();
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ids[a] < ids[b]; });
  id_rank_.resize(order.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) id_rank_[order[pos]] = pos;
}

std::vector<Match> FlatIndex::select(std::span<const double> scores, std::size_t k) const {
  k = std::min(k, scores.size());
  std::vector<std::size_t> rows(scores.size());
  std::iota(rows.begin(), rows.end(), 0);
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return id_rank_[a] < id_rank_[b];
  };
  if (k < rows.size()) {
    std::nth_element(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end(), better);
    rows.resize(k);
  }
  std::sort(rows.begin(), rows.end(), better);
  std::vector<Match> out;
  out.reserve(k);
  for (auto r : rows) out.push_back({matrix_.ids()[r], scores[r]});
  return out;
}

std::vector<Match> FlatIndex::top_k(std::span<const float> query, std::size_t k) const {
  if (k == 0) throw QueryError("k must be positive");
  if (query.size() != dim()) {
    throw QueryError("query has dim " + std::to_string(query.size()) + ", index has dim " +
                     std::to_string(dim()));
  }
  const double norm = std::sqrt(kernels::dot_scalar(query.data(), query.data(), query.size()));
  if (!(std::abs(norm - 1.0) <= 1e-5)) {
    throw QueryError("query is not unit length (norm " + std::to_string(norm) + ")");
  }
  std::vector<double> scores(size());
  kernels::dot_rows(isa_, matrix_.values(), dim(), query, scores);
  return select(scores, k);
}

std::vector<Ranking> FlatIndex::top_k_all(const EmbeddingMatrix& queries, std::size_t k,
                                          unsigned threads) const {
  if (queries.rows() > 0 && queries.dim() != dim()) {
    throw QueryError("query matrix has dim " + std::to_string(queries.dim()) + ", index has dim " +
                     std::to_string(dim()));
  }
  std::vector<Ranking> out(queries.rows());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, queries.rows())));

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t q = begin; q < end; ++q) {
      out[q] = Ranking{queries.ids()[q], k, top_k(queries.row(q), k)};
    }
  };
  if (threads <= 1) {
    work(0, queries.rows());
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (queries.rows() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(queries.rows(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back([&, t, begin, end] {
        try {
          work(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

MatchSet filter_matches(const std::vector<Match>& ranked, double theta, const std::string& idea_id,
                        std::size_t k_used) {
  MatchSet set{idea_id, {}, k_used, theta};
  for (const auto& m : ranked) {
    if (m.similarity >= theta) set.matches.push_back(m);
  }
  return set;
}

MatchSet filter_matches(const Ranking& ranking, double theta) {
  return filter_matches(ranking.hits, theta, ranking.idea_id, ranking.k);
}

}  // namespace hindsight
