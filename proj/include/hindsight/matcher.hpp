#pragma once

#include <span>
#include <string>
#include <vector>

#include "hindsight/embed_io.hpp"
#include "hindsight/kernels.hpp"

namespace hindsight {

struct Match {
  std::string paper_id;
  double similarity = 0.0;

  bool operator==(const Match&) const = default;
};

/// Top-K retrieval result for one idea, before thresholding.
struct Ranking {
  std::string idea_id;
  std::size_t k = 0;
  std::vector<Match> hits;
};

/// Retained matches for one idea: similarity >= theta_used, sorted by
/// similarity descending then paper id ascending.
struct MatchSet {
  std::string idea_id;
  std::vector<Match> matches;
  std::size_t k_used = 0;
  double theta_used = 0.0;
};

/// Exact inner-product index over unit vectors. Similarities accumulate in
/// double precision; ties rank by ascending paper id.
class FlatIndex {
 public:
  /// Throws IndexError on an empty matrix.
  explicit FlatIndex(EmbeddingMatrix matrix, kernels::Isa isa = kernels::active_isa());

  std::size_t dim() const { return matrix_.dim(); }
  std::size_t size() const { return matrix_.rows(); }
  kernels::Isa isa() const { return isa_; }
  const EmbeddingMatrix& matrix() const { return matrix_; }

  /// min(k, size()) best matches. Throws QueryError on a dimension mismatch,
  /// a non-unit query, or k == 0.
  std::vector<Match> top_k(std::span<const float> query, std::size_t k) const;

  /// Ranks every row of `queries` (parallel across queries).
  std::vector<Ranking> top_k_all(const EmbeddingMatrix& queries, std::size_t k, unsigned threads = 0) const;

 private:
  std::vector<Match> select(std::span<const double> scores, std::size_t k) const;

  EmbeddingMatrix matrix_;
  kernels::Isa isa_;
  std::vector<std::size_t> id_rank_;  // lexicographic rank of each row's id
};

/// Keeps hits with similarity >= theta (inclusive).
MatchSet filter_matches(const std::vector<Match>& ranked, double theta, const std::string& idea_id,
                        std::size_t k_used);
MatchSet filter_matches(const Ranking& ranking, double theta);

}  // namespace hindsight
