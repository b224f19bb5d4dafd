#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace hindsight {

/// Binary vector file layout (little-endian):
///   "HSVE" | u16 version | u32 dim | u64 count | count*dim f32 | count * (u32 len + UTF-8 id)
inline constexpr char kVectorMagic[4] = {'H', 'S', 'V', 'E'};
inline constexpr std::uint16_t kVectorFormatVersion = 1;
inline constexpr std::size_t kVectorHeaderBytes = 4 + 2 + 4 + 8;

/// Id-aligned row-major float32 vectors.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws FormatError if the shape is inconsistent or ids repeat.
  EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids, std::vector<float> values);

  std::size_t dim() const { return dim_; }
  std::size_t rows() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  const std::vector<std::string>& ids() const { return ids_; }
  std::span<const float> row(std::size_t i) const { return {values_.data() + i * dim_, dim_}; }
  std::span<float> row(std::size_t i) { return {values_.data() + i * dim_, dim_}; }
  const std::vector<float>& values() const { return values_; }
  /// Row index of `id`, or rows() when absent.
  std::size_t find(const std::string& id) const;

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> ids_;
  std::vector<float> values_;
  std::unordered_map<std::string, std::size_t> index_;
};

void write_vectors(const std::vector<std::string>& ids, std::span<const float> values, std::size_t dim,
                   const std::filesystem::path& path);
/// Row-per-vector overload; every row must have length `dim`.
void write_vectors(const std::vector<std::string>& ids, const std::vector<std::vector<float>>& rows,
                   std::size_t dim, const std::filesystem::path& path);
void write_vectors(const EmbeddingMatrix& matrix, const std::filesystem::path& path);

struct NormalizationReport {
  /// Rows whose stored norm was off by more than 1e-3.
  std::vector<std::string> renormalized;
  /// Rows nudged back to unit length from a smaller deviation.
  std::size_t touched_up = 0;
};

struct LoadedVectors {
  EmbeddingMatrix matrix;
  NormalizationReport report;
};

/// Reads a vector file and L2-normalizes each row in place. Zero or
/// non-finite rows are a FormatError naming the row id.
LoadedVectors load_vectors(const std::filesystem::path& path);

struct Alignment {
  struct Pair {
    std::size_t record;
    std::size_t row;
  };
  std::vector<Pair> pairs;
  std::vector<std::string> orphan_rows;
  std::vector<std::string> orphan_records;
};

/// Pairs records (by id, in record order) with matrix rows.
Alignment align(const EmbeddingMatrix& matrix, const std::vector<std::string>& record_ids);

template <typename Record, typename IdFn>
Alignment align(const EmbeddingMatrix& matrix, const std::vector<Record>& records, IdFn id_of) {
  std::vector<std::string> ids;
  ids.reserve(records.size());
  for (const auto& r : records) ids.push_back(id_of(r));
  return align(matrix, ids);
}

}  // namespace hindsight
