#include "hindsight/embed_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <unordered_set>

#include "hindsight/error.hpp"

namespace hindsight {

namespace {

static_assert(sizeof(float) == 4);

template <typename T>
void put_le(std::string& out, T value) {
  using U = std::make_unsigned_t<std::conditional_t<std::is_floating_point_v<T>, std::int32_t, T>>;
  U bits;
  if constexpr (std::is_floating_point_v<T>) {
    bits = std::bit_cast<std::uint32_t>(value);
  } else {
    bits = static_cast<U>(value);
  }
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
}

template <typename U>
U get_le(const unsigned char* p) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(p[i]) << (8 * i);
  return v;
}

class ByteReader {
 public:
  ByteReader(const std::string& data, const std::filesystem::path& path) : data_(data), path_(path) {}

  const unsigned char* take(std::size_t n, const char* what) {
    if (data_.size() - pos_ < n) {
      throw FormatError(path_.string() + ": truncated " + what + " at byte offset " + std::to_string(pos_));
    }
    auto p = reinterpret_cast<const unsigned char*>(data_.data()) + pos_;
    pos_ += n;
    return p;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::string& data_;
  const std::filesystem::path& path_;
  std::size_t pos_ = 0;
};

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(std::size_t dim, std::vector<std::string> ids, std::vector<float> values)
    : dim_(dim), ids_(std::move(ids)), values_(std::move(values)) {
  if (dim_ == 0) throw FormatError("embedding dim must be positive");
  if (values_.size() != ids_.size() * dim_) {
    throw FormatError("embedding payload has " + std::to_string(values_.size()) + " floats, expected " +
                      std::to_string(ids_.size()) + " x " + std::to_string(dim_));
  }
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], i).second) throw FormatError("duplicate embedding id " + ids_[i]);
  }
}

std::size_t EmbeddingMatrix::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? rows() : it->second;
}

void write_vectors(const std::vector<std::string>& ids, std::span<const float> values, std::size_t dim,
                   const std::filesystem::path& path) {
  if (dim == 0) throw FormatError("cannot write vectors with dim 0");
  if (values.size() != ids.size() * dim) {
    throw FormatError("dimension mismatch: " + std::to_string(values.size()) + " floats for " +
                      std::to_string(ids.size()) + " ids of dim " + std::to_string(dim));
  }
  std::unordered_set<std::string> seen;
  for (const auto& id : ids) {
    if (!seen.insert(id).second) throw FormatError("duplicate embedding id " + id);
  }

  std::string buf;
  buf.reserve(kVectorHeaderBytes + values.size() * 4 + ids.size() * 16);
  buf.append(kVectorMagic, 4);
  put_le<std::uint16_t>(buf, kVectorFormatVersion);
  put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(dim));
  put_le<std::uint64_t>(buf, ids.size());
  for (float v : values) put_le<float>(buf, v);
  for (const auto& id : ids) {
    put_le<std::uint32_t>(buf, static_cast<std::uint32_t>(id.size()));
    buf += id;
  }

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

void write_vectors(const std::vector<std::string>& ids, const std::vector<std::vector<float>>& rows,
                   std::size_t dim, const std::filesystem::path& path) {
  if (rows.size() != ids.size()) {
    throw FormatError("dimension mismatch: " + std::to_string(rows.size()) + " rows for " +
                      std::to_string(ids.size()) + " ids");
  }
  std::vector<float> flat;
  flat.reserve(rows.size() * dim);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != dim) {
      throw FormatError("dimension mismatch: row '" + ids[r] + "' has length " + std::to_string(rows[r].size()) +
                        ", expected " + std::to_string(dim));
    }
    flat.insert(flat.end(), rows[r].begin(), rows[r].end());
  }
  write_vectors(ids, flat, dim, path);
}

void write_vectors(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  write_vectors(matrix.ids(), matrix.values(), matrix.dim(), path);
}

LoadedVectors load_vectors(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ByteReader reader(data, path);
  auto magic = reader.take(4, "magic");
  if (std::memcmp(magic, kVectorMagic, 4) != 0) throw FormatError(path.string() + ": bad magic");
  const auto version = get_le<std::uint16_t>(reader.take(2, "version"));
  if (version != kVectorFormatVersion) {
    throw FormatError(path.string() + ": unsupported format version " + std::to_string(version));
  }
  const auto dim = get_le<std::uint32_t>(reader.take(4, "dim"));
  const auto count = get_le<std::uint64_t>(reader.take(8, "count"));
  if (dim == 0) throw FormatError(path.string() + ": dim is 0");
  if (count > (data.size() / 4) / dim + 1) {
    throw FormatError(path.string() + ": truncated payload at byte offset " + std::to_string(reader.pos()));
  }

  std::vector<float> values(static_cast<std::size_t>(count) * dim);
  auto payload = reader.take(values.size() * 4, "payload");
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = std::bit_cast<float>(get_le<std::uint32_t>(payload + 4 * i));
  }
  std::vector<std::string> ids;
  ids.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto len = get_le<std::uint32_t>(reader.take(4, "id length"));
    auto bytes = reader.take(len, "id");
    ids.emplace_back(reinterpret_cast<const char*>(bytes), len);
  }
  if (reader.pos() != data.size()) {
    throw FormatError(path.string() + ": trailing bytes at byte offset " + std::to_string(reader.pos()));
  }

  LoadedVectors out{EmbeddingMatrix(dim, std::move(ids), std::move(values)), {}};
  auto& m = out.matrix;
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    double sq = 0.0;
    for (float v : row) sq += static_cast<double>(v) * v;
    const double norm = std::sqrt(sq);
    if (!std::isfinite(norm) || norm == 0.0) {
      throw FormatError(path.string() + ": cannot normalize row '" + m.ids()[r] + "' (norm " +
                        std::to_string(norm) + ")");
    }
    const double deviation = std::abs(norm - 1.0);
    if (deviation <= 1e-6) continue;
    for (float& v : row) v = static_cast<float>(v / norm);
    if (deviation > 1e-3) {
      out.report.renormalized.push_back(m.ids()[r]);
    } else {
      ++out.report.touched_up;
    }
  }
  return out;
}

Alignment align(const EmbeddingMatrix& matrix, const std::vector<std::string>& record_ids) {
  Alignment out;
  std::vector<bool> used(matrix.rows(), false);
  for (std::size_t i = 0; i < record_ids.size(); ++i) {
    const auto row = matrix.find(record_ids[i]);
    if (row == matrix.rows()) {
      out.orphan_records.push_back(record_ids[i]);
    } else {
      out.pairs.push_back({i, row});
      used[row] = true;
    }
  }
  for (std::size_t r = 0; r < matrix.rows(); ++r) {
    if (!used[r]) out.orphan_rows.push_back(matrix.ids()[r]);
  }
  return out;
}

}  // namespace hindsight
