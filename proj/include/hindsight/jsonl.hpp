#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hindsight {

using Json = nlohmann::ordered_json;

/// A line-delimited file: an optional header record followed by one record
/// per line. The header is recognised by its "schema_version" key.
struct JsonlDocument {
  std::optional<Json> header;
  std::vector<Json> records;
};

/// Reads a line-delimited file. When `expected_schema` is non-empty and a
/// header is present, its "schema" must match.
JsonlDocument read_jsonl(const std::filesystem::path& path, const std::string& expected_schema = {});

/// Builds a header record carrying the schema name and version.
Json make_header(const std::string& schema, int version);

class JsonlWriter {
 public:
  explicit JsonlWriter(const std::filesystem::path& path);
  void write(const Json& record);
  /// Flushes and reports any stream failure as IoError.
  void close();

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

}  // namespace hindsight
