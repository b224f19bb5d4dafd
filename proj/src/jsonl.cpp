#include "hindsight/jsonl.hpp"

#include "hindsight/error.hpp"

namespace hindsight {

JsonlDocument read_jsonl(const std::filesystem::path& path, const std::string& expected_schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  JsonlDocument doc;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!record.is_object()) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": record is not an object");
    }
    if (doc.records.empty() && !doc.header && record.contains("schema_version")) {
      if (!expected_schema.empty() && record.value("schema", "") != expected_schema) {
        throw FormatError(path.string() + ": expected schema '" + expected_schema + "', found '" +
                          record.value("schema", "") + "'");
      }
      doc.header = std::move(record);
      continue;
    }
    doc.records.push_back(std::move(record));
  }
  return doc;
}

Json make_header(const std::string& schema, int version) {
  Json header;
  header["schema"] = schema;
  header["schema_version"] = version;
  return header;
}

JsonlWriter::JsonlWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  out_.open(path, std::ios::binary | std::ios::trunc);
  if (!out_) throw IoError("cannot write " + path.string());
}

void JsonlWriter::write(const Json& record) { out_ << record.dump() << '\n'; }

void JsonlWriter::close() {
  out_.flush();
  if (!out_) throw IoError("write failed for " + path_.string());
  out_.close();
}

}  // namespace hindsight
