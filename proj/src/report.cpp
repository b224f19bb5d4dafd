#include "hindsight/report.hpp"

#include <cstdio>
#include <fstream>

#include "hindsight/error.hpp"

namespace hindsight {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("write failed for " + path.string());
}

Json or_empty(const Json& table) {
  if (table.is_null() || (table.is_array() && table.empty())) return Json{{"empty", true}};
  return table;
}

}  // namespace

void emit_report(const ReportInputs& in, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);

  Json report;
  report["schema"] = "hindsight.report";
  report["schema_version"] = kReportSchemaVersion;
  report["metadata"] = in.metadata;
  report["idea_count"] = in.ideas.size();
  report["empty"] = in.ideas.empty();
  report["comparison"] = or_empty(in.comparison);
  report["correlations"] = or_empty(in.correlations);
  report["quadrants"] = or_empty(in.quadrants);
  report["sweep"] = or_empty(in.sweep);
  report["plot_data"] = {"scores.csv", "sweep.csv", "scatter.csv"};
  write_file(dir / "report.json", report.dump(2) + "\n");

  std::string scores = "idea_id,system,hindsight,match_count,judge_overall\n";
  std::string scatter = "idea_id,system,judge_overall,hindsight,quadrant\n";
  for (const auto& r : in.ideas) {
    const std::string judge = r.judge_overall ? num(*r.judge_overall) : "";
    scores += csv_field(r.idea_id) + "," + csv_field(r.system) + "," + num(r.hindsight) + "," +
              std::to_string(r.match_count) + "," + judge + "\n";
    scatter += csv_field(r.idea_id) + "," + csv_field(r.system) + "," + judge + "," + num(r.hindsight) + "," +
               r.quadrant.value_or("") + "\n";
  }
  write_file(dir / "scores.csv", scores);
  write_file(dir / "scatter.csv", scatter);

  std::string sweep = "theta,system,n,mean,match_rate,ratio\n";
  if (in.sweep.is_array()) {
    for (const auto& point : in.sweep) {
      const std::string ratio = point.at("ratio").is_null() ? "" : num(point.at("ratio").get<double>());
      for (const auto& [system, s] : point.at("systems").items()) {
        sweep += num(point.at("theta").get<double>()) + "," + csv_field(system) + "," +
                 std::to_string(s.at("n").get<std::size_t>()) + "," + num(s.at("mean").get<double>()) + "," +
                 num(s.at("match_rate").get<double>()) + "," + ratio + "\n";
      }
    }
  }
  write_file(dir / "sweep.csv", sweep);
}

}  // namespace hindsight
