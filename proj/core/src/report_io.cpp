#include "crad/report_io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

namespace crad {

namespace {

std::string shortest(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string report_to_json(const EvaluationReport& report) {
  nlohmann::ordered_json j;
  j["metric"] = report.metric;
  if (report.empty) {
    j["value"] = nullptr;
  } else {
    j["value"] = report.value;
  }
  j["n_items"] = report.n_items;
  j["sd"] = report.sd;
  j["fold_values"] = report.fold_values;
  j["empty"] = report.empty;
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  for (const auto& [k, v] : report.config) config[k] = v;
  j["config"] = config;
  j["notes"] = report.notes;
  return j.dump();
}

void write_reports_jsonl(const std::vector<EvaluationReport>& reports, std::ostream& out) {
  for (const auto& r : reports) out << report_to_json(r) << '\n';
}

void write_reports_csv(const std::vector<EvaluationReport>& reports, std::ostream& out) {
  out << "metric,row,index,value,n_items,sd,empty\n";
  for (const auto& r : reports) {
    out << r.metric << ",summary,0," << (r.empty ? std::string() : shortest(r.value))
        << ',' << r.n_items << ',' << shortest(r.sd) << ',' << (r.empty ? 1 : 0) << '\n';
    for (std::size_t f = 0; f < r.fold_values.size(); ++f) {
      out << r.metric << ",fold," << f << ',' << shortest(r.fold_values[f]) << ",,,0\n";
    }
  }
}

void save_reports(const std::vector<EvaluationReport>& reports,
                  const std::filesystem::path& jsonl_path,
                  const std::filesystem::path& csv_path) {
  std::ofstream j(jsonl_path, std::ios::binary | std::ios::trunc);
  std::ofstream c(csv_path, std::ios::binary | std::ios::trunc);
  if (!j || !c) throw EvalError("cannot open report outputs for writing");
  write_reports_jsonl(reports, j);
  write_reports_csv(reports, c);
  if (!j.flush() || !c.flush()) throw EvalError("writing reports failed");
}

}  // namespace crad
