#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "crad/eval.hpp"

namespace crad {

/// One JSON object per report (and nothing else) per line.
std::string report_to_json(const EvaluationReport& report);
void write_reports_jsonl(const std::vector<EvaluationReport>& reports, std::ostream& out);

/// Flat table: metric,row,index,value,n_items,sd,empty. `row` is "summary"
/// for the headline value and "fold" for each entry of fold_values.
void write_reports_csv(const std::vector<EvaluationReport>& reports, std::ostream& out);

void save_reports(const std::vector<EvaluationReport>& reports,
                  const std::filesystem::path& jsonl_path,
                  const std::filesystem::path& csv_path);

}  // namespace crad
