#pragma once

// Per-subset summaries of the metric results stored in a dataset.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/model.hpp"

namespace hintkit {

enum class ReportFormat { csv, json, md };

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept;

struct ReportRow {
  std::string subset;
  std::map<std::string, double> means;         // only metrics present in the subset
  std::map<std::string, std::size_t> counts;
};

struct ReportTable {
  std::vector<std::string> columns;  // metric names, sorted
  std::vector<ReportRow> rows;       // one per subset, sorted
};

/// Mean of every metric result name over questions, answers and hints of
/// each subset. Throws NoMetricsFound when the dataset holds no results.
ReportTable build_report(const Dataset& dataset);

/// RFC 4180 (CRLF line ends), header "subset,<columns>", two decimals.
/// Missing cells are empty.
std::string render_csv(const ReportTable& table);
/// Pipe table with the same rounded numbers as the CSV.
std::string render_markdown(const ReportTable& table);
/// Full-precision JSON: {"columns": [...], "subsets": {name: {"means": {...}, "counts": {...}}}}.
std::string render_json(const ReportTable& table);

/// One row per stored result: subset,q_id,target,index,metric,value
/// (value in shortest round-trip form).
std::string render_long_csv(const Dataset& dataset);

std::string render_report(const Dataset& dataset, ReportFormat format, bool long_format = false);

/// "%.2f" without a negative zero.
std::string format_two_decimals(double value);

/// Quotes a field when it contains a comma, quote, CR or LF.
std::string csv_field(std::string_view text);

}  // namespace hintkit
