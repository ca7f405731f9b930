#include "hintkit/report.hpp"

#include <cstdio>
#include <set>

#include "hintkit/error.hpp"

namespace hintkit {

namespace {

constexpr std::string_view kCrlf = "\r\n";

std::string shortest(double value) { return Json(value).dump(); }

template <typename Fn>
void for_each_metric_map(const Instance& inst, Fn&& fn) {
  fn("question", std::size_t{0}, inst.question.metrics);
  for (std::size_t i = 0; i < inst.answers.size(); ++i) fn("answer", i, inst.answers[i].metrics);
  for (std::size_t i = 0; i < inst.hints.size(); ++i) fn("hint", i, inst.hints[i].metrics);
}

}  // namespace

std::optional<ReportFormat> parse_report_format(std::string_view text) noexcept {
  if (text == "csv") return ReportFormat::csv;
  if (text == "json") return ReportFormat::json;
  if (text == "md" || text == "markdown") return ReportFormat::md;
  return std::nullopt;
}

std::string format_two_decimals(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", value);
  std::string out(buf);
  if (out == "-0.00") out = "0.00";
  return out;
}

std::string csv_field(std::string_view text) {
  if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
  std::string out = "\"";
  for (char c : text) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

ReportTable build_report(const Dataset& dataset) {
  ReportTable table;
  std::set<std::string> columns;
  for (const auto& [name, subset] : dataset.subsets) {
    ReportRow row;
    row.subset = name;
    std::map<std::string, double> totals;
    for (const auto& [_, inst] : subset.instances)
      for_each_metric_map(inst, [&](std::string_view, std::size_t, const MetricMap& metrics) {
        for (const auto& [metric, result] : metrics) {
          totals[metric] += result.value;
          ++row.counts[metric];
        }
      });
    for (const auto& [metric, total] : totals) {
      row.means[metric] = total / static_cast<double>(row.counts[metric]);
      columns.insert(metric);
    }
    table.rows.push_back(std::move(row));
  }
  if (columns.empty()) throw Error(ErrorKind::NoMetricsFound, "the dataset holds no metric results", dataset.name);
  table.columns.assign(columns.begin(), columns.end());
  return table;
}

std::string render_csv(const ReportTable& table) {
  std::string out = "subset";
  for (const auto& c : table.columns) out += "," + csv_field(c);
  out += kCrlf;
  for (const auto& row : table.rows) {
    out += csv_field(row.subset);
    for (const auto& c : table.columns) {
      out += ',';
      if (auto it = row.means.find(c); it != row.means.end()) out += format_two_decimals(it->second);
    }
    out += kCrlf;
  }
  return out;
}

std::string render_markdown(const ReportTable& table) {
  auto escape = [](std::string_view s) {
    std::string out;
    for (char c : s) {
      if (c == '|') out += '\\';
      out += c;
    }
    return out;
  };
  std::string out = "| subset |";
  std::string rule = "|---|";
  for (const auto& c : table.columns) {
    out += " " + escape(c) + " |";
    rule += "---:|";
  }
  out += "\n" + rule + "\n";
  for (const auto& row : table.rows) {
    out += "| " + escape(row.subset) + " |";
    for (const auto& c : table.columns) {
      auto it = row.means.find(c);
      out += " " + (it != row.means.end() ? format_two_decimals(it->second) : std::string()) + " |";
    }
    out += "\n";
  }
  return out;
}

std::string render_json(const ReportTable& table) {
  nlohmann::ordered_json j;
  j["columns"] = table.columns;
  j["subsets"] = nlohmann::ordered_json::object();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json means = nlohmann::ordered_json::object();
    nlohmann::ordered_json counts = nlohmann::ordered_json::object();
    for (const auto& [k, v] : row.means) means[k] = v;
    for (const auto& [k, v] : row.counts) counts[k] = v;
    j["subsets"][row.subset] = {{"means", std::move(means)}, {"counts", std::move(counts)}};
  }
  return j.dump(2) + "\n";
}

std::string render_long_csv(const Dataset& dataset) {
  std::string out = "subset,q_id,target,index,metric,value";
  out += kCrlf;
  bool any = false;
  for (const auto& [name, subset] : dataset.subsets)
    for (const auto& [q_id, inst] : subset.instances)
      for_each_metric_map(inst, [&](std::string_view target, std::size_t index, const MetricMap& metrics) {
        for (const auto& [metric, result] : metrics) {
          any = true;
          out += csv_field(name) + "," + csv_field(q_id) + "," + std::string(target) + "," + std::to_string(index) +
                 "," + csv_field(metric) + "," + shortest(result.value);
          out += kCrlf;
        }
      });
  if (!any) throw Error(ErrorKind::NoMetricsFound, "the dataset holds no metric results", dataset.name);
  return out;
}

std::string render_report(const Dataset& dataset, ReportFormat format, bool long_format) {
  if (long_format) {
    if (format != ReportFormat::csv) throw Error(ErrorKind::InvalidArgument, "--long is only available for csv");
    return render_long_csv(dataset);
  }
  const auto table = build_report(dataset);
  switch (format) {
    case ReportFormat::csv: return render_csv(table);
    case ReportFormat::md: return render_markdown(table);
    case ReportFormat::json: return render_json(table);
  }
  return {};
}

}  // namespace hintkit
