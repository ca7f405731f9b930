#include "hintkit/metrics/familiarity.hpp"

#include <cmath>
#include <fstream>

#include "hintkit/error.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

FrequencyTable::FrequencyTable(std::unordered_map<std::string, double> values) : values_(std::move(values)) {}

FrequencyTable FrequencyTable::parse(std::istream& in) {
  std::unordered_map<std::string, double> values;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0)
      throw Error(ErrorKind::MalformedLine, "expected token<TAB>value", std::to_string(lineno));
    const auto value_text = line.substr(tab + 1);
    double value = 0.0;
    std::size_t used = 0;
    try {
      value = std::stod(value_text, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value_text.size())
      throw Error(ErrorKind::MalformedLine, "value is not a number", std::to_string(lineno));
    if (!(value >= 0.0 && value <= 1.0))
      throw Error(ErrorKind::OutOfRange, "familiarity must be within [0,1]", std::to_string(lineno));
    values.try_emplace(to_lower(line.substr(0, tab)), value);
  }
  return FrequencyTable(std::move(values));
}

FrequencyTable FrequencyTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open frequency table", path.string());
  return parse(in);
}

std::optional<double> FrequencyTable::find(std::string_view token) const {
  auto it = values_.find(std::string(token));
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Score familiarity_wordfreq(std::string_view text, const FrequencyTable& table, bool include_stopwords) {
  double total = 0.0;
  std::size_t count = 0;
  for (const auto& tok : tokenize(text)) {
    if (!include_stopwords && is_stopword(tok)) continue;
    total += table.find(tok).value_or(0.0);
    ++count;
  }
  if (count == 0) return {0.0, Json{{"empty", true}}};
  return {clamp_unit(total / static_cast<double>(count)), std::nullopt};
}

double entity_familiarity(std::int64_t views) {
  if (views <= 0) return 0.0;
  return std::min(1.0, std::log10(1.0 + static_cast<double>(views)) / 6.0);
}

Score familiarity_wikipedia(std::span<const std::string> entity_titles, PageviewClient& pageviews, int window_days) {
  if (entity_titles.empty()) return {1.0, Json{{"no_entity", true}}};
  double total = 0.0;
  Json missing = Json::array();
  for (const auto& title : entity_titles) {
    const auto result = pageviews.pageviews(title, window_days);
    if (result.not_found) missing.push_back(title);
    total += entity_familiarity(result.views);
  }
  std::optional<Json> detail;
  if (!missing.empty()) detail = Json{{"not_found", missing}};
  return {clamp_unit(total / static_cast<double>(entity_titles.size())), detail};
}

}  // namespace hintkit
