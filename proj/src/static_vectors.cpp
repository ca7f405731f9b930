#include "hintkit/static_vectors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hintkit/error.hpp"

namespace hintkit {

namespace {

bool parse_float(std::string_view field, float& out) {
  const auto* first = field.data();
  const auto* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

std::span<const float> StaticVectors::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return {};
  return std::span<const float>(values_).subspan(it->second * dimension_, dimension_);
}

StaticVectors StaticVectors::parse(std::istream& in) {
  StaticVectors table;
  std::string line;
  std::size_t lineno = 0;
  std::vector<float> row;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;  // blank line
    row.clear();
    std::string field;
    while (fields >> field) {
      float v = 0.0f;
      if (!parse_float(field, v))
        throw Error(ErrorKind::MalformedLine, "\"" + field + "\" is not a number", std::to_string(lineno));
      row.push_back(v);
    }
    if (row.empty()) throw Error(ErrorKind::MalformedLine, "token without vector values", std::to_string(lineno));
    if (table.dimension_ == 0) table.dimension_ = row.size();
    if (row.size() != table.dimension_)
      throw Error(ErrorKind::InconsistentDimension,
                  "expected " + std::to_string(table.dimension_) + " values, found " + std::to_string(row.size()),
                  std::to_string(lineno));
    if (table.index_.contains(token)) {
      table.warnings_.push_back("line " + std::to_string(lineno) + ": duplicate token \"" + token +
                                "\" ignored, keeping first occurrence");
      spdlog::warn("static vectors: {}", table.warnings_.back());
      continue;
    }
    table.index_.emplace(token, table.index_.size());
    table.values_.insert(table.values_.end(), row.begin(), row.end());
  }
  return table;
}

StaticVectors StaticVectors::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
  return parse(in);
}

}  // namespace hintkit
