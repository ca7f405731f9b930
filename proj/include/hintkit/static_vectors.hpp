#pragma once

// Word-vector tables in the whitespace-separated GloVe text format:
//   token v1 v2 ... vD

#include <cstddef>
#include <filesystem>
#include <istream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace hintkit {

class StaticVectors {
 public:
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return index_.size(); }
  /// Empty span for out-of-vocabulary tokens.
  std::span<const float> find(std::string_view token) const;
  bool contains(std::string_view token) const { return !find(token).empty(); }

  /// Duplicate tokens and similar non-fatal findings, one line each.
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Throws MalformedLine / InconsistentDimension with the 1-based line number
  /// as the error path. Duplicate tokens keep their first vector.
  static StaticVectors parse(std::istream& in);
  static StaticVectors load(const std::filesystem::path& path);

 private:
  std::size_t dimension_ = 0;
  std::vector<float> values_;  // row-major, one row per token
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::string> warnings_;
};

inline StaticVectors load_static_vectors(const std::filesystem::path& path) { return StaticVectors::load(path); }

}  // namespace hintkit
