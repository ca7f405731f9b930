#pragma once

// Familiarity of a text's words and entities to a general audience, in [0,1].

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>

#include "hintkit/clients.hpp"
#include "hintkit/metrics/score.hpp"

namespace hintkit {

/// token -> normalized familiarity in [0,1], one "token<TAB>value" per line.
/// Blank lines and lines starting with '#' are ignored. Tokens are lowercased.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(std::unordered_map<std::string, double> values);

  /// Throws MalformedLine(lineno) or OutOfRange(lineno).
  static FrequencyTable parse(std::istream& in);
  static FrequencyTable load(const std::filesystem::path& path);

  std::optional<double> find(std::string_view token) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::unordered_map<std::string, double> values_;
};

/// Mean familiarity over tokens; OOV tokens count 0. With no tokens left
/// (after optional stopword removal) the score is 0 with {"empty": true}.
Score familiarity_wordfreq(std::string_view text, const FrequencyTable& table, bool include_stopwords);

/// min(1, log10(1 + views) / 6)
double entity_familiarity(std::int64_t views);

/// Mean entity familiarity from pageviews; 1 with {"no_entity": true} when
/// the list is empty.
Score familiarity_wikipedia(std::span<const std::string> entity_titles, PageviewClient& pageviews,
                            int window_days = kDefaultPageviewWindowDays);

}  // namespace hintkit
