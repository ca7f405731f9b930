#pragma once

// Readability levels: 0 = beginner, 1 = intermediate, 2 = advanced.

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/clients.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

enum class ReadabilityFormula { flesch, gunning_fog, coleman_liau, smog, ari };

std::string_view to_string(ReadabilityFormula formula) noexcept;
std::optional<ReadabilityFormula> parse_readability_formula(std::string_view text) noexcept;

/// Flesch reading ease: >= easy -> 0, >= medium -> 1, else 2.
/// Grade-level formulas: <= easy -> 0, <= medium -> 1, else 2.
struct ReadabilityBands {
  double flesch_easy = 70.0;
  double flesch_medium = 50.0;
  double grade_easy = 8.0;
  double grade_medium = 12.0;
};

struct ReadabilityResult {
  double raw = 0.0;
  int level = 0;
};

/// Number of tokens with at least three syllables.
std::size_t complex_word_count(const TextStats& stats);

/// Throws EmptyText when the text has no words.
double readability_raw(const TextStats& stats, ReadabilityFormula formula);
int readability_level(ReadabilityFormula formula, double raw, const ReadabilityBands& bands = {});
ReadabilityResult readability_traditional(std::string_view text, ReadabilityFormula formula,
                                          const ReadabilityBands& bands = {});

/// Features available to a linear scorer: words_per_sentence,
/// syllables_per_word, complex_word_ratio, letters_per_word,
/// type_token_ratio, stopword_ratio.
std::span<const std::string_view> readability_feature_names();
double readability_feature(const TextStats& stats, std::string_view name);

/// JSON file {"feature_names": [...], "weights": [...], "bias": b,
/// "class_thresholds": [t0, t1]}. Level is 0 below t0, 1 below t1, else 2.
struct LinearScorer {
  std::vector<std::string> feature_names;
  std::vector<double> weights;
  double bias = 0.0;
  std::array<double, 2> class_thresholds{0.0, 0.0};

  /// Throws UnknownFeature or ConfigError.
  static LinearScorer parse(std::string_view json_text);
  static LinearScorer load(const std::filesystem::path& path);
  void validate() const;

  double score(const TextStats& stats) const;
  int level(double score) const;
};

int readability_linear(std::string_view text, const LinearScorer& scorer);

/// Finds exactly one of beginner/intermediate/advanced as a word in the reply,
/// ignoring case and punctuation. Throws UnparseableCompletion otherwise.
int parse_readability_reply(std::string_view reply);

struct ReadabilityLlmOptions {
  std::string model = "default";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

int readability_llm(std::string_view text, ChatClient& chat, const ReadabilityLlmOptions& options = {});

}  // namespace hintkit
