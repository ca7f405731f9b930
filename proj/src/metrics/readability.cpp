#include "hintkit/metrics/readability.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"

namespace hintkit {

namespace {

constexpr std::array<std::string_view, 6> kFeatures{"words_per_sentence", "syllables_per_word", "complex_word_ratio",
                                                    "letters_per_word",   "type_token_ratio",   "stopword_ratio"};

void require_words(const TextStats& stats) {
  if (stats.words == 0) throw Error(ErrorKind::EmptyText, "text has no words");
}

double total_syllables(const TextStats& stats) {
  double total = 0.0;
  for (int s : stats.syllables_per_token) total += s;
  return total;
}

}  // namespace

std::string_view to_string(ReadabilityFormula formula) noexcept {
  switch (formula) {
    case ReadabilityFormula::flesch: return "flesch";
    case ReadabilityFormula::gunning_fog: return "gunning_fog";
    case ReadabilityFormula::coleman_liau: return "coleman_liau";
    case ReadabilityFormula::smog: return "smog";
    case ReadabilityFormula::ari: return "ari";
  }
  return "?";
}

std::optional<ReadabilityFormula> parse_readability_formula(std::string_view text) noexcept {
  for (auto f : {ReadabilityFormula::flesch, ReadabilityFormula::gunning_fog, ReadabilityFormula::coleman_liau,
                 ReadabilityFormula::smog, ReadabilityFormula::ari})
    if (to_string(f) == text) return f;
  return std::nullopt;
}

std::size_t complex_word_count(const TextStats& stats) {
  return static_cast<std::size_t>(
      std::count_if(stats.syllables_per_token.begin(), stats.syllables_per_token.end(), [](int s) { return s >= 3; }));
}

double readability_raw(const TextStats& stats, ReadabilityFormula formula) {
  require_words(stats);
  const double words = static_cast<double>(stats.words);
  const double sentences = static_cast<double>(std::max<std::size_t>(stats.sentences, 1));
  const double complex = static_cast<double>(complex_word_count(stats));
  const double letters = static_cast<double>(stats.letters);
  switch (formula) {
    case ReadabilityFormula::flesch:
      return 206.835 - 1.015 * (words / sentences) - 84.6 * (total_syllables(stats) / words);
    case ReadabilityFormula::gunning_fog:
      return 0.4 * (words / sentences + 100.0 * (complex / words));
    case ReadabilityFormula::coleman_liau:
      return 0.0588 * (letters / words * 100.0) - 0.296 * (sentences / words * 100.0) - 15.8;
    case ReadabilityFormula::smog:
      return 1.0430 * std::sqrt(complex * 30.0 / sentences) + 3.1291;
    case ReadabilityFormula::ari:
      return 4.71 * (letters / words) + 0.5 * (words / sentences) - 21.43;
  }
  return 0.0;
}

int readability_level(ReadabilityFormula formula, double raw, const ReadabilityBands& bands) {
  if (formula == ReadabilityFormula::flesch) {
    if (raw >= bands.flesch_easy) return 0;
    if (raw >= bands.flesch_medium) return 1;
    return 2;
  }
  if (raw <= bands.grade_easy) return 0;
  if (raw <= bands.grade_medium) return 1;
  return 2;
}

ReadabilityResult readability_traditional(std::string_view text, ReadabilityFormula formula,
                                          const ReadabilityBands& bands) {
  const auto stats = analyze_text(text);
  const double raw = readability_raw(stats, formula);
  return {raw, readability_level(formula, raw, bands)};
}

std::span<const std::string_view> readability_feature_names() { return kFeatures; }

double readability_feature(const TextStats& stats, std::string_view name) {
  require_words(stats);
  const double words = static_cast<double>(stats.words);
  if (name == "words_per_sentence") return words / static_cast<double>(std::max<std::size_t>(stats.sentences, 1));
  if (name == "syllables_per_word") return total_syllables(stats) / words;
  if (name == "complex_word_ratio") return static_cast<double>(complex_word_count(stats)) / words;
  if (name == "letters_per_word") return static_cast<double>(stats.letters) / words;
  if (name == "type_token_ratio")
    return static_cast<double>(std::set<std::string>(stats.tokens.begin(), stats.tokens.end()).size()) / words;
  if (name == "stopword_ratio")
    return static_cast<double>(std::count_if(stats.tokens.begin(), stats.tokens.end(),
                                             [](const std::string& t) { return is_stopword(t); })) /
           words;
  throw Error(ErrorKind::UnknownFeature, "unsupported readability feature", std::string(name));
}

LinearScorer LinearScorer::parse(std::string_view json_text) {
  LinearScorer s;
  try {
    const auto j = Json::parse(json_text);
    s.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    s.weights = j.at("weights").get<std::vector<double>>();
    s.bias = j.at("bias").get<double>();
    const auto t = j.at("class_thresholds").get<std::vector<double>>();
    if (t.size() != 2) throw Error(ErrorKind::ConfigError, "class_thresholds needs exactly two values");
    s.class_thresholds = {t[0], t[1]};
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("bad linear scorer file: ") + e.what());
  }
  s.validate();
  return s;
}

LinearScorer LinearScorer::load(const std::filesystem::path& path) {
  try {
    return parse(read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Io) throw;
    throw Error(e.kind(), e.what(), path.string());
  }
}

void LinearScorer::validate() const {
  if (weights.size() != feature_names.size())
    throw Error(ErrorKind::ConfigError, "weights and feature_names differ in length");
  for (const auto& name : feature_names)
    if (std::find(kFeatures.begin(), kFeatures.end(), name) == kFeatures.end())
      throw Error(ErrorKind::UnknownFeature, "unsupported readability feature", name);
  if (!(class_thresholds[0] <= class_thresholds[1]))
    throw Error(ErrorKind::ConfigError, "class_thresholds must be nondecreasing");
}

double LinearScorer::score(const TextStats& stats) const {
  double s = bias;
  for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * readability_feature(stats, feature_names[i]);
  return s;
}

int LinearScorer::level(double score) const {
  if (score < class_thresholds[0]) return 0;
  if (score < class_thresholds[1]) return 1;
  return 2;
}

int readability_linear(std::string_view text, const LinearScorer& scorer) {
  const auto stats = analyze_text(text);
  require_words(stats);
  return scorer.level(scorer.score(stats));
}

int parse_readability_reply(std::string_view reply) {
  std::set<int> found;
  for (const auto& tok : tokenize(reply)) {
    if (tok == "beginner") found.insert(0);
    if (tok == "intermediate") found.insert(1);
    if (tok == "advanced") found.insert(2);
  }
  if (found.size() != 1)
    throw Error(ErrorKind::UnparseableCompletion, "expected one of Beginner/Intermediate/Advanced",
                std::string(reply.substr(0, 80)));
  return *found.begin();
}

int readability_llm(std::string_view text, ChatClient& chat, const ReadabilityLlmOptions& options) {
  ChatRequest req;
  req.model = options.model;
  req.temperature = options.temperature;
  req.seed = options.seed;
  req.max_tokens = 16;
  req.messages = {{"system",
                   "Rate how hard the given text is to read for a general adult audience. Reply with exactly one "
                   "word: Beginner, Intermediate, or Advanced."},
                  {"user", "Text: " + std::string(text)}};
  return parse_readability_reply(chat.complete(req));
}

}  // namespace hintkit
