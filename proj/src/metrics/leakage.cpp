#include "hintkit/metrics/leakage.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <vector>

#include "hintkit/error.hpp"
#include "hintkit/kernels.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

std::set<std::string> token_set(std::string_view text, bool include_stopwords) {
  std::set<std::string> out;
  for (auto& tok : tokenize(text))
    if (include_stopwords || !is_stopword(tok)) out.insert(std::move(tok));
  return out;
}

}  // namespace

Score answerleakage_lexical(std::string_view hint, std::span<const std::string> answers, bool include_stopwords) {
  const auto hint_tokens = token_set(hint, include_stopwords);
  double best = 0.0;
  bool any = false;
  for (const auto& answer : answers) {
    const auto answer_tokens = token_set(answer, include_stopwords);
    if (answer_tokens.empty()) continue;
    any = true;
    std::size_t shared = 0;
    for (const auto& t : answer_tokens) shared += hint_tokens.count(t);
    best = std::max(best, static_cast<double>(shared) / static_cast<double>(answer_tokens.size()));
  }
  if (!any) return {0.0, Json{{"no_answer_tokens", true}}};
  return {best, std::nullopt};
}

double answerleakage_contextual(std::string_view hint, std::span<const std::string> answers,
                                EmbeddingClient& embedder) {
  const auto hint_tokens = token_set(hint, true);
  if (hint_tokens.empty()) return 0.0;
  std::vector<std::set<std::string>> answer_tokens;
  std::set<std::string> vocabulary(hint_tokens);
  for (const auto& a : answers) {
    auto tokens = token_set(a, true);
    if (tokens.empty()) continue;
    vocabulary.insert(tokens.begin(), tokens.end());
    answer_tokens.push_back(std::move(tokens));
  }
  if (answer_tokens.empty()) return 0.0;

  const std::vector<std::string> texts(vocabulary.begin(), vocabulary.end());
  const auto vecs = embedder.embed(texts);
  if (vecs.size() != texts.size()) throw Error(ErrorKind::TransportError, "embedder returned the wrong number of vectors");
  std::map<std::string_view, std::span<const float>> lookup;
  for (std::size_t i = 0; i < texts.size(); ++i) lookup.emplace(texts[i], vecs[i].values);

  double best = 0.0;
  for (const auto& tokens : answer_tokens)
    for (const auto& a : tokens)
      for (const auto& h : hint_tokens) best = std::max(best, kernels::cosine(lookup.at(h), lookup.at(a)));
  return std::min(best, 1.0);
}

}  // namespace hintkit
