#include "hintkit/metrics/relevance.hpp"

#include <algorithm>
#include <map>
#include <vector>

#include "hintkit/error.hpp"
#include "hintkit/generation.hpp"
#include "hintkit/kernels.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

using Gram = std::span<const std::string>;

struct GramLess {
  bool operator()(Gram a, Gram b) const { return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end()); }
};

std::map<Gram, std::size_t, GramLess> ngram_counts(std::span<const std::string> tokens, std::size_t n) {
  std::map<Gram, std::size_t, GramLess> counts;
  for (std::size_t i = 0; i + n <= tokens.size(); ++i) ++counts[tokens.subspan(i, n)];
  return counts;
}

double f1(std::size_t overlap, std::size_t candidate_total, std::size_t reference_total) {
  if (overlap == 0) return 0.0;
  return static_cast<double>(2 * overlap) / static_cast<double>(candidate_total + reference_total);
}

double rouge_n(std::span<const std::string> cand, std::span<const std::string> ref, std::size_t n) {
  if (cand.size() < n && ref.size() < n) return std::equal(cand.begin(), cand.end(), ref.begin(), ref.end()) ? 1.0 : 0.0;
  if (cand.size() < n || ref.size() < n) return 0.0;
  const auto c = ngram_counts(cand, n);
  const auto r = ngram_counts(ref, n);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : c)
    if (auto it = r.find(gram); it != r.end()) overlap += std::min(count, it->second);
  return f1(overlap, cand.size() - n + 1, ref.size() - n + 1);
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j)
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Mean of in-vocabulary token vectors; empty when none is in the table.
std::vector<double> mean_pool(std::string_view text, const StaticVectors& vectors) {
  std::vector<double> acc(vectors.dimension(), 0.0);
  std::size_t found = 0;
  for (const auto& tok : tokenize(text)) {
    const auto v = vectors.find(tok);
    if (v.empty()) continue;
    kernels::accumulate(acc, v);
    ++found;
  }
  if (found == 0) return {};
  for (auto& x : acc) x /= static_cast<double>(found);
  return acc;
}

}  // namespace

std::string_view to_string(RougeVariant variant) noexcept {
  switch (variant) {
    case RougeVariant::rouge1: return "rouge1";
    case RougeVariant::rouge2: return "rouge2";
    case RougeVariant::rougeL: return "rougeL";
  }
  return "?";
}

std::optional<RougeVariant> parse_rouge_variant(std::string_view text) noexcept {
  if (text == "rouge1") return RougeVariant::rouge1;
  if (text == "rouge2") return RougeVariant::rouge2;
  if (text == "rougeL") return RougeVariant::rougeL;
  return std::nullopt;
}

double rouge_score(std::span<const std::string> candidate, std::span<const std::string> reference,
                   RougeVariant variant) {
  if (candidate.empty() || reference.empty()) return 0.0;
  switch (variant) {
    case RougeVariant::rouge1: return rouge_n(candidate, reference, 1);
    case RougeVariant::rouge2: return rouge_n(candidate, reference, 2);
    case RougeVariant::rougeL: return f1(lcs_length(candidate, reference), candidate.size(), reference.size());
  }
  return 0.0;
}

double relevance_rouge(std::string_view hint, std::string_view question, RougeVariant variant) {
  const auto h = tokenize(hint);
  const auto q = tokenize(question);
  return rouge_score(h, q, variant);
}

Score relevance_static_embedding(std::string_view hint, std::string_view question, const StaticVectors& vectors) {
  const auto h = mean_pool(hint, vectors);
  const auto q = mean_pool(question, vectors);
  if (h.empty() || q.empty()) {
    const char* side = h.empty() && q.empty() ? "both" : (h.empty() ? "hint" : "question");
    return {0.0, Json{{"oov", side}}};
  }
  return {clamp_unit(kernels::cosine(std::span<const double>(h), std::span<const double>(q))), std::nullopt};
}

double relevance_contextual(std::string_view hint, std::string_view question, EmbeddingClient& embedder) {
  const std::vector<std::string> texts{std::string(hint), std::string(question)};
  const auto vecs = embedder.embed(texts);
  if (vecs.size() != 2) throw Error(ErrorKind::TransportError, "embedder returned the wrong number of vectors");
  return clamp_unit(kernels::cosine(std::span<const float>(vecs[0].values), std::span<const float>(vecs[1].values)));
}

Score relevance_llm(std::string_view hint, std::string_view question, ChatClient& chat, EmbeddingClient& embedder,
                    const RelevanceLlmOptions& options) {
  if (options.num_questions < 1) throw Error(ErrorKind::InvalidArgument, "num_questions must be at least 1");
  ChatRequest req;
  req.model = options.model;
  req.temperature = options.temperature;
  req.seed = options.seed;
  req.messages = {
      {"system", "Treat the given statement as an answer. Write " + std::to_string(options.num_questions) +
                     " different questions that it answers. Reply with a numbered list, one question per line, "
                     "and nothing else."},
      {"user", "Statement: " + std::string(hint)}};
  const auto synthetic = parse_hint_list(chat.complete(req), options.num_questions);

  std::vector<std::string> texts{std::string(question)};
  texts.insert(texts.end(), synthetic.begin(), synthetic.end());
  const auto vecs = embedder.embed(texts);
  if (vecs.size() != texts.size()) throw Error(ErrorKind::TransportError, "embedder returned the wrong number of vectors");

  double total = 0.0;
  Json sims = Json::array();
  for (std::size_t i = 1; i < vecs.size(); ++i) {
    const double s =
        clamp_unit(kernels::cosine(std::span<const float>(vecs[0].values), std::span<const float>(vecs[i].values)));
    sims.push_back(s);
    total += s;
  }
  return {total / static_cast<double>(synthetic.size()), Json{{"questions", synthetic}, {"similarities", sims}}};
}

}  // namespace hintkit
