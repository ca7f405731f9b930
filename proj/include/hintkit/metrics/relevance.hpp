#pragma once

// Relevance of a hint to its question, in [0,1].

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "hintkit/clients.hpp"
#include "hintkit/metrics/score.hpp"
#include "hintkit/static_vectors.hpp"

namespace hintkit {

enum class RougeVariant { rouge1, rouge2, rougeL };

std::string_view to_string(RougeVariant variant) noexcept;
std::optional<RougeVariant> parse_rouge_variant(std::string_view text) noexcept;

/// F1 of clipped n-gram overlap (rouge1/rouge2) or of the longest common
/// subsequence (rougeL), computed as 2*overlap / (|candidate| + |reference|).
/// Either side empty gives 0. When both sides are too short to hold an n-gram,
/// the score is 1 if the token sequences are equal and 0 otherwise.
double rouge_score(std::span<const std::string> candidate, std::span<const std::string> reference,
                   RougeVariant variant);
double relevance_rouge(std::string_view hint, std::string_view question, RougeVariant variant);

/// Cosine of mean-pooled in-vocabulary token vectors, clamped to [0,1]. A side
/// with no in-vocabulary token scores 0 with detail {"oov": "hint"|"question"|"both"}.
Score relevance_static_embedding(std::string_view hint, std::string_view question, const StaticVectors& vectors);

double relevance_contextual(std::string_view hint, std::string_view question, EmbeddingClient& embedder);

struct RelevanceLlmOptions {
  int num_questions = 3;
  std::string model = "default";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

/// Asks the chat model for questions the hint answers and averages their
/// clamped cosine similarity to the real question.
Score relevance_llm(std::string_view hint, std::string_view question, ChatClient& chat, EmbeddingClient& embedder,
                    const RelevanceLlmOptions& options = {});

}  // namespace hintkit
