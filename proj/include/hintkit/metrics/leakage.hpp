#pragma once

// Answer leakage: how much of the answer a hint gives away, in [0,1].

#include <span>
#include <string>
#include <string_view>

#include "hintkit/clients.hpp"
#include "hintkit/metrics/score.hpp"

namespace hintkit {

/// max over answers of |A ∩ H| / |A| on token sets, stopwords optionally
/// removed from both. Answers with no tokens left are skipped; if all are
/// skipped the score is 0 with {"no_answer_tokens": true}.
Score answerleakage_lexical(std::string_view hint, std::span<const std::string> answers, bool include_stopwords);

/// Max cosine similarity between any hint token and any answer token,
/// clamped to [0,1]. Distinct tokens are embedded in one batched request.
double answerleakage_contextual(std::string_view hint, std::span<const std::string> answers,
                                EmbeddingClient& embedder);

}  // namespace hintkit
