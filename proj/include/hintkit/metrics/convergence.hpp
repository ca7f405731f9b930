#pragma once

// Convergence: how far a hint narrows the candidate answers toward the gold one.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/clients.hpp"

namespace hintkit {

struct ConvergenceCandidate {
  std::string text;
  bool is_gold = false;
};

struct HintConvergence {
  std::vector<std::size_t> eliminated;  // candidate indices judged implausible
  bool survived_gold = true;
  bool no_incorrect = false;  // no incorrect candidate existed; score fixed at 1
  double score = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceCandidate> candidates;
  std::vector<HintConvergence> per_hint;
};

/// eliminated incorrect / total incorrect, zeroed if any gold candidate is
/// eliminated; 1 when there are no incorrect candidates.
HintConvergence convergence_from_judgements(std::span<const ConvergenceCandidate> candidates,
                                            std::span<const std::size_t> eliminated);

/// "yes..." -> true (still plausible), "no..." -> false (eliminated).
/// Throws UnparseableCompletion for anything else.
bool parse_judge_reply(std::string_view reply);

struct ConvergenceOptions {
  int num_candidates = 10;
  std::string model = "default";
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

/// One chat call lists candidate answers; then one judge call per (hint,
/// candidate) pair, hint-major.
ConvergenceReport convergence_llm(std::string_view question, std::span<const std::string> gold_answers,
                                  std::span<const std::string> hints, ChatClient& chat,
                                  const ConvergenceOptions& options = {});

/// Per-hint scores from a remote specificity/regression endpoint, clamped to [0,1].
std::vector<double> convergence_scored(std::span<const std::string> hints, ScorerClient& scorer);

}  // namespace hintkit
