#include "hintkit/metrics/convergence.hpp"

#include <algorithm>
#include <cmath>

#include "hintkit/error.hpp"
#include "hintkit/generation.hpp"
#include "hintkit/metrics/score.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

std::string normalized(std::string_view s) {
  std::string out;
  for (const auto& t : tokenize(s)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

ChatRequest base_request(const ConvergenceOptions& options) {
  ChatRequest req;
  req.model = options.model;
  req.temperature = options.temperature;
  req.seed = options.seed;
  return req;
}

}  // namespace

HintConvergence convergence_from_judgements(std::span<const ConvergenceCandidate> candidates,
                                            std::span<const std::size_t> eliminated) {
  HintConvergence out;
  out.eliminated.assign(eliminated.begin(), eliminated.end());
  std::sort(out.eliminated.begin(), out.eliminated.end());
  out.eliminated.erase(std::unique(out.eliminated.begin(), out.eliminated.end()), out.eliminated.end());

  std::size_t incorrect = 0, incorrect_eliminated = 0;
  for (const auto& c : candidates) incorrect += c.is_gold ? 0 : 1;
  for (auto idx : out.eliminated) {
    if (idx >= candidates.size()) throw Error(ErrorKind::OutOfRange, "candidate index out of range");
    if (candidates[idx].is_gold)
      out.survived_gold = false;
    else
      ++incorrect_eliminated;
  }
  if (incorrect == 0) {
    out.no_incorrect = true;
    out.score = out.survived_gold ? 1.0 : 0.0;
    return out;
  }
  out.score = out.survived_gold ? static_cast<double>(incorrect_eliminated) / static_cast<double>(incorrect) : 0.0;
  return out;
}

bool parse_judge_reply(std::string_view reply) {
  const auto tokens = tokenize(reply);
  if (!tokens.empty()) {
    if (tokens.front() == "yes") return true;
    if (tokens.front() == "no") return false;
  }
  throw Error(ErrorKind::UnparseableCompletion, "judge reply is neither yes nor no", std::string(reply.substr(0, 80)));
}

ConvergenceReport convergence_llm(std::string_view question, std::span<const std::string> gold_answers,
                                  std::span<const std::string> hints, ChatClient& chat,
                                  const ConvergenceOptions& options) {
  if (options.num_candidates < 2) throw Error(ErrorKind::InvalidArgument, "need at least two candidates");

  auto req = base_request(options);
  req.messages = {{"system", "List " + std::to_string(options.num_candidates) +
                                 " different plausible answers to the question. Reply with a numbered list, one "
                                 "short answer per line, and nothing else."},
                  {"user", "Question: " + std::string(question)}};
  const auto listed = parse_hint_list(chat.complete(req), options.num_candidates);

  std::vector<std::string> gold_keys;
  for (const auto& g : gold_answers)
    if (auto key = normalized(g); !key.empty()) gold_keys.push_back(std::move(key));

  ConvergenceReport report;
  for (const auto& text : listed) {
    const auto key = normalized(text);
    const bool gold = std::find(gold_keys.begin(), gold_keys.end(), key) != gold_keys.end();
    report.candidates.push_back({text, gold});
  }

  for (const auto& hint : hints) {
    std::vector<std::size_t> eliminated;
    for (std::size_t c = 0; c < report.candidates.size(); ++c) {
      auto judge = base_request(options);
      judge.max_tokens = 8;
      judge.messages = {{"system",
                         "You judge whether a candidate answer is still plausible after reading a hint. Reply with "
                         "yes or no only."},
                        {"user", "Question: " + std::string(question) + "\nHint: " + hint +
                                     "\nCandidate answer: " + report.candidates[c].text +
                                     "\nIs the candidate answer still plausible given the hint?"}};
      if (!parse_judge_reply(chat.complete(judge))) eliminated.push_back(c);
    }
    report.per_hint.push_back(convergence_from_judgements(report.candidates, eliminated));
  }
  return report;
}

std::vector<double> convergence_scored(std::span<const std::string> hints, ScorerClient& scorer) {
  auto scores = scorer.score(hints);
  if (scores.size() != hints.size()) throw Error(ErrorKind::TransportError, "scorer returned the wrong number of scores");
  for (auto& s : scores) {
    if (!std::isfinite(s)) throw Error(ErrorKind::TransportError, "scorer returned a non-finite score");
    s = clamp_unit(s);
  }
  return scores;
}

}  // namespace hintkit
