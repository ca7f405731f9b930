#pragma once

// Runs a configured suite of metric methods over a dataset.
//
// Method names are "<metric>/<method>[/<variant>]":
//   relevance/rouge/{rouge1,rouge2,rougeL}          offline
//   relevance/noncontextual/static                  offline, needs a vector file
//   relevance/contextual                            embeddings
//   relevance/llm                                   chat + embeddings
//   readability/traditional/{flesch,gunning_fog,coleman_liau,smog,ari}   offline
//   readability/ml/linear                           offline, needs a scorer file
//   readability/llm                                 chat
//   convergence/llm                                 chat
//   convergence/{specificity,regression}            remote scorer
//   familiarity/wordfreq/{stop,nostop}              offline, needs a frequency table
//   familiarity/wikipedia                           pageviews
//   answerleakage/lexical/{stop,nostop}             offline
//   answerleakage/contextual                        embeddings

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/clients.hpp"
#include "hintkit/enrichment.hpp"
#include "hintkit/metrics/familiarity.hpp"
#include "hintkit/metrics/readability.hpp"
#include "hintkit/model.hpp"
#include "hintkit/static_vectors.hpp"

namespace hintkit {

struct MethodSpec {
  std::string metric;
  std::string method;
  std::string variant;
  Json params = Json::object();
  std::string backend;  // informational: which backend the method resolves to

  std::string name() const;
};

/// Parses "metric/method[/variant]". Throws InvalidArgument.
MethodSpec parse_method_spec(std::string_view text);

struct MetricConfig {
  std::vector<MethodSpec> enabled;
  bool overwrite = false;
  bool familiarity_all_targets = false;  // also score questions and answers
  std::size_t workers = 4;

  /// Throws InvalidArgument on duplicates or unknown methods.
  void validate() const;
};

/// Comma-separated method names.
MetricConfig parse_metric_list(std::string_view list);

/// Every known method name, in table order.
std::vector<std::string> known_methods();
bool method_requires_network(const MethodSpec& spec);

/// rouge1/2/L, all traditional formulas, wordfreq and lexical variants.
std::vector<std::string> default_offline_methods();

struct Backends {
  std::shared_ptr<ChatClient> chat;
  std::shared_ptr<EmbeddingClient> embed;
  std::shared_ptr<PageviewClient> pageviews;
  std::map<std::string, std::shared_ptr<ScorerClient>> scorers;  // keyed "convergence/specificity" etc.
  std::shared_ptr<const StaticVectors> vectors;
  std::shared_ptr<const FrequencyTable> frequencies;
  std::shared_ptr<const LinearScorer> linear_scorer;
  std::shared_ptr<EntityProvider> entities;  // null: builtin heuristic
  ReadabilityBands bands;
  std::string chat_model = "default";
  std::optional<std::int64_t> seed;
  bool offline = false;  // also true when HINTKIT_OFFLINE=1
};

struct EvalTarget {
  enum class Kind { question, answer, hint };
  Kind kind = Kind::hint;
  std::size_t index = 0;
  bool operator==(const EvalTarget&) const = default;
};

std::string_view to_string(EvalTarget::Kind kind) noexcept;
const MetricMap& metrics_of(const Instance& inst, const EvalTarget& target);
const std::string& text_of(const Instance& inst, const EvalTarget& target);

/// Extension point: one implementation per method. `evaluate` returns one
/// result per pending target, in the given order, each named `name()`.
class Evaluator {
 public:
  virtual ~Evaluator() = default;
  virtual std::string name() const = 0;
  virtual bool requires_network() const = 0;
  /// Targets this method scores; hints by default.
  virtual std::vector<EvalTarget> targets(const Instance& inst) const;
  virtual std::vector<MetricResult> evaluate(const Instance& inst, std::span<const EvalTarget> pending) = 0;
};

/// Throws BackendUnavailable when a needed backend is missing.
std::unique_ptr<Evaluator> make_evaluator(const MethodSpec& spec, const Backends& backends,
                                          const MetricConfig& config = {});

struct MethodOutcome {
  std::size_t computed = 0;
  std::size_t skipped = 0;
  bool failed = false;
  std::string error;
};

struct EvaluationSummary {
  std::map<std::string, MethodOutcome> methods;
  /// subset -> method -> mean over every result of that method in the subset.
  std::map<std::string, std::map<std::string, double>> subset_means;

  std::size_t computed() const;
  std::size_t skipped() const;
  bool all_failed() const;
};

/// (done, total) instance counts; nondecreasing.
using ProgressSink = std::function<void(std::size_t, std::size_t)>;

/// Offline mode rejects network methods with BackendUnavailable before any
/// work. Otherwise a method whose backend is missing or that fails at runtime
/// is marked failed in the summary and skipped for the rest of the run;
/// results from other methods are kept.
EvaluationSummary evaluate_dataset(Dataset& dataset, const MetricConfig& config, const Backends& backends,
                                   const ProgressSink& progress = {});

/// Evaluates with caller-supplied evaluators (custom methods).
EvaluationSummary evaluate_dataset(Dataset& dataset, std::span<const std::shared_ptr<Evaluator>> evaluators,
                                   const MetricConfig& config, const ProgressSink& progress = {});

}  // namespace hintkit
