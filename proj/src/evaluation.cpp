#include "hintkit/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <set>

#include <spdlog/spdlog.h>

#include "hintkit/error.hpp"
#include "hintkit/http.hpp"
#include "hintkit/metrics/convergence.hpp"
#include "hintkit/metrics/leakage.hpp"
#include "hintkit/metrics/relevance.hpp"
#include "hintkit/parallel.hpp"

namespace hintkit {

namespace {

struct MethodInfo {
  std::string_view metric;
  std::string_view method;
  std::vector<std::string_view> variants;  // empty: the method takes no variant
  bool network;
};

const std::vector<MethodInfo>& method_table() {
  static const std::vector<MethodInfo> table{
      {"relevance", "rouge", {"rouge1", "rouge2", "rougeL"}, false},
      {"relevance", "noncontextual", {"static"}, false},
      {"relevance", "contextual", {}, true},
      {"relevance", "llm", {}, true},
      {"readability", "traditional", {"flesch", "gunning_fog", "coleman_liau", "smog", "ari"}, false},
      {"readability", "ml", {"linear"}, false},
      {"readability", "llm", {}, true},
      {"convergence", "llm", {}, true},
      {"convergence", "specificity", {}, true},
      {"convergence", "regression", {}, true},
      {"familiarity", "wordfreq", {"stop", "nostop"}, false},
      {"familiarity", "wikipedia", {}, true},
      {"answerleakage", "lexical", {"stop", "nostop"}, false},
      {"answerleakage", "contextual", {}, true},
  };
  return table;
}

const MethodInfo* find_method(const MethodSpec& spec) {
  for (const auto& m : method_table()) {
    if (m.metric != spec.metric || m.method != spec.method) continue;
    const bool ok = m.variants.empty()
                        ? spec.variant.empty()
                        : std::find(m.variants.begin(), m.variants.end(), spec.variant) != m.variants.end();
    return ok ? &m : nullptr;
  }
  return nullptr;
}

[[noreturn]] void unavailable(const std::string& name, const std::string& what) {
  throw Error(ErrorKind::BackendUnavailable, what + " is not configured", name);
}

std::vector<std::string> answer_texts(const Instance& inst) {
  std::vector<std::string> out;
  for (const auto& a : inst.answers) out.push_back(a.text);
  return out;
}

const std::vector<Entity>& entities_of(const Instance& inst, const EvalTarget& t) {
  switch (t.kind) {
    case EvalTarget::Kind::question: return inst.question.entities;
    case EvalTarget::Kind::answer: return inst.answers.at(t.index).entities;
    case EvalTarget::Kind::hint: break;
  }
  return inst.hints.at(t.index).entities;
}

std::vector<EvalTarget> hint_targets(const Instance& inst) {
  std::vector<EvalTarget> out;
  for (std::size_t i = 0; i < inst.hints.size(); ++i) out.push_back({EvalTarget::Kind::hint, i});
  return out;
}

MetricResult to_result(const std::string& name, Score s) { return MetricResult{name, s.value, std::move(s.detail)}; }

using ScoreFn = std::function<Score(const Instance&, const EvalTarget&)>;

// Scores each target independently.
class PerTargetEvaluator final : public Evaluator {
 public:
  PerTargetEvaluator(std::string name, bool network, ScoreFn fn, bool all_targets = false)
      : name_(std::move(name)), network_(network), fn_(std::move(fn)), all_targets_(all_targets) {}

  std::string name() const override { return name_; }
  bool requires_network() const override { return network_; }

  std::vector<EvalTarget> targets(const Instance& inst) const override {
    if (!all_targets_) return hint_targets(inst);
    std::vector<EvalTarget> out{{EvalTarget::Kind::question, 0}};
    for (std::size_t i = 0; i < inst.answers.size(); ++i) out.push_back({EvalTarget::Kind::answer, i});
    auto hints = hint_targets(inst);
    out.insert(out.end(), hints.begin(), hints.end());
    return out;
  }

  std::vector<MetricResult> evaluate(const Instance& inst, std::span<const EvalTarget> pending) override {
    std::vector<MetricResult> out;
    out.reserve(pending.size());
    for (const auto& t : pending) out.push_back(to_result(name_, fn_(inst, t)));
    return out;
  }

 private:
  std::string name_;
  bool network_;
  ScoreFn fn_;
  bool all_targets_;
};

// One candidate list per instance shared by all of its hints.
class ConvergenceLlmEvaluator final : public Evaluator {
 public:
  ConvergenceLlmEvaluator(std::shared_ptr<ChatClient> chat, ConvergenceOptions options)
      : chat_(std::move(chat)), options_(std::move(options)) {}
  std::string name() const override { return "convergence/llm"; }
  bool requires_network() const override { return true; }

  std::vector<MetricResult> evaluate(const Instance& inst, std::span<const EvalTarget> pending) override {
    std::vector<std::string> hints;
    for (const auto& t : pending) hints.push_back(text_of(inst, t));
    const auto answers = answer_texts(inst);
    const auto report = convergence_llm(inst.question.text, answers, hints, *chat_, options_);
    Json candidates = Json::array();
    for (const auto& c : report.candidates) candidates.push_back({{"text", c.text}, {"is_gold", c.is_gold}});
    std::vector<MetricResult> out;
    for (const auto& h : report.per_hint) {
      Json detail{{"candidates", candidates}, {"eliminated", h.eliminated}, {"survived_gold", h.survived_gold}};
      if (h.no_incorrect) detail["no_incorrect_candidates"] = true;
      out.push_back(MetricResult{name(), h.score, std::move(detail)});
    }
    return out;
  }

 private:
  std::shared_ptr<ChatClient> chat_;
  ConvergenceOptions options_;
};

// Sends all pending hints of an instance to a remote scorer in one request.
class RemoteScoreEvaluator final : public Evaluator {
 public:
  RemoteScoreEvaluator(std::string name, std::shared_ptr<ScorerClient> scorer)
      : name_(std::move(name)), scorer_(std::move(scorer)) {}
  std::string name() const override { return name_; }
  bool requires_network() const override { return true; }

  std::vector<MetricResult> evaluate(const Instance& inst, std::span<const EvalTarget> pending) override {
    std::vector<std::string> hints;
    for (const auto& t : pending) hints.push_back(text_of(inst, t));
    const auto scores = convergence_scored(hints, *scorer_);
    std::vector<MetricResult> out;
    for (double s : scores) out.push_back(MetricResult{name_, s, std::nullopt});
    return out;
  }

 private:
  std::string name_;
  std::shared_ptr<ScorerClient> scorer_;
};

// Texts with no words cannot be graded; they get the easiest level and a flag.
Score readability_or_empty(const std::function<Score()>& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::EmptyText) throw;
    return {0.0, Json{{"empty", true}}};
  }
}

}  // namespace

std::string MethodSpec::name() const {
  std::string out = metric + "/" + method;
  if (!variant.empty()) out += "/" + variant;
  return out;
}

MethodSpec parse_method_spec(std::string_view text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto slash = text.find('/', start);
    parts.emplace_back(text.substr(start, slash == std::string_view::npos ? std::string_view::npos : slash - start));
    if (slash == std::string_view::npos) break;
    start = slash + 1;
  }
  if (parts.size() < 2 || parts.size() > 3 ||
      std::any_of(parts.begin(), parts.end(), [](const std::string& p) { return p.empty(); }))
    throw Error(ErrorKind::InvalidArgument, "expected metric/method[/variant]", std::string(text));
  MethodSpec spec{parts[0], parts[1], parts.size() == 3 ? parts[2] : "", Json::object(), ""};
  if (!find_method(spec)) throw Error(ErrorKind::InvalidArgument, "unknown metric method", std::string(text));
  return spec;
}

void MetricConfig::validate() const {
  std::set<std::string> seen;
  for (const auto& spec : enabled) {
    if (!find_method(spec)) throw Error(ErrorKind::InvalidArgument, "unknown metric method", spec.name());
    if (!seen.insert(spec.name()).second)
      throw Error(ErrorKind::InvalidArgument, "method listed more than once", spec.name());
  }
}

MetricConfig parse_metric_list(std::string_view list) {
  MetricConfig config;
  std::size_t start = 0;
  while (start <= list.size()) {
    auto comma = list.find(',', start);
    if (comma == std::string_view::npos) comma = list.size();
    auto item = list.substr(start, comma - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) config.enabled.push_back(parse_method_spec(item));
    start = comma + 1;
  }
  config.validate();
  return config;
}

std::vector<std::string> known_methods() {
  std::vector<std::string> out;
  for (const auto& m : method_table()) {
    const std::string base = std::string(m.metric) + "/" + std::string(m.method);
    if (m.variants.empty()) out.push_back(base);
    for (auto v : m.variants) out.push_back(base + "/" + std::string(v));
  }
  return out;
}

bool method_requires_network(const MethodSpec& spec) {
  const auto* info = find_method(spec);
  if (!info) throw Error(ErrorKind::InvalidArgument, "unknown metric method", spec.name());
  return info->network;
}

std::vector<std::string> default_offline_methods() {
  return {"relevance/rouge/rouge1",
          "relevance/rouge/rouge2",
          "relevance/rouge/rougeL",
          "readability/traditional/flesch",
          "readability/traditional/gunning_fog",
          "readability/traditional/coleman_liau",
          "readability/traditional/smog",
          "readability/traditional/ari",
          "familiarity/wordfreq/stop",
          "familiarity/wordfreq/nostop",
          "answerleakage/lexical/stop",
          "answerleakage/lexical/nostop"};
}

std::string_view to_string(EvalTarget::Kind kind) noexcept {
  switch (kind) {
    case EvalTarget::Kind::question: return "question";
    case EvalTarget::Kind::answer: return "answer";
    case EvalTarget::Kind::hint: return "hint";
  }
  return "?";
}

const MetricMap& metrics_of(const Instance& inst, const EvalTarget& t) {
  switch (t.kind) {
    case EvalTarget::Kind::question: return inst.question.metrics;
    case EvalTarget::Kind::answer: return inst.answers.at(t.index).metrics;
    case EvalTarget::Kind::hint: break;
  }
  return inst.hints.at(t.index).metrics;
}

const std::string& text_of(const Instance& inst, const EvalTarget& t) {
  switch (t.kind) {
    case EvalTarget::Kind::question: return inst.question.text;
    case EvalTarget::Kind::answer: return inst.answers.at(t.index).text;
    case EvalTarget::Kind::hint: break;
  }
  return inst.hints.at(t.index).text;
}

std::vector<EvalTarget> Evaluator::targets(const Instance& inst) const { return hint_targets(inst); }

std::unique_ptr<Evaluator> make_evaluator(const MethodSpec& spec, const Backends& b, const MetricConfig& config) {
  const auto* info = find_method(spec);
  if (!info) throw Error(ErrorKind::InvalidArgument, "unknown metric method", spec.name());
  const auto name = spec.name();
  const auto& p = spec.params;
  auto make = [&](bool network, ScoreFn fn, bool all = false) {
    return std::make_unique<PerTargetEvaluator>(name, network, std::move(fn), all);
  };

  if (spec.metric == "relevance") {
    if (spec.method == "rouge") {
      const auto variant = *parse_rouge_variant(spec.variant);
      return make(false, [variant](const Instance& inst, const EvalTarget& t) {
        return Score{relevance_rouge(text_of(inst, t), inst.question.text, variant), std::nullopt};
      });
    }
    if (spec.method == "noncontextual") {
      if (!b.vectors) unavailable(name, "static vector table");
      auto vectors = b.vectors;
      return make(false, [vectors](const Instance& inst, const EvalTarget& t) {
        return relevance_static_embedding(text_of(inst, t), inst.question.text, *vectors);
      });
    }
    if (spec.method == "contextual") {
      if (!b.embed) unavailable(name, "embedding endpoint");
      auto embed = b.embed;
      return make(true, [embed](const Instance& inst, const EvalTarget& t) {
        return Score{relevance_contextual(text_of(inst, t), inst.question.text, *embed), std::nullopt};
      });
    }
    if (!b.chat) unavailable(name, "chat endpoint");
    if (!b.embed) unavailable(name, "embedding endpoint");
    RelevanceLlmOptions opts{p.value("m", 3), b.chat_model, 0.0, b.seed};
    auto chat = b.chat;
    auto embed = b.embed;
    return make(true, [chat, embed, opts](const Instance& inst, const EvalTarget& t) {
      return relevance_llm(text_of(inst, t), inst.question.text, *chat, *embed, opts);
    });
  }

  if (spec.metric == "readability") {
    if (spec.method == "traditional") {
      const auto formula = *parse_readability_formula(spec.variant);
      const auto bands = b.bands;
      return make(false, [formula, bands](const Instance& inst, const EvalTarget& t) {
        return readability_or_empty([&] {
          const auto r = readability_traditional(text_of(inst, t), formula, bands);
          return Score{static_cast<double>(r.level), Json{{"raw", r.raw}}};
        });
      });
    }
    if (spec.method == "ml") {
      if (!b.linear_scorer) unavailable(name, "linear scorer file");
      auto scorer = b.linear_scorer;
      return make(false, [scorer](const Instance& inst, const EvalTarget& t) {
        return readability_or_empty([&] {
          const auto stats = analyze_text(text_of(inst, t));
          if (stats.words == 0) throw Error(ErrorKind::EmptyText, "text has no words");
          const double s = scorer->score(stats);
          return Score{static_cast<double>(scorer->level(s)), Json{{"score", s}}};
        });
      });
    }
    if (!b.chat) unavailable(name, "chat endpoint");
    auto chat = b.chat;
    ReadabilityLlmOptions opts{b.chat_model, 0.0, b.seed};
    return make(true, [chat, opts](const Instance& inst, const EvalTarget& t) {
      return Score{static_cast<double>(readability_llm(text_of(inst, t), *chat, opts)), std::nullopt};
    });
  }

  if (spec.metric == "convergence") {
    if (spec.method == "llm") {
      if (!b.chat) unavailable(name, "chat endpoint");
      return std::make_unique<ConvergenceLlmEvaluator>(b.chat,
                                                       ConvergenceOptions{p.value("k", 10), b.chat_model, 0.0, b.seed});
    }
    auto it = b.scorers.find(name);
    if (it == b.scorers.end() || !it->second) unavailable(name, "scoring endpoint");
    return std::make_unique<RemoteScoreEvaluator>(name, it->second);
  }

  if (spec.metric == "familiarity") {
    const bool all = config.familiarity_all_targets;
    if (spec.method == "wordfreq") {
      if (!b.frequencies) unavailable(name, "frequency table");
      auto table = b.frequencies;
      const bool include_stop = spec.variant == "stop";
      return make(
          false,
          [table, include_stop](const Instance& inst, const EvalTarget& t) {
            return familiarity_wordfreq(text_of(inst, t), *table, include_stop);
          },
          all);
    }
    if (!b.pageviews) unavailable(name, "pageview endpoint");
    auto pageviews = b.pageviews;
    auto provider = b.entities ? b.entities : std::make_shared<HeuristicEntityProvider>();
    const int window = p.value("window_days", kDefaultPageviewWindowDays);
    return make(
        true,
        [pageviews, provider, window](const Instance& inst, const EvalTarget& t) {
          auto entities = entities_of(inst, t);
          if (entities.empty()) entities = provider->extract(text_of(inst, t));
          std::vector<std::string> titles;
          for (const auto& e : entities) titles.push_back(e.text);
          return familiarity_wikipedia(titles, *pageviews, window);
        },
        all);
  }

  // answerleakage
  if (spec.method == "lexical") {
    const bool include_stop = spec.variant == "stop";
    return make(false, [include_stop](const Instance& inst, const EvalTarget& t) {
      return answerleakage_lexical(text_of(inst, t), answer_texts(inst), include_stop);
    });
  }
  if (!b.embed) unavailable(name, "embedding endpoint");
  auto embed = b.embed;
  return make(true, [embed](const Instance& inst, const EvalTarget& t) {
    return Score{answerleakage_contextual(text_of(inst, t), answer_texts(inst), *embed), std::nullopt};
  });
}

std::size_t EvaluationSummary::computed() const {
  std::size_t n = 0;
  for (const auto& [_, m] : methods) n += m.computed;
  return n;
}

std::size_t EvaluationSummary::skipped() const {
  std::size_t n = 0;
  for (const auto& [_, m] : methods) n += m.skipped;
  return n;
}

bool EvaluationSummary::all_failed() const {
  return !methods.empty() && std::all_of(methods.begin(), methods.end(), [](const auto& kv) { return kv.second.failed; });
}

EvaluationSummary evaluate_dataset(Dataset& dataset, const MetricConfig& config, const Backends& backends,
                                   const ProgressSink& progress) {
  config.validate();
  const bool offline = backends.offline || offline_mode();
  if (offline)
    for (const auto& spec : config.enabled)
      if (method_requires_network(spec))
        throw Error(ErrorKind::BackendUnavailable, "network method requested in offline mode", spec.name());

  EvaluationSummary failed_upfront;
  std::vector<std::shared_ptr<Evaluator>> evaluators;
  for (const auto& spec : config.enabled) {
    try {
      evaluators.push_back(make_evaluator(spec, backends, config));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::BackendUnavailable) throw;
      spdlog::warn("{}", e.what());
      auto& outcome = failed_upfront.methods[spec.name()];
      outcome.failed = true;
      outcome.error = e.what();
    }
  }
  auto summary = evaluate_dataset(dataset, evaluators, config, progress);
  for (auto& [name, outcome] : failed_upfront.methods) summary.methods[name] = outcome;
  return summary;
}

EvaluationSummary evaluate_dataset(Dataset& dataset, std::span<const std::shared_ptr<Evaluator>> evaluators,
                                   const MetricConfig& config, const ProgressSink& progress) {
  struct Item {
    std::string subset;
    Instance* instance;
  };
  struct Output {
    std::size_t evaluator;
    EvalTarget target;
    MetricResult result;
  };

  std::vector<Item> items;
  for (auto& [name, subset] : dataset.subsets)
    for (auto& [_, inst] : subset.instances) items.push_back({name, &inst});

  const std::size_t n_eval = evaluators.size();
  std::vector<std::string> names;
  for (const auto& e : evaluators) names.push_back(e->name());

  std::vector<std::atomic<bool>> failed(n_eval);
  std::vector<std::string> errors(n_eval);
  std::vector<std::size_t> skipped(n_eval, 0);
  std::vector<std::vector<Output>> outputs(items.size());
  std::mutex mutex;
  std::size_t done = 0;

  parallel_for(items.size(), std::max<std::size_t>(config.workers, 1), [&](std::size_t i) {
    const Instance& inst = *items[i].instance;
    std::vector<std::size_t> local_skipped(n_eval, 0);
    for (std::size_t e = 0; e < n_eval; ++e) {
      if (failed[e]) continue;
      std::vector<EvalTarget> pending;
      for (const auto& t : evaluators[e]->targets(inst)) {
        if (!config.overwrite && metrics_of(inst, t).count(names[e]))
          ++local_skipped[e];
        else
          pending.push_back(t);
      }
      if (pending.empty()) continue;
      try {
        auto results = evaluators[e]->evaluate(inst, pending);
        if (results.size() != pending.size())
          throw Error(ErrorKind::InvalidArgument, "evaluator returned the wrong number of results", names[e]);
        for (std::size_t k = 0; k < results.size(); ++k) {
          results[k].name = names[e];
          if (!std::isfinite(results[k].value))
            throw Error(ErrorKind::OutOfRange, "non-finite score", names[e]);
          if (auto why = metric_range_violation(results[k])) throw Error(ErrorKind::OutOfRange, *why, names[e]);
          outputs[i].push_back({e, pending[k], std::move(results[k])});
        }
      } catch (const std::exception& ex) {
        std::lock_guard lock(mutex);
        if (!failed[e].exchange(true)) {
          errors[e] = ex.what();
          spdlog::error("{} failed and is skipped for the rest of the run: {}", names[e], ex.what());
        }
        // Drop this method's partial output for the instance.
        std::erase_if(outputs[i], [e](const Output& o) { return o.evaluator == e; });
      }
    }
    std::lock_guard lock(mutex);
    for (std::size_t e = 0; e < n_eval; ++e) skipped[e] += local_skipped[e];
    ++done;
    if (progress) progress(done, items.size());
  });

  EvaluationSummary summary;
  for (std::size_t e = 0; e < n_eval; ++e) {
    auto& outcome = summary.methods[names[e]];
    outcome.skipped = skipped[e];
    outcome.failed = failed[e];
    outcome.error = errors[e];
  }
  for (std::size_t i = 0; i < items.size(); ++i) {
    Instance& inst = *items[i].instance;
    for (auto& out : outputs[i]) {
      MetricMap* target = nullptr;
      switch (out.target.kind) {
        case EvalTarget::Kind::question: target = &inst.question.metrics; break;
        case EvalTarget::Kind::answer: target = &inst.answers.at(out.target.index).metrics; break;
        case EvalTarget::Kind::hint: target = &inst.hints.at(out.target.index).metrics; break;
      }
      attach_metric(*target, std::move(out.result));
      ++summary.methods[names[out.evaluator]].computed;
    }
  }

  for (auto& [subset_name, subset] : dataset.subsets) {
    auto& means = summary.subset_means[subset_name];
    for (const auto& name : names) {
      double total = 0.0;
      std::size_t count = 0;
      auto add = [&](const MetricMap& m) {
        if (auto it = m.find(name); it != m.end()) {
          total += it->second.value;
          ++count;
        }
      };
      for (const auto& [_, inst] : subset.instances) {
        add(inst.question.metrics);
        for (const auto& a : inst.answers) add(a.metrics);
        for (const auto& h : inst.hints) add(h.metrics);
      }
      if (count) means[name] = total / static_cast<double>(count);
    }
  }
  return summary;
}

}  // namespace hintkit
