#include "hintkit/generation.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <spdlog/spdlog.h>

#include "hintkit/dataset_io.hpp"
#include "hintkit/error.hpp"
#include "hintkit/parallel.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

constexpr std::string_view kListInstruction =
    "Reply with a numbered list, one hint per line, and nothing else.";

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Returns the item text when `line` is a list item.
std::optional<std::string_view> list_item(std::string_view line) {
  line = trim(line);
  if (line.empty()) return std::nullopt;
  if (line[0] == '-' || line[0] == '*') {
    if (line.size() < 2 || !std::isspace(static_cast<unsigned char>(line[1]))) return std::nullopt;
    return trim(line.substr(1));
  }
  std::size_t digits = 0;
  while (digits < line.size() && std::isdigit(static_cast<unsigned char>(line[digits]))) ++digits;
  if (digits == 0 || digits > 3 || digits == line.size()) return std::nullopt;
  if (line[digits] != '.' && line[digits] != ')') return std::nullopt;
  return trim(line.substr(digits + 1));
}

std::string numbered(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += std::to_string(i + 1) + ". " + items[i] + "\n";
  if (out.empty()) out = "(none)\n";
  return out;
}

std::string joined_answers(const Instance& inst) {
  std::string out;
  for (const auto& a : inst.answers) {
    if (!out.empty()) out += "; ";
    out += a.text;
  }
  return out;
}

// Produces exactly cfg.num_hints accepted hint texts for one instance.
std::vector<std::string> generate_one(const std::string& q_id, const Instance& inst, GenerationMode mode,
                                      const GenerationConfig& cfg, const PromptTemplate& tmpl, bool filter,
                                      ChatClient& chat) {
  const auto n = static_cast<std::size_t>(cfg.num_hints);
  std::vector<std::string> accepted;
  std::vector<std::string> rejected;
  std::map<std::string, std::string> values{{"question", inst.question.text}, {"answer", joined_answers(inst)}};

  for (int round = 0; round <= cfg.max_regeneration_rounds && accepted.size() < n; ++round) {
    const auto missing = n - accepted.size();
    values["n"] = std::to_string(missing);
    values["rejected"] = numbered(rejected);
    values["accepted"] = numbered(accepted);
    ChatRequest req;
    req.model = cfg.model;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    req.seed = cfg.seed;
    req.messages = {{"system", render_template(tmpl.system, values)},
                    {"user", render_template(round == 0 ? tmpl.user : tmpl.retry_user, values)}};

    std::vector<std::string> items;
    try {
      items = parse_hint_list(chat.complete(req), static_cast<int>(missing));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::UnparseableCompletion && e.kind() != ErrorKind::EmptyCompletion) throw;
      spdlog::warn("{}: round {} produced no usable list ({})", q_id, round, e.what());
      continue;
    }
    for (auto& item : items) {
      if (accepted.size() == n) break;
      if (filter && contains_answer(item, inst.answers)) {
        spdlog::warn("{}: dropped a hint that reveals the answer", q_id);
        rejected.push_back(std::move(item));
        continue;
      }
      accepted.push_back(std::move(item));
    }
  }
  if (accepted.size() < n)
    throw Error(ErrorKind::GenerationFailed,
                "only " + std::to_string(accepted.size()) + " of " + std::to_string(n) + " " +
                    std::string(to_string(mode)) + " hints after " + std::to_string(cfg.max_regeneration_rounds + 1) +
                    " rounds",
                q_id);
  return accepted;
}

}  // namespace

std::string_view to_string(GenerationMode mode) noexcept {
  return mode == GenerationMode::answer_aware ? "answer-aware" : "answer-agnostic";
}

PromptTemplate builtin_prompt_template(GenerationMode mode, std::string_view id) {
  if (id != "v1") throw Error(ErrorKind::InvalidArgument, "unknown prompt template id", std::string(id));
  const std::string list(kListInstruction);
  if (mode == GenerationMode::answer_aware) {
    return {
        "You write hints for trivia questions. Given a question and its answer, produce {n} hints that guide a "
        "reader toward the answer without revealing it. Never write the answer itself. " + list,
        "Question: {question}\nAnswer: {answer}",
        "Question: {question}\nAnswer: {answer}\n\nHints already accepted:\n{accepted}\nHints rejected because they "
        "reveal the answer:\n{rejected}\nWrite {n} more hints that differ from these and do not contain the answer.",
    };
  }
  return {
      "You write hints for trivia questions. Given a question, produce {n} hints that help a reader work out the "
      "answer on their own. " + list,
      "Question: {question}",
      "Question: {question}\n\nHints already written:\n{accepted}\nWrite {n} more hints that differ from these.",
  };
}

PromptTemplate load_prompt_template(const std::filesystem::path& path, GenerationMode mode) {
  auto tmpl = builtin_prompt_template(mode);
  const auto text = read_file(path);
  std::istringstream in(text);
  std::string line, before, after;
  bool split = false;
  while (std::getline(in, line)) {
    if (!split && trim(line) == "---") {
      split = true;
      continue;
    }
    (split ? after : before) += line + "\n";
  }
  if (split) {
    tmpl.system = std::string(trim(before));
    tmpl.user = std::string(trim(after));
  } else {
    tmpl.user = std::string(trim(before));
  }
  if (tmpl.user.empty()) throw Error(ErrorKind::ConfigError, "prompt template has an empty user prompt", path.string());
  return tmpl;
}

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      const auto close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += tmpl[i++];
  }
  return out;
}

std::vector<std::string> parse_hint_list(std::string_view completion, int expected) {
  std::vector<std::string> items;
  std::size_t start = 0;
  while (start <= completion.size() && static_cast<int>(items.size()) < expected) {
    auto end = completion.find('\n', start);
    if (end == std::string_view::npos) end = completion.size();
    if (auto item = list_item(completion.substr(start, end - start)); item && !item->empty())
      items.emplace_back(*item);
    start = end + 1;
  }
  if (items.empty()) throw Error(ErrorKind::UnparseableCompletion, "no list items in completion");
  return items;
}

bool contains_answer(std::string_view hint, std::span<const Answer> answers) {
  const auto lowered = to_lower(hint);
  for (const auto& a : answers) {
    const auto needle = to_lower(trim(a.text));
    if (!needle.empty() && lowered.find(needle) != std::string::npos) return true;
  }
  return false;
}

void generate_hints(GenerationMode mode, std::span<const InstanceRef> instances, const GenerationConfig& cfg,
                    ChatClient& chat) {
  if (cfg.num_hints < 1) throw Error(ErrorKind::InvalidArgument, "num_hints must be at least 1");
  if (cfg.max_regeneration_rounds < 0) throw Error(ErrorKind::InvalidArgument, "max_regeneration_rounds must be >= 0");
  if (mode == GenerationMode::answer_aware)
    for (const auto& ref : instances)
      if (ref.instance->answers.empty()) throw Error(ErrorKind::MissingAnswer, "instance has no answer", ref.q_id);

  const auto tmpl = cfg.prompt ? *cfg.prompt : builtin_prompt_template(mode, cfg.prompt_template_id);
  const bool filter = cfg.filter_leaks.value_or(mode == GenerationMode::answer_aware);
  std::vector<std::vector<std::string>> produced(instances.size());
  parallel_for(instances.size(), cfg.workers, [&](std::size_t i) {
    produced[i] = generate_one(instances[i].q_id, *instances[i].instance, mode, cfg, tmpl, filter, chat);
  });

  const auto source = "model:" + cfg.model + "/" + std::string(to_string(mode));
  for (std::size_t i = 0; i < instances.size(); ++i)
    for (auto& text : produced[i]) instances[i].instance->hints.push_back(Hint{std::move(text), source, {}, {}, {}});
}

void generate_answer_aware(std::span<const InstanceRef> instances, const GenerationConfig& cfg, ChatClient& chat) {
  generate_hints(GenerationMode::answer_aware, instances, cfg, chat);
}

void generate_answer_agnostic(std::span<const InstanceRef> instances, const GenerationConfig& cfg, ChatClient& chat) {
  generate_hints(GenerationMode::answer_agnostic, instances, cfg, chat);
}

GenerationSummary generate_for_dataset(Dataset& dataset, GenerationMode mode, const GenerationConfig& cfg,
                                       ChatClient& chat, const DatasetGenerationOptions& options) {
  GenerationSummary summary;
  std::vector<InstanceRef> refs;
  std::vector<std::string> subset_of;
  for (auto& [name, subset] : dataset.subsets) {
    summary.hints_per_subset[name] = 0;
    for (auto& [q_id, inst] : subset.instances) {
      if (mode == GenerationMode::answer_aware && inst.answers.empty() && options.skip_missing) {
        spdlog::warn("{}: skipped, no answer", q_id);
        ++summary.skipped_instances;
        continue;
      }
      refs.push_back({q_id, &inst});
      subset_of.push_back(name);
    }
  }
  std::vector<std::size_t> previous(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) previous[i] = refs[i].instance->hints.size();

  generate_hints(mode, refs, cfg, chat);

  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& hints = refs[i].instance->hints;
    if (options.replace) hints.erase(hints.begin(), hints.begin() + static_cast<std::ptrdiff_t>(previous[i]));
    summary.hints_per_subset[subset_of[i]] += static_cast<std::size_t>(cfg.num_hints);
  }
  return summary;
}

}  // namespace hintkit
