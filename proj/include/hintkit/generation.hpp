#pragma once

// Hint generation through a chat model, with and without access to the answer.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hintkit/clients.hpp"
#include "hintkit/model.hpp"

namespace hintkit {

enum class GenerationMode { answer_aware, answer_agnostic };

std::string_view to_string(GenerationMode mode) noexcept;

/// System prompt, first user prompt, and the user prompt for follow-up rounds
/// when hints were missing or rejected. Placeholders: {question}, {answer},
/// {n}, and in the follow-up prompt also {rejected} and {accepted}.
struct PromptTemplate {
  std::string system;
  std::string user;
  std::string retry_user;
};

/// Embedded templates; currently only id "v1".
PromptTemplate builtin_prompt_template(GenerationMode mode, std::string_view id = "v1");

/// A template file replaces the user prompt. When it contains a line "---",
/// the text before it replaces the system prompt and the text after it the
/// user prompt.
PromptTemplate load_prompt_template(const std::filesystem::path& path, GenerationMode mode);

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& values);

struct GenerationConfig {
  int num_hints = 5;
  std::string model = "default";
  double temperature = 0.7;
  std::string prompt_template_id = "v1";
  int max_regeneration_rounds = 2;
  std::optional<bool> filter_leaks;  // default: on for answer-aware, off for agnostic
  int max_tokens = 1024;
  std::optional<std::int64_t> seed;
  std::size_t workers = 4;
  std::optional<PromptTemplate> prompt;  // overrides prompt_template_id
};

/// Numbered ("1." / "1)") or bulleted ("-" / "*") items, markers and
/// surrounding whitespace stripped, empties dropped, at most `expected`.
/// Throws UnparseableCompletion when no item is found.
std::vector<std::string> parse_hint_list(std::string_view completion, int expected);

/// Case-insensitive verbatim containment of any non-blank answer.
bool contains_answer(std::string_view hint, std::span<const Answer> answers);

struct InstanceRef {
  std::string q_id;
  Instance* instance = nullptr;
};

/// Appends exactly cfg.num_hints hints to every instance, or throws and
/// leaves all instances untouched. Throws MissingAnswer(q_id) before any
/// request when an instance has no answers, GenerationFailed(q_id) when a
/// model cannot supply enough acceptable hints within the allowed rounds.
void generate_answer_aware(std::span<const InstanceRef> instances, const GenerationConfig& cfg, ChatClient& chat);
void generate_answer_agnostic(std::span<const InstanceRef> instances, const GenerationConfig& cfg, ChatClient& chat);
void generate_hints(GenerationMode mode, std::span<const InstanceRef> instances, const GenerationConfig& cfg,
                    ChatClient& chat);

struct DatasetGenerationOptions {
  bool replace = false;       // drop existing hints first
  bool skip_missing = false;  // answer-aware: skip answerless instances
};

struct GenerationSummary {
  std::map<std::string, std::size_t> hints_per_subset;
  std::size_t skipped_instances = 0;
};

GenerationSummary generate_for_dataset(Dataset& dataset, GenerationMode mode, const GenerationConfig& cfg,
                                       ChatClient& chat, const DatasetGenerationOptions& options = {});

}  // namespace hintkit
