#pragma once

// In-memory dataset model: Dataset -> Subset -> Instance -> {Question,
// Answer, Hint}. Serialization lives in json_io.hpp / archive.hpp.

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace hintkit {

using Json = nlohmann::json;
using Metadata = std::map<std::string, Json>;

enum class QTypeMajor { ABBR, DESC, ENTY, HUM, LOC, NUM };

std::string_view to_string(QTypeMajor major) noexcept;
std::optional<QTypeMajor> parse_qtype_major(std::string_view text) noexcept;

enum class EntityLabel {
  PERSON,
  NORP,
  FAC,
  ORG,
  GPE,
  LOC,
  PRODUCT,
  EVENT,
  WORK_OF_ART,
  LAW,
  LANGUAGE,
  DATE,
  TIME,
  PERCENT,
  MONEY,
  QUANTITY,
  ORDINAL,
  CARDINAL,
  OTHER,
};

std::string_view to_string(EntityLabel label) noexcept;
std::optional<EntityLabel> parse_entity_label(std::string_view text) noexcept;

struct QuestionType {
  QTypeMajor major = QTypeMajor::ENTY;
  std::string minor = "unknown";

  bool operator==(const QuestionType&) const = default;
};

/// A labeled span of its parent text. Offsets count Unicode code points;
/// `end_index` is exclusive.
struct Entity {
  std::string text;
  EntityLabel label = EntityLabel::OTHER;
  std::size_t start_index = 0;
  std::size_t end_index = 0;

  bool operator==(const Entity&) const = default;
};

/// Scores are keyed "<metric>/<method>[/<variant>]".
struct MetricResult {
  std::string name;
  double value = 0.0;
  std::optional<Json> detail;

  bool operator==(const MetricResult&) const = default;
};

using MetricMap = std::map<std::string, MetricResult>;

struct Question {
  std::string text;
  std::optional<QuestionType> question_type;
  std::vector<Entity> entities;
  MetricMap metrics;
  Metadata metadata;

  bool operator==(const Question&) const = default;
};

struct Answer {
  std::string text;
  std::vector<Entity> entities;
  MetricMap metrics;
  Metadata metadata;

  bool operator==(const Answer&) const = default;
};

struct Hint {
  std::string text;
  std::string source;
  std::vector<Entity> entities;
  MetricMap metrics;
  Metadata metadata;

  bool operator==(const Hint&) const = default;
};

struct Instance {
  Question question;
  std::vector<Answer> answers;
  std::vector<Hint> hints;  // order is meaningful
  Metadata metadata;

  bool operator==(const Instance&) const = default;
};

struct Subset {
  std::string name;
  std::map<std::string, Instance> instances;  // keyed by q_id
  Metadata metadata;

  bool operator==(const Subset&) const = default;
};

struct Dataset {
  std::string name;
  std::string version = "1.0";
  std::string url;
  std::string description;
  std::map<std::string, Subset> subsets;
  Metadata metadata;

  bool operator==(const Dataset&) const = default;
};

/// Returns a message when `result` breaks the range declared for its metric
/// prefix ([0,1] for relevance/convergence/familiarity/answerleakage, {0,1,2}
/// for readability). Unknown prefixes are accepted.
std::optional<std::string> metric_range_violation(const MetricResult& result);

/// Inserts or overwrites `result` under its name. Throws InvalidArgument for
/// an empty name and OutOfRange for a value outside its metric's range.
void attach_metric(MetricMap& metrics, MetricResult result);

template <typename Target>
  requires requires(Target t) { t.metrics; }
void attach_metric(Target& target, MetricResult result) {
  attach_metric(target.metrics, std::move(result));
}

const Instance& get_instance(const Dataset& dataset, std::string_view subset, std::string_view q_id);
Instance& get_instance(Dataset& dataset, std::string_view subset, std::string_view q_id);

/// Adds (or replaces) a subset, keeping `Subset::name` and the map key in sync.
Subset& add_subset(Dataset& dataset, std::string name);

std::size_t count_hints(const Subset& subset);

}  // namespace hintkit
