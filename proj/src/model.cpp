#include "hintkit/model.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "hintkit/error.hpp"

namespace hintkit {

namespace {

constexpr std::array<std::pair<QTypeMajor, std::string_view>, 6> kMajors{{
    {QTypeMajor::ABBR, "ABBR"},
    {QTypeMajor::DESC, "DESC"},
    {QTypeMajor::ENTY, "ENTY"},
    {QTypeMajor::HUM, "HUM"},
    {QTypeMajor::LOC, "LOC"},
    {QTypeMajor::NUM, "NUM"},
}};

constexpr std::array<std::pair<EntityLabel, std::string_view>, 19> kLabels{{
    {EntityLabel::PERSON, "PERSON"},
    {EntityLabel::NORP, "NORP"},
    {EntityLabel::FAC, "FAC"},
    {EntityLabel::ORG, "ORG"},
    {EntityLabel::GPE, "GPE"},
    {EntityLabel::LOC, "LOC"},
    {EntityLabel::PRODUCT, "PRODUCT"},
    {EntityLabel::EVENT, "EVENT"},
    {EntityLabel::WORK_OF_ART, "WORK_OF_ART"},
    {EntityLabel::LAW, "LAW"},
    {EntityLabel::LANGUAGE, "LANGUAGE"},
    {EntityLabel::DATE, "DATE"},
    {EntityLabel::TIME, "TIME"},
    {EntityLabel::PERCENT, "PERCENT"},
    {EntityLabel::MONEY, "MONEY"},
    {EntityLabel::QUANTITY, "QUANTITY"},
    {EntityLabel::ORDINAL, "ORDINAL"},
    {EntityLabel::CARDINAL, "CARDINAL"},
    {EntityLabel::OTHER, "OTHER"},
}};

std::string_view metric_prefix(std::string_view name) {
  return name.substr(0, name.find('/'));
}

}  // namespace

std::string_view to_string(QTypeMajor major) noexcept {
  for (const auto& [value, text] : kMajors)
    if (value == major) return text;
  return "ENTY";
}

std::optional<QTypeMajor> parse_qtype_major(std::string_view text) noexcept {
  for (const auto& [value, name] : kMajors)
    if (name == text) return value;
  return std::nullopt;
}

std::string_view to_string(EntityLabel label) noexcept {
  for (const auto& [value, text] : kLabels)
    if (value == label) return text;
  return "OTHER";
}

std::optional<EntityLabel> parse_entity_label(std::string_view text) noexcept {
  for (const auto& [value, name] : kLabels)
    if (name == text) return value;
  return std::nullopt;
}

std::optional<std::string> metric_range_violation(const MetricResult& result) {
  const auto prefix = metric_prefix(result.name);
  const double v = result.value;
  if (prefix == "readability") {
    if (v != 0.0 && v != 1.0 && v != 2.0)
      return "readability level must be 0, 1 or 2, got " + std::to_string(v);
  } else if (prefix == "relevance" || prefix == "convergence" || prefix == "familiarity" ||
             prefix == "answerleakage") {
    if (!(v >= 0.0 && v <= 1.0)) return std::string(prefix) + " value must lie in [0,1], got " + std::to_string(v);
  }
  return std::nullopt;
}

void attach_metric(MetricMap& metrics, MetricResult result) {
  if (result.name.empty()) throw Error(ErrorKind::InvalidArgument, "metric name is empty");
  if (auto why = metric_range_violation(result)) throw Error(ErrorKind::OutOfRange, *why, result.name);
  auto key = result.name;
  metrics.insert_or_assign(std::move(key), std::move(result));
}

const Instance& get_instance(const Dataset& dataset, std::string_view subset, std::string_view q_id) {
  auto s = dataset.subsets.find(std::string(subset));
  if (s == dataset.subsets.end()) throw Error(ErrorKind::UnknownSubset, "no such subset", std::string(subset));
  auto i = s->second.instances.find(std::string(q_id));
  if (i == s->second.instances.end())
    throw Error(ErrorKind::UnknownInstance, "no such q_id in subset " + std::string(subset), std::string(q_id));
  return i->second;
}

Instance& get_instance(Dataset& dataset, std::string_view subset, std::string_view q_id) {
  return const_cast<Instance&>(get_instance(std::as_const(dataset), subset, q_id));
}

Subset& add_subset(Dataset& dataset, std::string name) {
  auto& subset = dataset.subsets[name];
  subset.name = std::move(name);
  return subset;
}

std::size_t count_hints(const Subset& subset) {
  std::size_t n = 0;
  for (const auto& [q_id, instance] : subset.instances) n += instance.hints.size();
  return n;
}

}  // namespace hintkit
