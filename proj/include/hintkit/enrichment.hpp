#pragma once

// Question-type classification and entity extraction for dataset enrichment.

#include <memory>
#include <string_view>
#include <vector>

#include "hintkit/model.hpp"
#include "hintkit/remote.hpp"

namespace hintkit {

/// Rule-based TREC coarse typing from the wh-word and head noun:
///   who/whom/whose -> HUM:ind        where -> LOC:other    when -> NUM:date
///   how many/much  -> NUM:count      how (other) -> DESC:manner
///   why            -> DESC:reason
///   what/which + head noun: person words -> HUM:ind, place words -> LOC:*,
///   year/date words -> NUM:date, abbreviation words -> ABBR:abb,
///   mean/definition -> DESC:def, anything else -> ENTY/"unknown".
/// Questions without a wh-word fall back to DESC/"unknown".
QuestionType classify_question_type(std::string_view question_text);
QuestionType classify_question_type(const Question& question);

class EntityProvider {
 public:
  virtual ~EntityProvider() = default;
  virtual std::vector<Entity> extract(std::string_view text) = 0;
};

/// Maximal runs of capitalized tokens separated only by whitespace, labeled
/// OTHER (a lone sentence-initial stopword such as "He" is skipped), plus
/// four-digit years labeled DATE.
class HeuristicEntityProvider final : public EntityProvider {
 public:
  std::vector<Entity> extract(std::string_view text) override;
};

/// POST {"text": ...} -> {"entities": [{text, label, start_index, end_index}]}.
/// Responses breaking the offset invariant raise ProviderError.
class RemoteEntityProvider final : public EntityProvider {
 public:
  RemoteEntityProvider(std::shared_ptr<HttpTransport> transport, EndpointConfig config);
  std::vector<Entity> extract(std::string_view text) override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  EndpointConfig config_;
  CallStats stats_;
};

std::vector<Entity> extract_entities(std::string_view text, EntityProvider& provider);
std::vector<Entity> extract_entities(std::string_view text);

struct EnrichOptions {
  bool classify_questions = true;
  bool extract_entities = true;
  bool overwrite = false;  // otherwise only fill empty fields
};

/// Fills question types and entities across the dataset.
void enrich_dataset(Dataset& dataset, EntityProvider& provider, const EnrichOptions& options = {});

}  // namespace hintkit
