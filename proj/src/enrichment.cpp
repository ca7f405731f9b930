#include "hintkit/enrichment.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "hintkit/error.hpp"
#include "hintkit/text.hpp"

namespace hintkit {

namespace {

template <std::size_t N>
bool any_of(std::string_view word, const std::array<std::string_view, N>& words) {
  return std::find(words.begin(), words.end(), word) != words.end();
}

constexpr std::array<std::string_view, 20> kPersonHeads{
    "person", "man",    "woman",  "who",      "people",     "actor",   "actress", "singer",    "president", "king",
    "queen",  "author", "writer", "inventor", "scientist", "player",  "leader",  "politician", "artist",    "composer"};
constexpr std::array<std::string_view, 4> kCityHeads{"city", "town", "capital", "village"};
constexpr std::array<std::string_view, 2> kCountryHeads{"country", "nation"};
constexpr std::array<std::string_view, 3> kStateHeads{"state", "province", "county"};
constexpr std::array<std::string_view, 4> kMountHeads{"mountain", "mount", "peak", "volcano"};
constexpr std::array<std::string_view, 9> kOtherPlaceHeads{"place",  "river", "continent", "ocean", "sea",
                                                           "island", "lake",  "region",    "location"};
constexpr std::array<std::string_view, 6> kDateHeads{"year", "date", "day", "month", "century", "decade"};
constexpr std::array<std::string_view, 3> kAbbrHeads{"abbreviation", "acronym", "abbreviated"};
constexpr std::array<std::string_view, 4> kDefinitionWords{"mean", "means", "meaning", "definition"};
constexpr std::array<std::string_view, 8> kWhWords{"who", "whom", "whose", "where", "when", "how", "why", "what"};

bool is_four_digit_year(std::string_view token) {
  return token.size() == 4 && (token[0] == '1' || token[0] == '2') &&
         std::all_of(token.begin(), token.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

QuestionType classify_question_type(std::string_view question_text) {
  const auto tokens = tokenize(question_text);
  std::size_t wh = tokens.size();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (any_of(tokens[i], kWhWords) || tokens[i] == "which") {
      wh = i;
      break;
    }
  }
  if (wh == tokens.size()) return {QTypeMajor::DESC, "unknown"};

  const auto& w = tokens[wh];
  if (w == "who" || w == "whom" || w == "whose") return {QTypeMajor::HUM, "HUM:ind"};
  if (w == "where") return {QTypeMajor::LOC, "LOC:other"};
  if (w == "when") return {QTypeMajor::NUM, "NUM:date"};
  if (w == "why") return {QTypeMajor::DESC, "DESC:reason"};
  if (w == "how") {
    if (wh + 1 < tokens.size() && (tokens[wh + 1] == "many" || tokens[wh + 1] == "much"))
      return {QTypeMajor::NUM, "NUM:count"};
    return {QTypeMajor::DESC, "DESC:manner"};
  }

  // what / which: definitions anywhere, otherwise the first head noun in the
  // next few tokens decides.
  for (const auto& t : tokens)
    if (any_of(t, kDefinitionWords)) return {QTypeMajor::DESC, "DESC:def"};
  for (const auto& t : tokens)
    if (any_of(t, kAbbrHeads)) return {QTypeMajor::ABBR, "ABBR:abb"};
  if (std::find(tokens.begin(), tokens.end(), "stand") != tokens.end() &&
      std::find(tokens.begin(), tokens.end(), "for") != tokens.end())
    return {QTypeMajor::ABBR, "ABBR:abb"};
  const auto window_end = std::min(tokens.size(), wh + 5);
  for (std::size_t i = wh + 1; i < window_end; ++i) {
    const auto& t = tokens[i];
    if (any_of(t, kPersonHeads)) return {QTypeMajor::HUM, "HUM:ind"};
    if (any_of(t, kCityHeads)) return {QTypeMajor::LOC, "LOC:city"};
    if (any_of(t, kCountryHeads)) return {QTypeMajor::LOC, "LOC:country"};
    if (any_of(t, kStateHeads)) return {QTypeMajor::LOC, "LOC:state"};
    if (any_of(t, kMountHeads)) return {QTypeMajor::LOC, "LOC:mount"};
    if (any_of(t, kOtherPlaceHeads)) return {QTypeMajor::LOC, "LOC:other"};
    if (any_of(t, kDateHeads)) return {QTypeMajor::NUM, "NUM:date"};
  }
  return {QTypeMajor::ENTY, "unknown"};
}

QuestionType classify_question_type(const Question& question) { return classify_question_type(question.text); }

std::vector<Entity> HeuristicEntityProvider::extract(std::string_view text) {
  const auto cps = decode_utf8(text);
  const auto tokens = tokenize_spans(text);
  std::vector<Entity> out;

  auto whitespace_between = [&](const Token& a, const Token& b) {
    if (b.start <= a.end) return false;
    for (std::size_t i = a.end; i < b.start; ++i)
      if (cps[i] != ' ' && cps[i] != '\t') return false;
    return true;
  };
  auto emit = [&](std::size_t start, std::size_t end, EntityLabel label) {
    out.push_back(Entity{encode_utf8(std::u32string_view(cps).substr(start, end - start)), label, start, end});
  };

  std::size_t i = 0;
  while (i < tokens.size()) {
    const auto& tok = tokens[i];
    if (is_four_digit_year(tok.text)) {
      emit(tok.start, tok.end, EntityLabel::DATE);
      ++i;
      continue;
    }
    if (!is_upper(cps[tok.start])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    while (j < tokens.size() && is_upper(cps[tokens[j].start]) && whitespace_between(tokens[j - 1], tokens[j])) ++j;
    const bool lone_initial_stopword = j == i + 1 && tok.sentence_initial && is_stopword(tok.text);
    if (!lone_initial_stopword) emit(tok.start, tokens[j - 1].end, EntityLabel::OTHER);
    i = j;
  }
  return out;
}

RemoteEntityProvider::RemoteEntityProvider(std::shared_ptr<HttpTransport> transport, EndpointConfig config)
    : transport_(std::move(transport)), config_(std::move(config)) {
  if (!config_.sleep) config_.sleep = real_sleeper();
}

std::vector<Entity> RemoteEntityProvider::extract(std::string_view text) {
  if (config_.base_url.empty()) throw Error(ErrorKind::ProviderError, "NER endpoint is not configured");
  HttpRequest http{"POST", config_.base_url, {{"Content-Type", "application/json"}}, Json{{"text", text}}.dump()};
  if (!config_.api_key.empty()) http.headers.emplace_back("Authorization", "Bearer " + config_.api_key);
  HttpResponse response;
  try {
    response = send_with_retry(*transport_, http, config_.retry, config_.sleep, nullptr, &stats_);
  } catch (const Error& e) {
    throw Error(ErrorKind::ProviderError, e.what(), config_.base_url);
  }
  if (response.status != 200)
    throw Error(ErrorKind::ProviderError, "HTTP " + std::to_string(response.status), config_.base_url);

  const auto cps = decode_utf8(text);
  std::vector<Entity> out;
  try {
    const auto j = Json::parse(response.body);
    for (const auto& item : j.at("entities")) {
      Entity e;
      e.text = item.at("text").get<std::string>();
      const auto label = item.at("label").get<std::string>();
      auto parsed = parse_entity_label(label);
      if (!parsed) throw Error(ErrorKind::ProviderError, "unknown entity label \"" + label + "\"", config_.base_url);
      e.label = *parsed;
      e.start_index = item.at("start_index").get<std::size_t>();
      e.end_index = item.at("end_index").get<std::size_t>();
      if (!(e.start_index < e.end_index) || e.end_index > cps.size() ||
          encode_utf8(std::u32string_view(cps).substr(e.start_index, e.end_index - e.start_index)) != e.text)
        throw Error(ErrorKind::ProviderError, "entity \"" + e.text + "\" does not match its offsets", config_.base_url);
      out.push_back(std::move(e));
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::ProviderError, std::string("unexpected NER response: ") + e.what(), config_.base_url);
  }
  return out;
}

std::vector<Entity> extract_entities(std::string_view text, EntityProvider& provider) { return provider.extract(text); }

std::vector<Entity> extract_entities(std::string_view text) {
  HeuristicEntityProvider provider;
  return provider.extract(text);
}

void enrich_dataset(Dataset& dataset, EntityProvider& provider, const EnrichOptions& options) {
  auto fill = [&](std::vector<Entity>& entities, const std::string& text) {
    if (options.extract_entities && (options.overwrite || entities.empty())) entities = provider.extract(text);
  };
  for (auto& [name, subset] : dataset.subsets) {
    for (auto& [q_id, inst] : subset.instances) {
      if (options.classify_questions && (options.overwrite || !inst.question.question_type))
        inst.question.question_type = classify_question_type(inst.question);
      fill(inst.question.entities, inst.question.text);
      for (auto& a : inst.answers) fill(a.entities, a.text);
      for (auto& h : inst.hints) fill(h.entities, h.text);
    }
  }
}

}  // namespace hintkit
