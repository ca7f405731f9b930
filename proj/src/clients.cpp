#include <algorithm>
#include <cctype>
#include <cstdio>
#include <iterator>

#include <nlohmann/json.hpp>

#include "hintkit/clients.hpp"
#include "hintkit/error.hpp"

namespace hintkit {

namespace {

using Json = nlohmann::json;

std::vector<std::pair<std::string, std::string>> json_headers(const std::string& api_key) {
  std::vector<std::pair<std::string, std::string>> headers{{"Content-Type", "application/json"},
                                                           {"Accept", "application/json"}};
  if (!api_key.empty()) headers.emplace_back("Authorization", "Bearer " + api_key);
  return headers;
}

Json parse_body(const HttpResponse& response, const std::string& url) {
  try {
    return Json::parse(response.body);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorKind::TransportError, std::string("response is not JSON: ") + e.what(), url);
  }
}

void require_success(const HttpResponse& response, const std::string& url) {
  if (response.status < 200 || response.status >= 300)
    throw Error(ErrorKind::TransportError,
                "HTTP " + std::to_string(response.status) + ": " + response.body.substr(0, 200), url);
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::string yyyymmdd(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d%02u%02u", static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                static_cast<unsigned>(ymd.day()));
  return buf;
}

Sleeper or_real(const Sleeper& s) { return s ? s : real_sleeper(); }

}  // namespace

// ---------------------------------------------------------------------- chat

OpenAIChatClient::OpenAIChatClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      throttle_(throttle_for(config_.base_url, config_.throttle)) {
  config_.base_url = trim_base_url(config_.base_url);
  config_.sleep = or_real(config_.sleep);
}

std::string OpenAIChatClient::serialize(const ChatRequest& request) {
  Json messages = Json::array();
  for (const auto& m : request.messages) messages.push_back({{"role", m.role}, {"content", m.content}});
  Json body = {{"model", request.model},
               {"messages", std::move(messages)},
               {"temperature", request.temperature},
               {"max_tokens", request.max_tokens}};
  if (request.seed) body["seed"] = *request.seed;
  return body.dump();
}

std::string OpenAIChatClient::complete(const ChatRequest& request) {
  if (request.messages.empty()) throw Error(ErrorKind::InvalidArgument, "chat request has no messages");
  for (const auto& m : request.messages)
    if (m.role != "system" && m.role != "user" && m.role != "assistant")
      throw Error(ErrorKind::InvalidArgument, "invalid chat role \"" + m.role + "\"");
  if (request.temperature < 0.0) throw Error(ErrorKind::InvalidArgument, "temperature must be >= 0");
  if (request.max_tokens <= 0) throw Error(ErrorKind::InvalidArgument, "max_tokens must be > 0");
  if (config_.base_url.empty()) throw Error(ErrorKind::BackendUnavailable, "chat endpoint is not configured", "chat");

  const auto body = serialize(request);
  const auto key = cache_key("chat:" + config_.base_url, body);
  if (config_.cache) {
    if (auto hit = config_.cache->get(key)) {
      ++stats_.cache_hits;
      return *hit;
    }
  }

  HttpRequest http{"POST", config_.base_url + "/chat/completions", json_headers(config_.api_key), body};
  const auto response = send_with_retry(*transport_, http, config_.retry, config_.sleep, throttle_.get(), &stats_);
  require_success(response, http.url);
  const auto j = parse_body(response, http.url);

  std::string content;
  try {
    const auto& msg = j.at("choices").at(0).at("message");
    if (msg.contains("content") && msg["content"].is_string()) content = msg["content"].get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::TransportError, std::string("unexpected chat response shape: ") + e.what(), http.url);
  }
  if (is_blank(content)) throw Error(ErrorKind::EmptyCompletion, "model returned no text", request.model);
  if (config_.cache) config_.cache->put(key, content);
  return content;
}

// ---------------------------------------------------------------- embeddings

OpenAIEmbeddingClient::OpenAIEmbeddingClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config,
                                             std::string model, std::size_t batch_size)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      model_(std::move(model)),
      batch_size_(std::max<std::size_t>(batch_size, 1)),
      throttle_(throttle_for(config_.base_url, config_.throttle)) {
  config_.base_url = trim_base_url(config_.base_url);
  config_.sleep = or_real(config_.sleep);
}

std::optional<std::size_t> OpenAIEmbeddingClient::dimension() const {
  std::lock_guard lock(mutex_);
  return dimension_;
}

std::vector<EmbeddingVector> OpenAIEmbeddingClient::embed(std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorKind::InvalidArgument, "embed() needs at least one text");
  if (config_.base_url.empty())
    throw Error(ErrorKind::BackendUnavailable, "embedding endpoint is not configured", "embeddings");
  std::vector<EmbeddingVector> out;
  out.reserve(texts.size());
  for (std::size_t start = 0; start < texts.size(); start += batch_size_) {
    auto batch = embed_batch(texts.subspan(start, std::min(batch_size_, texts.size() - start)));
    std::move(batch.begin(), batch.end(), std::back_inserter(out));
  }
  return out;
}

std::vector<EmbeddingVector> OpenAIEmbeddingClient::embed_batch(std::span<const std::string> texts) {
  const Json body_json = {{"model", model_}, {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  const auto body = body_json.dump();
  const auto key = cache_key("embed:" + config_.base_url, body);

  std::string payload;
  std::optional<std::string> hit;
  if (config_.cache) hit = config_.cache->get(key);
  if (hit) {
    ++stats_.cache_hits;
    payload = std::move(*hit);
  } else {
    HttpRequest http{"POST", config_.base_url + "/embeddings", json_headers(config_.api_key), body};
    const auto response = send_with_retry(*transport_, http, config_.retry, config_.sleep, throttle_.get(), &stats_);
    require_success(response, http.url);
    payload = response.body;
  }

  const auto url = config_.base_url + "/embeddings";
  const auto j = parse_body(HttpResponse{200, payload}, url);
  std::vector<EmbeddingVector> out(texts.size());
  std::vector<bool> seen(texts.size(), false);
  try {
    const auto& data = j.at("data");
    if (data.size() != texts.size())
      throw Error(ErrorKind::TransportError,
                  "expected " + std::to_string(texts.size()) + " embeddings, got " + std::to_string(data.size()), url);
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto index = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
      if (index >= texts.size() || seen[index]) throw Error(ErrorKind::TransportError, "bad embedding index", url);
      seen[index] = true;
      out[index].values = data[i].at("embedding").get<std::vector<float>>();
      out[index].model = j.value("model", model_);
    }
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::TransportError, std::string("unexpected embedding response shape: ") + e.what(), url);
  }

  {
    std::lock_guard lock(mutex_);
    for (const auto& v : out) {
      if (!dimension_) dimension_ = v.values.size();
      if (v.values.size() != *dimension_)
        throw Error(ErrorKind::DimensionMismatch,
                    "embedding dimension changed from " + std::to_string(*dimension_) + " to " +
                        std::to_string(v.values.size()),
                    model_);
    }
  }
  if (config_.cache && !hit) config_.cache->put(key, payload);
  return out;
}

// ----------------------------------------------------------------- pageviews

WikimediaPageviewClient::WikimediaPageviewClient(std::shared_ptr<HttpTransport> transport, PageviewConfig config)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      throttle_(throttle_for(config_.base_url, config_.throttle)) {
  config_.base_url = trim_base_url(config_.base_url);
  config_.sleep = or_real(config_.sleep);
  if (!config_.today)
    config_.today = [] { return std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now()); };
}

std::string WikimediaPageviewClient::article_path_segment(std::string_view title) {
  std::string underscored(title);
  std::replace(underscored.begin(), underscored.end(), ' ', '_');
  return percent_encode(underscored);
}

PageviewResult WikimediaPageviewClient::pageviews(std::string_view title, int window_days) {
  if (title.empty()) throw Error(ErrorKind::InvalidArgument, "page title is empty");
  if (window_days < 1) throw Error(ErrorKind::InvalidArgument, "window must be at least one day");
  const auto cache_id = std::make_pair(std::string(title), window_days);
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(cache_id); it != cache_.end()) {
      ++stats_.cache_hits;
      return it->second;
    }
  }

  const auto end = config_.today() - std::chrono::days{1};
  const auto start = end - std::chrono::days{window_days - 1};
  const auto url = config_.base_url + "/" + config_.project + "/" + config_.access + "/" + config_.agent + "/" +
                   article_path_segment(title) + "/daily/" + yyyymmdd(start) + "00/" + yyyymmdd(end) + "00";
  HttpRequest http{"GET", url, {{"Accept", "application/json"}, {"User-Agent", config_.user_agent}}, {}};
  const auto response = send_with_retry(*transport_, http, config_.retry, config_.sleep, throttle_.get(), &stats_);

  PageviewResult result;
  if (response.status == 404) {
    result.not_found = true;
  } else {
    require_success(response, url);
    const auto j = parse_body(response, url);
    try {
      for (const auto& item : j.at("items")) result.views += item.at("views").get<std::int64_t>();
    } catch (const Json::exception& e) {
      throw Error(ErrorKind::TransportError, std::string("unexpected pageviews response shape: ") + e.what(), url);
    }
  }
  std::lock_guard lock(mutex_);
  cache_.emplace(cache_id, result);
  return result;
}

// -------------------------------------------------------------------- scorer

RemoteScorerClient::RemoteScorerClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config)
    : transport_(std::move(transport)),
      config_(std::move(config)),
      throttle_(throttle_for(config_.base_url, config_.throttle)) {
  config_.sleep = or_real(config_.sleep);
}

std::vector<double> RemoteScorerClient::score(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  if (config_.base_url.empty()) throw Error(ErrorKind::BackendUnavailable, "scorer endpoint is not configured");
  const Json body = {{"texts", std::vector<std::string>(texts.begin(), texts.end())}};
  HttpRequest http{"POST", config_.base_url, json_headers(config_.api_key), body.dump()};
  const auto response = send_with_retry(*transport_, http, config_.retry, config_.sleep, throttle_.get(), &stats_);
  require_success(response, http.url);
  const auto j = parse_body(response, http.url);
  std::vector<double> scores;
  try {
    scores = j.at("scores").get<std::vector<double>>();
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::TransportError, std::string("unexpected scorer response shape: ") + e.what(), http.url);
  }
  if (scores.size() != texts.size())
    throw Error(ErrorKind::TransportError, "scorer returned " + std::to_string(scores.size()) + " scores for " +
                                               std::to_string(texts.size()) + " texts",
                http.url);
  return scores;
}

}  // namespace hintkit
