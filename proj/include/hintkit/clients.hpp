#pragma once

// Abstract clients for every remote backend plus their HTTP implementations.
// Metrics and generation depend only on the abstract interfaces.
//
//   chat        POST {base}/chat/completions   (OpenAI-compatible)
//   embeddings  POST {base}/embeddings         (OpenAI-compatible)
//   pageviews   GET  Wikimedia per-article daily pageviews
//   scorer      POST {url} {"texts":[...]} -> {"scores":[...]}

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hintkit/remote.hpp"

namespace hintkit {

struct ChatMessage {
  std::string role;  // system | user | assistant
  std::string content;
};

struct ChatRequest {
  std::string model;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 512;
  std::optional<std::int64_t> seed;
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

struct EmbeddingVector {
  std::vector<float> values;
  std::string model;
};

class EmbeddingClient {
 public:
  virtual ~EmbeddingClient() = default;
  /// One vector per input, in input order.
  virtual std::vector<EmbeddingVector> embed(std::span<const std::string> texts) = 0;
};

struct PageviewResult {
  std::int64_t views = 0;
  bool not_found = false;
};

class PageviewClient {
 public:
  virtual ~PageviewClient() = default;
  virtual PageviewResult pageviews(std::string_view title, int window_days) = 0;
};

class ScorerClient {
 public:
  virtual ~ScorerClient() = default;
  virtual std::vector<double> score(std::span<const std::string> texts) = 0;
};

// ------------------------------------------------------------- implementations

class OpenAIChatClient final : public ChatClient {
 public:
  OpenAIChatClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config);

  std::string complete(const ChatRequest& request) override;

  const CallStats& stats() const { return stats_; }

  static std::string serialize(const ChatRequest& request);

 private:
  std::shared_ptr<HttpTransport> transport_;
  EndpointConfig config_;
  std::shared_ptr<Throttle> throttle_;
  CallStats stats_;
};

class OpenAIEmbeddingClient final : public EmbeddingClient {
 public:
  OpenAIEmbeddingClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config, std::string model,
                        std::size_t batch_size = 100);

  /// Inputs are split into batches of at most `batch_size`. Throws
  /// DimensionMismatch if the provider's dimension changes during the
  /// client's lifetime.
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;

  const CallStats& stats() const { return stats_; }
  std::optional<std::size_t> dimension() const;

 private:
  std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts);

  std::shared_ptr<HttpTransport> transport_;
  EndpointConfig config_;
  std::string model_;
  std::size_t batch_size_;
  std::shared_ptr<Throttle> throttle_;
  CallStats stats_;
  mutable std::mutex mutex_;
  std::optional<std::size_t> dimension_;
};

struct PageviewConfig {
  std::string base_url = "https://wikimedia.org/api/rest_v1/metrics/pageviews/per-article";
  std::string project = "en.wikipedia";
  std::string access = "all-access";
  std::string agent = "user";
  std::string user_agent = "hintkit/0.1 (hint evaluation toolkit)";
  RetryPolicy retry;
  ThrottleConfig throttle{4, 50.0, 50.0};
  Sleeper sleep;
  /// Returns "today"; the window ends the day before. Defaults to the system clock.
  std::function<std::chrono::sys_days()> today;
};

class WikimediaPageviewClient final : public PageviewClient {
 public:
  WikimediaPageviewClient(std::shared_ptr<HttpTransport> transport, PageviewConfig config = {});

  /// Sum of daily views over the `window_days` days ending yesterday. A 404
  /// yields 0 with `not_found` set. Results are cached per (title, window).
  PageviewResult pageviews(std::string_view title, int window_days) override;

  const CallStats& stats() const { return stats_; }

  /// "Nelson Mandela" -> "Nelson_Mandela", percent-encoded UTF-8.
  static std::string article_path_segment(std::string_view title);

 private:
  std::shared_ptr<HttpTransport> transport_;
  PageviewConfig config_;
  std::shared_ptr<Throttle> throttle_;
  CallStats stats_;
  std::mutex mutex_;
  std::map<std::pair<std::string, int>, PageviewResult> cache_;
};

class RemoteScorerClient final : public ScorerClient {
 public:
  /// `config.base_url` is the full scoring URL.
  RemoteScorerClient(std::shared_ptr<HttpTransport> transport, EndpointConfig config);
  std::vector<double> score(std::span<const std::string> texts) override;

 private:
  std::shared_ptr<HttpTransport> transport_;
  EndpointConfig config_;
  std::shared_ptr<Throttle> throttle_;
  CallStats stats_;
};

inline constexpr int kDefaultPageviewWindowDays = 30;

}  // namespace hintkit
