#pragma once

// Shared test helpers: temp dirs, env overrides, random dataset generation,
// scripted backends and a local HTTP stub server.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "hintkit/clients.hpp"
#include "hintkit/model.hpp"

namespace httplib {
class Server;
struct Request;
struct Response;
}  // namespace httplib

namespace hintkit::test {

namespace fs = std::filesystem;

fs::path data_dir();
Dataset load_fixture();

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(std::string_view name) const { return path_ / name; }

 private:
  fs::path path_;
};

/// Sets (or unsets, with nullopt) an environment variable for its lifetime.
class ScopedEnv {
 public:
  ScopedEnv(std::string name, std::optional<std::string> value);
  ~ScopedEnv();
  ScopedEnv(const ScopedEnv&) = delete;
  ScopedEnv& operator=(const ScopedEnv&) = delete;

 private:
  std::string name_;
  std::optional<std::string> previous_;
};

// ----------------------------------------------------------- random inputs

using Rng = std::mt19937_64;

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi);  // inclusive
double uniform_real(Rng& rng, double lo, double hi);
bool coin(Rng& rng, double p = 0.5);

/// Lowercase ASCII word, occasionally with accented or non-Latin letters.
std::string random_word(Rng& rng);
/// Capitalized sentence of `lo..hi` words ending in '.', '?' or '!'.
std::string random_sentence(Rng& rng, std::size_t lo = 3, std::size_t hi = 14);
/// Free text with punctuation, digits and stray symbols; may be empty.
std::string random_text(Rng& rng, std::size_t max_words = 30);
std::vector<std::string> random_tokens(Rng& rng, std::size_t lo, std::size_t hi, std::size_t vocab);

/// A dataset satisfying every model invariant, with nested metadata, metric
/// details, entities on non-ASCII text and q_ids containing '/' and '~'.
Dataset random_dataset(Rng& rng);

// ------------------------------------------------------------------ fakes

/// Replies from a list in order; the last reply repeats once exhausted.
class ScriptedChat final : public ChatClient {
 public:
  explicit ScriptedChat(std::vector<std::string> replies) : replies_(std::move(replies)) {}
  std::string complete(const ChatRequest& request) override;
  std::vector<ChatRequest> requests() const;
  std::size_t calls() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> replies_;
  std::vector<ChatRequest> requests_;
  std::size_t next_ = 0;
};

class FunctionChat final : public ChatClient {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  explicit FunctionChat(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const ChatRequest& request) override {
    ++calls;
    return fn_(request);
  }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

/// Text of the last user message in a chat request.
std::string last_user_message(const ChatRequest& request);

/// Explicit vectors per text; unknown texts get a deterministic pseudo-random
/// vector derived from their bytes.
class TableEmbedder final : public EmbeddingClient {
 public:
  explicit TableEmbedder(std::size_t dim = 8, std::map<std::string, std::vector<float>> table = {})
      : dim_(dim), table_(std::move(table)) {}
  std::vector<EmbeddingVector> embed(std::span<const std::string> texts) override;
  std::atomic<int> calls{0};

 private:
  std::size_t dim_;
  std::map<std::string, std::vector<float>> table_;
};

class FakePageviews final : public PageviewClient {
 public:
  explicit FakePageviews(std::map<std::string, std::int64_t> views) : views_(std::move(views)) {}
  PageviewResult pageviews(std::string_view title, int window_days) override;
  std::atomic<int> calls{0};

 private:
  std::map<std::string, std::int64_t> views_;
};

class FakeScorer final : public ScorerClient {
 public:
  using Fn = std::function<double(const std::string&)>;
  explicit FakeScorer(Fn fn) : fn_(std::move(fn)) {}
  std::vector<double> score(std::span<const std::string> texts) override;

 private:
  Fn fn_;
};

// ------------------------------------------------------------ stub server

/// httplib server bound to 127.0.0.1 on an ephemeral port, serving from a
/// background thread until destroyed.
class StubServer {
 public:
  using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

  StubServer();
  ~StubServer();
  StubServer(const StubServer&) = delete;
  StubServer& operator=(const StubServer&) = delete;

  void get(const std::string& pattern, Handler handler);
  void post(const std::string& pattern, Handler handler);
  /// Starts listening; call after registering handlers.
  void start();
  std::string url() const;
  int port() const { return port_; }
  int hits() const { return hits_.load(); }

 private:
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> hits_{0};
};

/// OpenAI-style chat completion body carrying `content`.
std::string chat_completion_body(std::string_view content);

/// Deterministic reply for hint-generation prompts: five numbered hints built
/// from the longest words of the "Question:" line.
std::string scripted_hint_reply(std::string_view user_prompt);

}  // namespace hintkit::test
