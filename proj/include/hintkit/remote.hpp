#pragma once

// Plumbing shared by the remote clients: retry with exponential backoff,
// per-endpoint concurrency/rate limits and a content-addressed response cache.

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "hintkit/http.hpp"

namespace hintkit {

using Sleeper = std::function<void(std::chrono::milliseconds)>;

Sleeper real_sleeper();

struct RetryPolicy {
  int max_attempts = 4;
  std::chrono::milliseconds base_backoff{500};
  double jitter = 0.2;  // fraction in [0,1]

  /// Delay before retry number `retry` (1-based): base * 2^(retry-1), scaled
  /// by (1 + jitter * (2u - 1)) for u in [0,1).
  std::chrono::milliseconds delay(int retry, double u) const;
};

struct ThrottleConfig {
  int max_in_flight = 4;
  double requests_per_second = 0.0;  // <= 0 disables the token bucket
  double burst = 4.0;
};

/// Caps concurrent requests and request rate for one endpoint.
class Throttle {
 public:
  explicit Throttle(ThrottleConfig config);

  class Permit {
   public:
    explicit Permit(Throttle& owner) : owner_(&owner) {}
    Permit(Permit&& other) noexcept : owner_(std::exchange(other.owner_, nullptr)) {}
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() {
      if (owner_) owner_->release();
    }

   private:
    Throttle* owner_;
  };

  [[nodiscard]] Permit acquire();
  int in_flight() const;
  int peak_in_flight() const;

 private:
  void release();

  ThrottleConfig config_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  int in_flight_ = 0;
  int peak_ = 0;
  double tokens_;
  std::chrono::steady_clock::time_point last_refill_;
};

/// Process-wide throttle shared by all clients of one endpoint origin.
std::shared_ptr<Throttle> throttle_for(const std::string& endpoint, const ThrottleConfig& config);

class ResponseCache {
 public:
  virtual ~ResponseCache() = default;
  virtual std::optional<std::string> get(const std::string& key) = 0;
  virtual void put(const std::string& key, const std::string& value) = 0;
};

class MemoryCache final : public ResponseCache {
 public:
  std::optional<std::string> get(const std::string& key) override;
  void put(const std::string& key, const std::string& value) override;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> entries_;
};

/// One file per key under `dir/<first two hex chars>/<key>`.
class DiskCache final : public ResponseCache {
 public:
  explicit DiskCache(std::filesystem::path dir);
  std::optional<std::string> get(const std::string& key) override;
  void put(const std::string& key, const std::string& value) override;

 private:
  std::filesystem::path file_for(const std::string& key) const;

  std::filesystem::path dir_;
  std::mutex mutex_;
};

/// SHA-256 over a namespace tag and the full serialized request.
std::string cache_key(std::string_view kind, std::string_view serialized_request);

struct EndpointConfig {
  std::string base_url;
  std::string api_key;
  RetryPolicy retry;
  ThrottleConfig throttle;
  std::shared_ptr<ResponseCache> cache;  // null disables caching
  Sleeper sleep;                         // null means real sleeping
};

struct CallStats {
  std::atomic<int> attempts{0};
  std::atomic<int> upstream_requests{0};
  std::atomic<int> cache_hits{0};
};

/// Sends `request`, retrying 429/5xx/connection failures per `policy`.
/// 401/403 throw AuthError at once. After the last attempt a 429 becomes
/// RateLimited and anything else TransportError. Other statuses are returned
/// to the caller unchanged.
HttpResponse send_with_retry(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                             const Sleeper& sleep, Throttle* throttle, CallStats* stats);

}  // namespace hintkit
