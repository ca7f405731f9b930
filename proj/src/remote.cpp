#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <spdlog/spdlog.h>

#include "hintkit/dataset_io.hpp"
#include "hintkit/digest.hpp"
#include "hintkit/error.hpp"
#include "hintkit/remote.hpp"

namespace hintkit {

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

std::chrono::milliseconds RetryPolicy::delay(int retry, double u) const {
  const double base = static_cast<double>(base_backoff.count()) * std::ldexp(1.0, std::max(retry - 1, 0));
  const double j = std::clamp(jitter, 0.0, 1.0);
  const double scaled = base * (1.0 + j * (2.0 * u - 1.0));
  return std::chrono::milliseconds(static_cast<long long>(std::max(scaled, 0.0)));
}

// ------------------------------------------------------------------ throttle

Throttle::Throttle(ThrottleConfig config)
    : config_(config), tokens_(std::max(config.burst, 1.0)), last_refill_(std::chrono::steady_clock::now()) {
  if (config_.max_in_flight < 1) config_.max_in_flight = 1;
}

Throttle::Permit Throttle::acquire() {
  std::unique_lock lock(mutex_);
  cv_.wait(lock, [&] { return in_flight_ < config_.max_in_flight; });
  if (config_.requests_per_second > 0.0) {
    for (;;) {
      const auto now = std::chrono::steady_clock::now();
      const double elapsed = std::chrono::duration<double>(now - last_refill_).count();
      tokens_ = std::min(std::max(config_.burst, 1.0), tokens_ + elapsed * config_.requests_per_second);
      last_refill_ = now;
      if (tokens_ >= 1.0) break;
      const auto wait = std::chrono::duration<double>((1.0 - tokens_) / config_.requests_per_second);
      cv_.wait_for(lock, wait);
    }
    tokens_ -= 1.0;
  }
  ++in_flight_;
  peak_ = std::max(peak_, in_flight_);
  return Permit(*this);
}

void Throttle::release() {
  {
    std::lock_guard lock(mutex_);
    --in_flight_;
  }
  cv_.notify_all();
}

int Throttle::in_flight() const {
  std::lock_guard lock(mutex_);
  return in_flight_;
}

int Throttle::peak_in_flight() const {
  std::lock_guard lock(mutex_);
  return peak_;
}

std::shared_ptr<Throttle> throttle_for(const std::string& endpoint, const ThrottleConfig& config) {
  static std::mutex mutex;
  static std::map<std::string, std::weak_ptr<Throttle>> registry;
  std::string key = endpoint;
  try {
    key = parse_url(endpoint).origin();
  } catch (const Error&) {
  }
  std::lock_guard lock(mutex);
  if (auto existing = registry[key].lock()) return existing;
  auto created = std::make_shared<Throttle>(config);
  registry[key] = created;
  return created;
}

// --------------------------------------------------------------------- cache

std::optional<std::string> MemoryCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void MemoryCache::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  entries_.insert_or_assign(key, value);
}

std::size_t MemoryCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

DiskCache::DiskCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

std::filesystem::path DiskCache::file_for(const std::string& key) const {
  return dir_ / key.substr(0, 2) / key;
}

std::optional<std::string> DiskCache::get(const std::string& key) {
  std::lock_guard lock(mutex_);
  const auto path = file_for(key);
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return std::nullopt;
  try {
    return read_file(path);
  } catch (const Error&) {
    return std::nullopt;
  }
}

void DiskCache::put(const std::string& key, const std::string& value) {
  std::lock_guard lock(mutex_);
  write_file_atomic(file_for(key), value);
}

std::string cache_key(std::string_view kind, std::string_view serialized_request) {
  std::string material(kind);
  material.push_back('\n');
  material.append(serialized_request);
  return sha256_hex(material);
}

// --------------------------------------------------------------------- retry

HttpResponse send_with_retry(HttpTransport& transport, const HttpRequest& request, const RetryPolicy& policy,
                             const Sleeper& sleep, Throttle* throttle, CallStats* stats) {
  thread_local std::mt19937_64 rng{std::random_device{}()};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const int attempts = std::max(policy.max_attempts, 1);
  bool last_was_429 = false;
  std::string last_problem;

  for (int attempt = 1; attempt <= attempts; ++attempt) {
    if (attempt > 1) {
      const auto d = policy.delay(attempt - 1, unit(rng));
      if (sleep)
        sleep(d);
      else
        std::this_thread::sleep_for(d);
    }
    if (stats) ++stats->attempts;
    try {
      std::optional<Throttle::Permit> permit;
      if (throttle) permit.emplace(throttle->acquire());
      if (stats) ++stats->upstream_requests;
      auto response = transport.send(request);
      if (response.status == 401 || response.status == 403)
        throw Error(ErrorKind::AuthError, "endpoint rejected credentials (HTTP " + std::to_string(response.status) + ")",
                    request.url);
      if (response.status == 429 || response.status >= 500) {
        last_was_429 = response.status == 429;
        last_problem = "HTTP " + std::to_string(response.status);
        spdlog::debug("{} {} -> {} (attempt {}/{})", request.method, request.url, response.status, attempt, attempts);
        continue;
      }
      return response;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::TransportError) throw;
      last_was_429 = false;
      last_problem = e.what();
      spdlog::debug("{} {} failed: {} (attempt {}/{})", request.method, request.url, e.what(), attempt, attempts);
    }
  }
  if (last_was_429)
    throw Error(ErrorKind::RateLimited, "still rate limited after " + std::to_string(attempts) + " attempts", request.url);
  throw Error(ErrorKind::TransportError, last_problem + " after " + std::to_string(attempts) + " attempts", request.url);
}

}  // namespace hintkit
