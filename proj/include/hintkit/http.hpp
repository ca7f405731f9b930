#pragma once

// Minimal HTTP abstraction. Every remote client talks through HttpTransport so
// tests can substitute scripted transports or local stub servers.

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hintkit {

struct HttpRequest {
  std::string method = "GET";
  std::string url;
  std::vector<std::pair<std::string, std::string>> headers;
  std::string body;
};

struct HttpResponse {
  int status = 0;
  std::string body;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  /// Returns any HTTP status; throws TransportError when no response arrives.
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

struct HttpTimeouts {
  std::chrono::seconds connect{10};
  std::chrono::seconds read{120};
};

/// cpp-httplib backed transport (http and https).
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(HttpTimeouts timeouts = {});
  HttpResponse send(const HttpRequest& request) override;

 private:
  HttpTimeouts timeouts_;
};

/// Refuses every request with ErrorKind::Offline.
class OfflineTransport final : public HttpTransport {
 public:
  HttpResponse send(const HttpRequest& request) override;
};

/// Adapts a callable; handy for scripted test doubles.
class CallbackTransport final : public HttpTransport {
 public:
  using Handler = std::function<HttpResponse(const HttpRequest&)>;
  explicit CallbackTransport(Handler handler) : handler_(std::move(handler)) {}
  HttpResponse send(const HttpRequest& request) override { return handler_(request); }

 private:
  Handler handler_;
};

/// True when HINTKIT_OFFLINE=1.
bool offline_mode();

/// OfflineTransport under HINTKIT_OFFLINE=1, otherwise HttplibTransport.
std::shared_ptr<HttpTransport> make_default_transport();

struct ParsedUrl {
  std::string scheme;
  std::string host;
  int port = 0;
  std::string target;  // path + query, always starting with '/'

  std::string origin() const;
};

ParsedUrl parse_url(std::string_view url);

/// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string percent_encode(std::string_view text);

/// Strips trailing slashes so endpoint paths can be appended.
std::string trim_base_url(std::string_view url);

}  // namespace hintkit
