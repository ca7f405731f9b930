#include <httplib.h>

#include <cstdlib>

#include "hintkit/error.hpp"
#include "hintkit/http.hpp"

namespace hintkit {

std::string ParsedUrl::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

ParsedUrl parse_url(std::string_view url) {
  ParsedUrl out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string_view::npos) throw Error(ErrorKind::InvalidArgument, "URL has no scheme", std::string(url));
  out.scheme = std::string(url.substr(0, scheme_end));
  if (out.scheme != "http" && out.scheme != "https")
    throw Error(ErrorKind::InvalidArgument, "unsupported URL scheme", std::string(url));
  auto rest = url.substr(scheme_end + 3);
  const auto path_start = rest.find_first_of("/?");
  auto authority = rest.substr(0, path_start);
  out.target = path_start == std::string_view::npos ? "/" : std::string(rest.substr(path_start));
  if (!out.target.starts_with("/")) out.target.insert(out.target.begin(), '/');
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    out.host = std::string(authority.substr(0, colon));
    out.port = std::atoi(std::string(authority.substr(colon + 1)).c_str());
  } else {
    out.host = std::string(authority);
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty() || out.port <= 0) throw Error(ErrorKind::InvalidArgument, "malformed URL", std::string(url));
  return out;
}

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if ((c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-' || c == '.' ||
        c == '_' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

std::string trim_base_url(std::string_view url) {
  while (url.ends_with('/')) url.remove_suffix(1);
  return std::string(url);
}

bool offline_mode() {
  const char* v = std::getenv("HINTKIT_OFFLINE");
  return v != nullptr && std::string_view(v) == "1";
}

std::shared_ptr<HttpTransport> make_default_transport() {
  if (offline_mode()) return std::make_shared<OfflineTransport>();
  return std::make_shared<HttplibTransport>();
}

HttpResponse OfflineTransport::send(const HttpRequest& request) {
  throw Error(ErrorKind::Offline, "network access disabled by HINTKIT_OFFLINE=1", request.url);
}

HttplibTransport::HttplibTransport(HttpTimeouts timeouts) : timeouts_(timeouts) {}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
  const auto url = parse_url(request.url);
  httplib::Client client(url.origin());
  client.set_connection_timeout(timeouts_.connect);
  client.set_read_timeout(timeouts_.read);
  client.set_follow_location(true);

  httplib::Request req;
  req.method = request.method;
  req.path = url.target;
  for (const auto& [k, v] : request.headers) req.headers.emplace(k, v);
  req.body = request.body;

  httplib::Response res;
  httplib::Error err = httplib::Error::Success;
  if (!client.send(req, res, err))
    throw Error(ErrorKind::TransportError, httplib::to_string(err), request.method + " " + request.url);
  return HttpResponse{res.status, std::move(res.body)};
}

}  // namespace hintkit
