#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "offlabel/http_util.h"

#include <charconv>
#include <cstdlib>

#include "httplib.h"
#include "offlabel/error.h"

namespace offlabel {

std::string Url::origin() const {
  return scheme + "://" + host + ":" + std::to_string(port);
}

Url parse_url(std::string_view url) {
  Url out;
  auto sep = url.find("://");
  if (sep == std::string_view::npos) {
    throw ValidationError("URL must start with http:// or https://: " +
                          std::string(url));
  }
  out.scheme = std::string(url.substr(0, sep));
  if (out.scheme != "http" && out.scheme != "https") {
    throw ValidationError("unsupported URL scheme '" + out.scheme + "'");
  }
  out.port = out.scheme == "https" ? 443 : 80;
  auto rest = url.substr(sep + 3);
  auto slash = rest.find('/');
  auto authority = rest.substr(0, slash);
  out.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  auto colon = authority.rfind(':');
  if (colon != std::string_view::npos) {
    auto port = authority.substr(colon + 1);
    int value = 0;
    auto r = std::from_chars(port.data(), port.data() + port.size(), value);
    if (r.ec != std::errc{} || r.ptr != port.data() + port.size() ||
        value <= 0 || value > 65535) {
      throw ValidationError("bad port in URL " + std::string(url));
    }
    out.port = value;
    authority = authority.substr(0, colon);
  }
  if (authority.empty()) {
    throw ValidationError("missing host in URL " + std::string(url));
  }
  out.host = std::string(authority);
  return out;
}

HttpResult post_json(const Url& url, const std::string& body,
                     const HeaderList& headers,
                     std::chrono::milliseconds timeout) {
  httplib::Client client(url.origin());
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  HttpResult result;
  auto res = client.Post(url.path, h, body, "application/json");
  if (!res) {
    result.error = httplib::to_string(res.error());
    return result;
  }
  result.transport_ok = true;
  result.status = res->status;
  result.body = res->body;
  if (res->has_header("Retry-After")) {
    const std::string v = res->get_header_value("Retry-After");
    char* end = nullptr;
    double secs = std::strtod(v.c_str(), &end);
    if (end != v.c_str() && secs >= 0) result.retry_after_s = secs;
  }
  return result;
}

}  // namespace offlabel
