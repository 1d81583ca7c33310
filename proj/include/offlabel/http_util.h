#pragma once

#include <chrono>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

// Thin JSON-over-HTTP helpers shared by the model client and the plug-ins.

namespace offlabel {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 80;
  std::string path;  // always starts with '/'

  std::string origin() const;
};

// Throws ValidationError for anything but http(s)://host[:port][/path].
Url parse_url(std::string_view url);

struct HttpResult {
  bool transport_ok = false;  // false: connection/timeout failure
  int status = 0;
  std::string body;
  std::string error;           // transport error description
  double retry_after_s = -1;   // parsed Retry-After header, if any
};

using HeaderList = std::vector<std::pair<std::string, std::string>>;

HttpResult post_json(const Url& url, const std::string& body,
                     const HeaderList& headers,
                     std::chrono::milliseconds timeout);

}  // namespace offlabel
