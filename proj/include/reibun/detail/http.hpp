#pragma once

// Thin helpers over cpp-httplib shared by the HTTP clients. Only include
// from .cpp files; httplib is heavy.

#include <chrono>
#include <memory>
#include <stdexcept>
#include <string>

#include <httplib.h>

namespace reibun::detail {

struct ParsedUrl {
  std::string scheme_host_port;  // e.g. "https://api.example.com:443"
  std::string path_prefix;       // e.g. "/v1" (no trailing slash)
};

inline ParsedUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL lacks scheme: " + url);
  auto path_start = url.find('/', scheme_end + 3);
  ParsedUrl out;
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
    while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  }
  return out;
}

inline std::unique_ptr<httplib::Client> make_client(const ParsedUrl& url,
                                                    std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(url.scheme_host_port);
  client->set_connection_timeout(timeout);
  client->set_read_timeout(timeout);
  client->set_write_timeout(timeout);
  return client;
}

inline bool is_timeout(httplib::Error e) {
  return e == httplib::Error::ConnectionTimeout || e == httplib::Error::Read;
}

}  // namespace reibun::detail
