#pragma once

#include <chrono>
#include <string>

namespace minuteman::detail {

/// Splits "http://host:port/prefix" into the scheme-host-port part understood
/// by httplib::Client and the path prefix.
struct HttpEndpoint {
  std::string origin;
  std::string path_prefix;
};

HttpEndpoint parse_endpoint(const std::string& url);

/// Sends one request and returns the response body. Throws
/// std::runtime_error on a transport failure or a non-2xx status.
std::string http_request(const HttpEndpoint& endpoint, const std::string& method,
                         const std::string& path, const std::string& body,
                         const std::string& content_type, std::chrono::milliseconds timeout);

inline std::string http_post(const HttpEndpoint& endpoint, const std::string& path,
                             const std::string& body, const std::string& content_type,
                             std::chrono::milliseconds timeout) {
  return http_request(endpoint, "POST", path, body, content_type, timeout);
}

}  // namespace minuteman::detail
