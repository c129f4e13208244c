#include "http_client.hpp"

#include <httplib.h>

#include <stdexcept>

namespace minuteman::detail {

HttpEndpoint parse_endpoint(const std::string& url) {
  auto scheme = url.find("://");
  auto host_start = scheme == std::string::npos ? 0 : scheme + 3;
  auto slash = url.find('/', host_start);
  if (slash == std::string::npos) return {url, ""};
  std::string prefix = url.substr(slash);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  return {url.substr(0, slash), prefix};
}

std::string http_request(const HttpEndpoint& endpoint, const std::string& method,
                         const std::string& path, const std::string& body,
                         const std::string& content_type, std::chrono::milliseconds timeout) {
  httplib::Client client(endpoint.origin);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  const auto target = endpoint.path_prefix + path;
  httplib::Result result = method == "GET"   ? client.Get(target)
                           : method == "PUT" ? client.Put(target, body, content_type)
                                             : client.Post(target, body, content_type);
  if (!result) {
    throw std::runtime_error(method + " " + endpoint.origin + target +
                             " failed: " + httplib::to_string(result.error()));
  }
  if (result->status < 200 || result->status >= 300) {
    throw std::runtime_error(method + " " + target + " returned HTTP " +
                             std::to_string(result->status) + ": " + result->body);
  }
  return result->body;
}

}  // namespace minuteman::detail
