#include "dmlkit/http_transport.hpp"

#include <httplib.h>

#include <regex>

namespace dmlkit::http {

UrlParts split_url(const std::string& url) {
  static const std::regex pattern(R"(^(https?://[^/?#]+)([/?][^#]*)?(#.*)?$)", std::regex::icase);
  std::smatch m;
  if (!std::regex_match(url, m, pattern)) {
    throw TransportError("not an absolute http(s) URL: " + url, false);
  }
  UrlParts parts{m[1].str(), m[2].matched ? m[2].str() : std::string("/")};
  if (parts.path_and_query.front() == '?') parts.path_and_query.insert(0, "/");
  return parts;
}

std::string percent_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (char c : s) {
    const auto u = static_cast<unsigned char>(c);
    if ((u >= 'A' && u <= 'Z') || (u >= 'a' && u <= 'z') || (u >= '0' && u <= '9') || u == '-' ||
        u == '.' || u == '_' || u == '~') {
      out.push_back(c);
    } else {
      out.push_back('%');
      out.push_back(kHex[u >> 4]);
      out.push_back(kHex[u & 0x0F]);
    }
  }
  return out;
}

HttplibTransport::HttplibTransport(std::chrono::seconds connect_timeout,
                                   std::chrono::seconds read_timeout)
    : connect_timeout_(connect_timeout), read_timeout_(read_timeout) {}

namespace {

httplib::Client make_client(const UrlParts& parts, std::chrono::seconds connect,
                            std::chrono::seconds read) {
  httplib::Client client(parts.scheme_host_port);
  if (!client.is_valid()) {
    throw TransportError("unsupported URL scheme (TLS not compiled in?): " + parts.scheme_host_port,
                         false);
  }
  client.set_connection_timeout(connect);
  client.set_read_timeout(read);
  client.set_follow_location(true);
  return client;
}

Response convert(const httplib::Result& result, const std::string& url) {
  if (!result) {
    throw TransportError("request to " + url + " failed: " + httplib::to_string(result.error()),
                         true);
  }
  return Response{result->status, result->body, result->get_header_value("Content-Type")};
}

}  // namespace

Response HttplibTransport::get(const std::string& url) {
  const auto parts = split_url(url);
  auto client = make_client(parts, connect_timeout_, read_timeout_);
  return convert(client.Get(parts.path_and_query), url);
}

Response HttplibTransport::post(const std::string& url, const std::string& body,
                                const std::string& content_type, const Headers& headers) {
  const auto parts = split_url(url);
  auto client = make_client(parts, connect_timeout_, read_timeout_);
  httplib::Headers h(headers.begin(), headers.end());
  return convert(client.Post(parts.path_and_query, h, body, content_type), url);
}

}  // namespace dmlkit::http
