#pragma once

#include <chrono>
#include <map>
#include <string>

#include "dmlkit/error.hpp"

namespace dmlkit::http {

/// Connection-level failure. retryable() is false only for errors that a
/// repeated request cannot fix (e.g. a malformed URL).
class TransportError : public Error {
 public:
  TransportError(const std::string& message, bool retryable)
      : Error(ErrorKind::Transport, message), retryable_(retryable) {}

  bool retryable() const noexcept { return retryable_; }

 private:
  bool retryable_;
};

struct Response {
  int status = 0;
  std::string body;
  std::string content_type;
};

using Headers = std::multimap<std::string, std::string>;

class Transport {
 public:
  virtual ~Transport() = default;

  virtual Response get(const std::string& url) = 0;
  virtual Response post(const std::string& url, const std::string& body,
                        const std::string& content_type, const Headers& headers = {}) = 0;
};

struct UrlParts {
  std::string scheme_host_port;  // "http://host:port"
  std::string path_and_query;    // "/oai?verb=..."
};

UrlParts split_url(const std::string& url);

std::string percent_encode(std::string_view s);

/// Blocking client over cpp-httplib; one connection per request.
class HttplibTransport final : public Transport {
 public:
  explicit HttplibTransport(std::chrono::seconds connect_timeout = std::chrono::seconds(10),
                            std::chrono::seconds read_timeout = std::chrono::seconds(60));

  Response get(const std::string& url) override;
  Response post(const std::string& url, const std::string& body, const std::string& content_type,
                const Headers& headers = {}) override;

 private:
  std::chrono::seconds connect_timeout_;
  std::chrono::seconds read_timeout_;
};

}  // namespace dmlkit::http
