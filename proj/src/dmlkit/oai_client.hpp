#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "dmlkit/http_transport.hpp"
#include "dmlkit/oai_record.hpp"

namespace dmlkit::oai {

inline constexpr std::string_view kPrefixOaiDc = "oai_dc";
inline constexpr std::string_view kPrefixJunii2 = "junii2";

bool is_supported_prefix(std::string_view prefix) noexcept;

struct EndpointConfig {
  std::string name;
  std::string base_url;
  std::string metadata_prefix;
  std::optional<std::string> set_spec;
  std::optional<std::string> from_date;
  std::optional<std::string> until_date;

  /// Throws ValidationError naming the offending field.
  void validate() const;
};

struct HarvestOptions {
  std::chrono::milliseconds request_delay{0};
  /// Extra attempts per page after a retryable transport failure.
  int max_retries = 2;
  std::chrono::milliseconds retry_backoff{100};
};

struct HarvestResult {
  std::vector<OaiRecord> records;
  std::size_t pages = 0;
  std::size_t served = 0;  // records received before dedupe
  bool restarted = false;  // whole harvest re-run after token rejection
};

/// A transport failure with harvest context attached.
class HarvestError : public Error {
 public:
  HarvestError(ErrorKind kind, const std::string& endpoint, std::size_t page,
               const std::string& cause, bool retryable)
      : Error(kind, "endpoint '" + endpoint + "', page " + std::to_string(page) + ": " + cause),
        endpoint_(endpoint),
        page_(page),
        retryable_(retryable) {}

  const std::string& endpoint() const noexcept { return endpoint_; }
  std::size_t page() const noexcept { return page_; }
  bool retryable() const noexcept { return retryable_; }

 private:
  std::string endpoint_;
  std::size_t page_;
  bool retryable_;
};

/// First-page URL when token is empty, continuation URL otherwise.
std::string list_records_url(const EndpointConfig& endpoint,
                             const std::optional<std::string>& token);

HarvestResult harvest(const EndpointConfig& endpoint, http::Transport& transport,
                      const HarvestOptions& options = {});

/// Every record the endpoint exposes, deduplicated by identifier.
std::vector<OaiRecord> list_records(const EndpointConfig& endpoint, http::Transport& transport,
                                    const HarvestOptions& options = {});

}  // namespace dmlkit::oai
