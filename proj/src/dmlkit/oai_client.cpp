#include "dmlkit/oai_client.hpp"

#include <thread>

#include "dmlkit/text.hpp"

namespace dmlkit::oai {

bool is_supported_prefix(std::string_view prefix) noexcept {
  return prefix == kPrefixOaiDc || prefix == kPrefixJunii2;
}

void EndpointConfig::validate() const {
  if (name.empty()) throw ValidationError("endpoint without name");
  if (metadata_prefix.empty()) throw ValidationError("endpoint '" + name + "': empty metadata_prefix");
  if (!is_supported_prefix(metadata_prefix)) {
    throw ValidationError("endpoint '" + name + "': unsupported metadata_prefix '" +
                          metadata_prefix + "'");
  }
  if (!text::is_absolute_http_url(base_url)) {
    throw ValidationError("endpoint '" + name + "': base_url is not an absolute http(s) URL: '" +
                          base_url + "'");
  }
  static constexpr auto check_date = [](const std::optional<std::string>& d) {
    return !d || is_valid_datestamp(*d);
  };
  if (!check_date(from_date) || !check_date(until_date)) {
    throw ValidationError("endpoint '" + name + "': from/until must be ISO-8601 dates");
  }
}

std::string list_records_url(const EndpointConfig& endpoint,
                             const std::optional<std::string>& token) {
  std::string url = endpoint.base_url;
  url += url.find('?') == std::string::npos ? '?' : '&';
  url += "verb=ListRecords";
  if (token) {
    url += "&resumptionToken=" + http::percent_encode(*token);
    return url;
  }
  url += "&metadataPrefix=" + http::percent_encode(endpoint.metadata_prefix);
  if (endpoint.set_spec) url += "&set=" + http::percent_encode(*endpoint.set_spec);
  if (endpoint.from_date) url += "&from=" + http::percent_encode(*endpoint.from_date);
  if (endpoint.until_date) url += "&until=" + http::percent_encode(*endpoint.until_date);
  return url;
}

namespace {

struct TokenRejected {};

http::Response fetch_page(const EndpointConfig& endpoint, http::Transport& transport,
                          const std::string& url, std::size_t page,
                          const HarvestOptions& options) {
  for (int attempt = 0;; ++attempt) {
    bool retryable = false;
    std::string cause;
    try {
      auto response = transport.get(url);
      if (response.status == 200) return response;
      retryable = response.status == 429 || response.status >= 500;
      cause = "HTTP status " + std::to_string(response.status);
    } catch (const http::TransportError& e) {
      retryable = e.retryable();
      cause = e.what();
    }
    if (!retryable || attempt >= options.max_retries) {
      throw HarvestError(ErrorKind::Transport, endpoint.name, page, cause, retryable);
    }
    std::this_thread::sleep_for(options.retry_backoff * (attempt + 1));
  }
}

HarvestResult run_once(const EndpointConfig& endpoint, http::Transport& transport,
                       const HarvestOptions& options) {
  HarvestResult result;
  std::optional<std::string> token;
  std::vector<OaiRecord> served;
  for (std::size_t page = 1;; ++page) {
    if (page > 1 && options.request_delay.count() > 0) {
      std::this_thread::sleep_for(options.request_delay);
    }
    const auto response =
        fetch_page(endpoint, transport, list_records_url(endpoint, token), page, options);
    ListRecordsPage parsed;
    try {
      parsed = parse_list_records(response.body);
    } catch (const ParseError& e) {
      throw HarvestError(ErrorKind::Parse, endpoint.name, page, e.what(), false);
    }
    result.pages = page;
    if (parsed.error) {
      if (parsed.error->code == "noRecordsMatch") break;
      if (parsed.error->code == "badResumptionToken" && token) throw TokenRejected{};
      throw ProtocolError(parsed.error->code,
                          "endpoint '" + endpoint.name + "', page " + std::to_string(page) +
                              (parsed.error->message.empty() ? "" : ": " + parsed.error->message));
    }
    for (auto& rec : parsed.records) served.push_back(std::move(rec));
    if (!parsed.resumption_token) break;
    if (token && *token == *parsed.resumption_token) {
      throw ProtocolError("badResumptionToken", "endpoint '" + endpoint.name +
                                                    "' repeated resumption token '" + *token + "'");
    }
    token = std::move(parsed.resumption_token);
  }
  result.served = served.size();
  result.records = dedupe_keep_latest(std::move(served));
  return result;
}

}  // namespace

HarvestResult harvest(const EndpointConfig& endpoint, http::Transport& transport,
                      const HarvestOptions& options) {
  endpoint.validate();
  try {
    return run_once(endpoint, transport, options);
  } catch (const TokenRejected&) {
  }
  try {
    auto result = run_once(endpoint, transport, options);
    result.restarted = true;
    return result;
  } catch (const TokenRejected&) {
    throw ProtocolError("badResumptionToken",
                        "endpoint '" + endpoint.name + "' rejected its own token twice");
  }
}

std::vector<OaiRecord> list_records(const EndpointConfig& endpoint, http::Transport& transport,
                                    const HarvestOptions& options) {
  return harvest(endpoint, transport, options).records;
}

}  // namespace dmlkit::oai
