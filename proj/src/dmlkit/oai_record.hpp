#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmlkit/error.hpp"

namespace dmlkit::oai {

inline constexpr std::string_view kOaiNamespace = "http://www.openarchives.org/OAI/2.0/";

/// Error element returned by an OAI-PMH endpoint (e.g. badArgument).
class ProtocolError : public Error {
 public:
  ProtocolError(std::string code, const std::string& message)
      : Error(ErrorKind::Protocol, "OAI-PMH error " + code + ": " + message),
        code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

/// Accepts YYYY-MM-DD and YYYY-MM-DDThh:mm:ssZ.
bool is_valid_datestamp(std::string_view s);

/// Returns true when a is strictly older than b. Day-granular stamps sort
/// before full timestamps of the same day.
bool datestamp_before(std::string_view a, std::string_view b);

/// One harvested envelope. Immutable once built.
struct OaiRecord {
  std::string identifier;
  std::string datestamp;
  std::vector<std::string> set_specs;
  /// Verbatim XML of the element inside <metadata>.
  std::optional<std::string> payload;
  bool deleted = false;

  void validate() const;

  bool operator==(const OaiRecord&) const = default;
};

struct OaiErrorInfo {
  std::string code;
  std::string message;
};

struct ListRecordsPage {
  std::vector<OaiRecord> records;
  std::optional<std::string> resumption_token;
  std::optional<OaiErrorInfo> error;
};

/// Full reading of a ListRecords response, including paging and error state.
ListRecordsPage parse_list_records(std::string xml);

/// Records of any OAI-PMH response or bare <record> document.
std::vector<OaiRecord> parse_oai_envelope(std::string xml);

struct EnvelopeOptions {
  std::string response_date = "1970-01-01T00:00:00Z";
  std::string request_url;
  std::string metadata_prefix;
  /// Present only when paging; an empty string writes an empty token element.
  std::optional<std::string> resumption_token;
  std::optional<std::size_t> complete_list_size;
  std::optional<std::size_t> cursor;
  std::optional<OaiErrorInfo> error;
};

/// Writes an OAI-PMH ListRecords response. Payloads are embedded verbatim.
std::string serialize_list_records(const std::vector<OaiRecord>& records,
                                   const EnvelopeOptions& options = {});

/// Keeps one record per identifier, retaining the one with the latest
/// datestamp at the position of the identifier's first appearance.
std::vector<OaiRecord> dedupe_keep_latest(std::vector<OaiRecord> records);

}  // namespace dmlkit::oai
