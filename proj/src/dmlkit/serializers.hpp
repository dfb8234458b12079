#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dmlkit/http_transport.hpp"
#include "dmlkit/record_model.hpp"

namespace dmlkit::serializers {

inline constexpr std::string_view kEprintsNamespace = "http://eprints.org/ep2/data/2.0";
inline constexpr std::string_view kOreAggregatesRel = "http://www.openarchives.org/ore/terms/aggregates";
inline constexpr std::string_view kAtomNamespace = "http://www.w3.org/2005/Atom";
inline constexpr std::string_view kMetsNamespace = "http://www.loc.gov/METS/";

/// EPrints import document. Element order follows the EPrints export
/// layout; fields absent from the record are left out.
std::string to_eprints_xml(const CanonicalRecord& rec);

/// Reads an EPrints document (one eprint) back into a record. Elements the
/// record model has no room for are ignored. Throws ParseError /
/// ValidationError.
CanonicalRecord from_eprints_xml(std::string_view xml);

struct AggregatedResource {
  std::string href;
  std::string title;
};

struct Aggregation {
  std::string resource_map_uri;
  std::string title;
  std::vector<AggregatedResource> aggregated;
  std::string created;   // RFC 3339
  std::string modified;  // RFC 3339

  /// Non-empty, absolute hrefs, no duplicate href.
  void validate() const;
};

/// Atom entry carrying one ore:aggregates link per resource.
std::string to_ore_atom(const Aggregation& aggregation);

/// Minimal METS package: header, Dublin Core dmdSec, fileSec and a single
/// structMap division.
std::string to_mets(const CanonicalRecord& rec);

struct DepositResult {
  int status = 0;
  std::string body;
};

/// POSTs a METS package to a deposit URL. Throws TransportError.
DepositResult deposit_package(http::Transport& transport, const std::string& url,
                              const std::string& package);

}  // namespace dmlkit::serializers
