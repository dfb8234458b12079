#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "dmlkit/oai_record.hpp"

namespace dmlkit::oai {

/// Records served by the fixture endpoint, in lexicographic filename order.
class FixtureCorpus {
 public:
  FixtureCorpus() = default;
  explicit FixtureCorpus(std::vector<OaiRecord> records) : records_(std::move(records)) {}

  /// Reads every *.xml file in directory. Each file may hold one or more
  /// records. Throws IoError for unreadable files, ParseError for bad XML.
  static FixtureCorpus load(const std::filesystem::path& directory);

  const std::vector<OaiRecord>& records() const noexcept { return records_; }

  /// Answers a single OAI-PMH request given its decoded query parameters.
  std::string respond(const std::multimap<std::string, std::string>& params,
                      std::size_t page_size, const std::string& base_url) const;

 private:
  std::vector<OaiRecord> records_;
};

/// Local OAI-PMH ListRecords endpoint over a FixtureCorpus. Serves from a
/// background thread until stop() or destruction.
class FixtureServer {
 public:
  FixtureServer(FixtureCorpus corpus, std::size_t page_size, const std::string& host = "127.0.0.1",
                int port = 0);
  ~FixtureServer();

  FixtureServer(const FixtureServer&) = delete;
  FixtureServer& operator=(const FixtureServer&) = delete;

  int port() const noexcept { return port_; }
  /// http://host:port/oai
  std::string base_url() const;
  std::size_t requests_served() const noexcept { return requests_.load(); }

  void stop();
  /// Blocks until stop() is called from another thread.
  void wait();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::string host_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::thread thread_;
};

std::unique_ptr<FixtureServer> serve_fixtures(const std::filesystem::path& directory,
                                              std::size_t page_size,
                                              const std::string& host = "127.0.0.1",
                                              int port = 0);

}  // namespace dmlkit::oai
