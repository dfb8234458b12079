#include "dmlkit/fixture_server.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <fstream>
#include <sstream>

#include "dmlkit/text.hpp"

namespace dmlkit::oai {

namespace fs = std::filesystem;

FixtureCorpus FixtureCorpus::load(const fs::path& directory) {
  std::error_code ec;
  if (!fs::is_directory(directory, ec)) {
    throw IoError("fixture directory not readable: " + directory.string());
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".xml") files.push_back(entry.path());
  }
  if (ec) throw IoError("cannot list fixture directory " + directory.string() + ": " + ec.message());
  std::sort(files.begin(), files.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  std::vector<OaiRecord> records;
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw IoError("cannot read fixture file " + file.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad()) throw IoError("cannot read fixture file " + file.string());
    try {
      for (auto& rec : parse_oai_envelope(buffer.str())) records.push_back(std::move(rec));
    } catch (const ParseError& e) {
      throw ParseError(file.filename().string() + ": " + e.what());
    }
  }
  return FixtureCorpus(std::move(records));
}

namespace {

struct Selection {
  std::string prefix;
  std::optional<std::string> set;
  std::optional<std::string> from;
  std::optional<std::string> until;
  std::size_t offset = 0;
};

// Tokens carry the whole query so continuation requests stay stateless.
std::string encode_token(const Selection& s) {
  return std::to_string(s.offset) + "|" + s.prefix + "|" + s.set.value_or("") + "|" +
         s.from.value_or("") + "|" + s.until.value_or("");
}

std::optional<Selection> decode_token(const std::string& token) {
  const auto parts = text::split(token, '|');
  if (parts.size() != 5) return std::nullopt;
  const auto offset = text::parse_unsigned(parts[0]);
  if (!offset) return std::nullopt;
  Selection s;
  s.offset = static_cast<std::size_t>(*offset);
  s.prefix = parts[1];
  if (!parts[2].empty()) s.set = parts[2];
  if (!parts[3].empty()) s.from = parts[3];
  if (!parts[4].empty()) s.until = parts[4];
  return s;
}

bool in_range(const OaiRecord& rec, const Selection& s) {
  if (s.set && std::find(rec.set_specs.begin(), rec.set_specs.end(), *s.set) == rec.set_specs.end()) {
    return false;
  }
  if (s.from && rec.datestamp.substr(0, s.from->size()) < *s.from) return false;
  if (s.until && rec.datestamp.substr(0, s.until->size()) > *s.until) return false;
  return true;
}

std::optional<std::string> param(const std::multimap<std::string, std::string>& params,
                                 const std::string& key) {
  const auto it = params.find(key);
  if (it == params.end()) return std::nullopt;
  return it->second;
}

}  // namespace

std::string FixtureCorpus::respond(const std::multimap<std::string, std::string>& params,
                                   std::size_t page_size, const std::string& base_url) const {
  EnvelopeOptions options;
  options.request_url = base_url;
  const auto fail = [&](std::string code, std::string message) {
    options.error = OaiErrorInfo{std::move(code), std::move(message)};
    return serialize_list_records({}, options);
  };

  const auto verb = param(params, "verb");
  if (!verb || *verb != "ListRecords") return fail("badVerb", "only ListRecords is supported");
  if (page_size == 0) return fail("badArgument", "page size is zero");

  Selection selection;
  if (const auto token = param(params, "resumptionToken")) {
    if (params.size() != 2) return fail("badArgument", "resumptionToken is an exclusive argument");
    const auto decoded = decode_token(*token);
    if (!decoded) return fail("badResumptionToken", "unknown token '" + *token + "'");
    selection = *decoded;
  } else {
    const auto prefix = param(params, "metadataPrefix");
    if (!prefix) return fail("badArgument", "missing metadataPrefix");
    selection.prefix = *prefix;
    selection.set = param(params, "set");
    selection.from = param(params, "from");
    selection.until = param(params, "until");
  }
  options.metadata_prefix = selection.prefix;

  std::vector<OaiRecord> matching;
  for (const auto& rec : records_) {
    if (in_range(rec, selection)) matching.push_back(rec);
  }
  if (matching.empty()) return fail("noRecordsMatch", "no records match the request");
  if (selection.offset >= matching.size()) {
    return fail("badResumptionToken", "token offset beyond the list");
  }

  const auto end = std::min(matching.size(), selection.offset + page_size);
  std::vector<OaiRecord> page(matching.begin() + static_cast<std::ptrdiff_t>(selection.offset),
                              matching.begin() + static_cast<std::ptrdiff_t>(end));
  const bool paged = selection.offset > 0 || end < matching.size();
  if (paged) {
    options.complete_list_size = matching.size();
    options.cursor = selection.offset;
    if (end < matching.size()) {
      Selection next = selection;
      next.offset = end;
      options.resumption_token = encode_token(next);
    } else {
      options.resumption_token = std::string();
    }
  }
  return serialize_list_records(page, options);
}

struct FixtureServer::Impl {
  httplib::Server server;
  FixtureCorpus corpus;
  std::size_t page_size = 0;
};

FixtureServer::FixtureServer(FixtureCorpus corpus, std::size_t page_size, const std::string& host,
                             int port)
    : impl_(std::make_unique<Impl>()), host_(host) {
  if (page_size == 0) throw InvalidArgument("fixture page size must be at least 1");
  impl_->corpus = std::move(corpus);
  impl_->page_size = page_size;
  // SO_REUSEPORT (the library default) would let a second server share the
  // port silently.
  impl_->server.set_socket_options([](auto sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->server.Get("/oai", [this](const httplib::Request& req, httplib::Response& res) {
    ++requests_;
    std::multimap<std::string, std::string> params(req.params.begin(), req.params.end());
    res.set_content(impl_->corpus.respond(params, impl_->page_size, base_url()),
                    "text/xml; charset=utf-8");
  });
  if (port == 0) {
    port_ = impl_->server.bind_to_any_port(host_);
  } else {
    port_ = impl_->server.bind_to_port(host_, port) ? port : -1;
  }
  if (port_ <= 0) {
    throw IoError("cannot bind fixture server to " + host_ + ":" + std::to_string(port));
  }
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

FixtureServer::~FixtureServer() { stop(); }

std::string FixtureServer::base_url() const {
  return "http://" + host_ + ":" + std::to_string(port_) + "/oai";
}

void FixtureServer::stop() {
  impl_->server.stop();
  if (thread_.joinable()) thread_.join();
}

void FixtureServer::wait() {
  while (impl_->server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

std::unique_ptr<FixtureServer> serve_fixtures(const fs::path& directory, std::size_t page_size,
                                              const std::string& host, int port) {
  return std::make_unique<FixtureServer>(FixtureCorpus::load(directory), page_size, host, port);
}

}  // namespace dmlkit::oai
