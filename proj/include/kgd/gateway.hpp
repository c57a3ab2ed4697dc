// Copyright 2026 The kgdiscover Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kgd/paper.hpp"
#include "kgd/session_log.hpp"

namespace kgd {

// ---------------------------------------------------------------------------
// Configuration and results

struct SourceConfig {
  std::string base_url;
  std::chrono::milliseconds timeout{10'000};
  int max_results = 100;
  std::optional<std::string> contact_email;  // OpenAlex "mailto"
  std::optional<std::string> api_key;        // Semantic Scholar "x-api-key"

  // Throws InvalidArgument.
  void validate() const;
};

std::string_view default_base_url(SourceId source);
SourceConfig default_source_config(SourceId source);
// Defaults for every source with KGD_S2_API_KEY and KGD_OPENALEX_MAILTO
// applied.
std::map<SourceId, SourceConfig> default_source_configs_from_env();

enum class RetrievalOutcome { kOk, kTimeout, kHttpError, kParseError };

std::string_view to_string(RetrievalOutcome outcome);

struct RetrievalTiming {
  SourceId source = SourceId::kEuropePmc;
  std::string query;
  double elapsed = 0.0;  // seconds
  size_t paper_count = 0;
  RetrievalOutcome outcome = RetrievalOutcome::kOk;

  friend bool operator==(const RetrievalTiming&,
                         const RetrievalTiming&) = default;
};

void to_json(nlohmann::json& j, const RetrievalTiming& t);

// ---------------------------------------------------------------------------
// Wire formats

std::vector<PaperRecord> parse_europe_pmc(std::string_view body);
std::vector<PaperRecord> parse_openalex(std::string_view body);
std::vector<PaperRecord> parse_semantic_scholar(std::string_view body);
// Dispatches on `source`. All parsers throw ParseError with a JSON path.
std::vector<PaperRecord> parse_response(SourceId source, std::string_view body);

// Word positions -> text, words joined by single spaces in position order.
std::string reconstruct_inverted_abstract(const nlohmann::json& index);

// ---------------------------------------------------------------------------
// Transport

struct SourceRequest {
  SourceId source = SourceId::kEuropePmc;
  std::string query;
  int limit = 10;
  std::string origin;  // scheme://host[:port]
  std::string target;  // path and query string
  std::map<std::string, std::string> headers;
  std::chrono::milliseconds timeout{10'000};
};

// Builds the GET request for one source's search endpoint.
SourceRequest build_request(SourceId source, std::string_view query, int limit,
                            const SourceConfig& config);

enum class TransportError { kNone, kTimeout, kConnection };

struct TransportResponse {
  TransportError error = TransportError::kNone;
  int status = 0;
  std::string body;
  std::string error_message;
  // Set by replaying transports; the gateway then reports it verbatim.
  std::optional<double> recorded_elapsed;
  // Round-trip time measured by live transports.
  double measured_elapsed = 0.0;
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportResponse fetch(const SourceRequest& request) = 0;
};

// Real HTTP(S) requests via cpp-httplib.
class LiveTransport final : public Transport {
 public:
  TransportResponse fetch(const SourceRequest& request) override;
};

struct FixtureEntry {
  std::string query;
  std::string body;
  double elapsed = 0.0;
  int status = 200;

  friend bool operator==(const FixtureEntry&, const FixtureEntry&) = default;
};

// Captured responses keyed by (source, query). On disk: one body file per
// key named `{source}__{first 16 hex of sha256(query)}.json` plus a
// `meta.json` holding each key's query, recorded elapsed seconds and status.
class FixtureSet {
 public:
  static std::string file_stem(SourceId source, std::string_view query);

  // Throws IoError or ParseError.
  static FixtureSet load(const std::filesystem::path& dir);
  // Creates `dir` if needed. Throws IoError.
  void save(const std::filesystem::path& dir) const;

  // Returns true when an existing entry was replaced.
  bool put(SourceId source, FixtureEntry entry);
  const FixtureEntry* find(SourceId source, std::string_view query) const;
  size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<SourceId, std::string>, FixtureEntry> entries_;
};

// Serves responses from a FixtureSet. Unknown keys answer 404.
class ReplayTransport final : public Transport {
 public:
  explicit ReplayTransport(FixtureSet fixtures)
      : fixtures_(std::move(fixtures)) {}
  TransportResponse fetch(const SourceRequest& request) override;

 private:
  FixtureSet fixtures_;
};

// Forwards to `inner` and stores every 2xx response it sees.
class RecordingTransport final : public Transport {
 public:
  explicit RecordingTransport(std::shared_ptr<Transport> inner)
      : inner_(std::move(inner)) {}
  TransportResponse fetch(const SourceRequest& request) override;

  FixtureSet fixtures() const;
  // Keys (as file stems) that replaced an earlier capture.
  std::vector<std::string> overwritten() const;

 private:
  std::shared_ptr<Transport> inner_;
  mutable std::mutex mu_;
  FixtureSet fixtures_;
  std::vector<std::string> overwritten_;
};

// ---------------------------------------------------------------------------
// Gateway

struct RetryPolicy {
  // Extra attempts after a transport (connection) failure. Timeouts and HTTP
  // statuses are never retried.
  int max_retries = 1;
  std::chrono::milliseconds delay{500};
};

struct SourceResult {
  std::vector<PaperRecord> records;
  RetrievalTiming timing;
  std::string error;  // empty when outcome is ok
  int http_status = 0;
};

struct SearchAllResult {
  Corpus corpus;
  std::vector<RetrievalTiming> timings;  // one per requested source
  std::vector<std::string> errors;
};

// Fans a query out to the scholarly sources. Live or replay is decided by
// the transport handed to the constructor. Stateless apart from a per-source
// lock that keeps at most one request in flight to each source.
class SourceGateway {
 public:
  SourceGateway(std::shared_ptr<Transport> transport,
                std::map<SourceId, SourceConfig> configs,
                RetryPolicy retry = {});

  // Never throws for source failures; the outcome lands in the timing.
  // Throws InvalidArgument on an empty query or a limit outside
  // [1, max_results].
  SourceResult search_source(SourceId source, std::string_view query,
                             int limit);

  // Queries every source concurrently and merges in source precedence with
  // first-wins deduplication. Each timing is appended to `sink` (when set)
  // as a RetrievalLogEntry. Throws AllSourcesFailedError only when every
  // source failed.
  SearchAllResult search_all(std::string_view query,
                             const std::set<SourceId>& sources, int limit,
                             LogSink* sink = nullptr,
                             std::string_view session_id = {});

  const SourceConfig& config(SourceId source) const;

 private:
  std::shared_ptr<Transport> transport_;
  std::map<SourceId, SourceConfig> configs_;
  RetryPolicy retry_;
  std::map<SourceId, std::unique_ptr<std::mutex>> in_flight_;
};

RetrievalLogEntry to_log_entry(const RetrievalTiming& timing,
                               std::string_view session_id, Timestamp when);

}  // namespace kgd
