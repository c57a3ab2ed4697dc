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

#include "kgd/gateway.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <future>
#include <sstream>
#include <thread>

#include "kgd/errors.hpp"
#include "kgd/net.hpp"
#include "kgd/text.hpp"

namespace kgd {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace

void SourceConfig::validate() const {
  if (timeout.count() <= 0) throw InvalidArgument("source timeout must be > 0");
  if (max_results < 1 || max_results > 100) {
    throw InvalidArgument("max_results must be in [1, 100]");
  }
  net::split_base_url(base_url);
}

std::string_view default_base_url(SourceId source) {
  switch (source) {
    case SourceId::kEuropePmc:
      return "https://www.ebi.ac.uk";
    case SourceId::kOpenAlex:
      return "https://api.openalex.org";
    case SourceId::kSemanticScholar:
      return "https://api.semanticscholar.org";
  }
  return {};
}

SourceConfig default_source_config(SourceId source) {
  SourceConfig c;
  c.base_url = std::string(default_base_url(source));
  return c;
}

std::map<SourceId, SourceConfig> default_source_configs_from_env() {
  std::map<SourceId, SourceConfig> out;
  for (SourceId s : kAllSources) out[s] = default_source_config(s);
  if (const char* key = std::getenv("KGD_S2_API_KEY"); key && *key) {
    out[SourceId::kSemanticScholar].api_key = key;
  }
  if (const char* mail = std::getenv("KGD_OPENALEX_MAILTO"); mail && *mail) {
    out[SourceId::kOpenAlex].contact_email = mail;
  }
  return out;
}

std::string_view to_string(RetrievalOutcome outcome) {
  switch (outcome) {
    case RetrievalOutcome::kOk:
      return "ok";
    case RetrievalOutcome::kTimeout:
      return "timeout";
    case RetrievalOutcome::kHttpError:
      return "http_error";
    case RetrievalOutcome::kParseError:
      return "parse_error";
  }
  return "unknown";
}

void to_json(nlohmann::json& j, const RetrievalTiming& t) {
  j = nlohmann::json{{"source", t.source},
                     {"query", t.query},
                     {"elapsed", t.elapsed},
                     {"paper_count", t.paper_count},
                     {"outcome", to_string(t.outcome)}};
}

SourceRequest build_request(SourceId source, std::string_view query, int limit,
                            const SourceConfig& config) {
  net::BaseUrl base = net::split_base_url(config.base_url);
  SourceRequest r;
  r.source = source;
  r.query = std::string(query);
  r.limit = limit;
  r.origin = base.origin;
  r.timeout = config.timeout;
  const std::string q = text::url_encode(query);
  const std::string n = std::to_string(limit);
  switch (source) {
    case SourceId::kEuropePmc:
      r.target = base.path_prefix +
                 "/europepmc/webservices/rest/search?query=" + q +
                 "&format=json&pageSize=" + n;
      break;
    case SourceId::kOpenAlex:
      r.target = base.path_prefix + "/works?search=" + q + "&per-page=" + n;
      if (config.contact_email) {
        r.target += "&mailto=" + text::url_encode(*config.contact_email);
      }
      break;
    case SourceId::kSemanticScholar:
      r.target = base.path_prefix + "/graph/v1/paper/search?query=" + q +
                 "&limit=" + n +
                 "&fields=title,abstract,year,authors,externalIds,url";
      if (config.api_key) r.headers["x-api-key"] = *config.api_key;
      break;
  }
  return r;
}

TransportResponse LiveTransport::fetch(const SourceRequest& request) {
  httplib::Client client(request.origin);
  client.set_connection_timeout(request.timeout);
  client.set_read_timeout(request.timeout);
  client.set_write_timeout(request.timeout);
  client.set_follow_location(true);

  httplib::Headers headers;
  for (const auto& [k, v] : request.headers) headers.emplace(k, v);

  TransportResponse out;
  const auto start = Clock::now();
  auto res = client.Get(request.target, headers);
  out.measured_elapsed = seconds_since(start);
  if (!res) {
    const auto err = res.error();
    out.error_message = httplib::to_string(err);
    const bool timed_out =
        err == httplib::Error::ConnectionTimeout ||
        out.measured_elapsed * 1000.0 >=
            static_cast<double>(request.timeout.count());
    out.error = timed_out ? TransportError::kTimeout
                          : TransportError::kConnection;
    return out;
  }
  out.status = res->status;
  out.body = std::move(res->body);
  return out;
}

std::string FixtureSet::file_stem(SourceId source, std::string_view query) {
  return std::string(to_string(source)) + "__" +
         text::sha256_hex(query).substr(0, 16);
}

FixtureSet FixtureSet::load(const std::filesystem::path& dir) {
  const auto meta_path = dir / "meta.json";
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(read_file(meta_path));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(meta_path.string(), e.what());
  }
  FixtureSet set;
  for (const auto& [stem, info] : meta.items()) {
    size_t sep = stem.find("__");
    auto source = parse_source(stem.substr(0, sep));
    if (sep == std::string::npos || !source) {
      throw ParseError(meta_path.string() + "." + stem, "unknown source");
    }
    FixtureEntry entry;
    try {
      info.at("query").get_to(entry.query);
      info.at("elapsed").get_to(entry.elapsed);
      entry.status = info.value("status", 200);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(meta_path.string() + "." + stem, e.what());
    }
    if (file_stem(*source, entry.query) != stem) {
      throw ParseError(meta_path.string() + "." + stem,
                       "key does not match its query hash");
    }
    entry.body = read_file(dir / (stem + ".json"));
    set.put(*source, std::move(entry));
  }
  return set;
}

void FixtureSet::save(const std::filesystem::path& dir) const {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  nlohmann::ordered_json meta = nlohmann::ordered_json::object();
  const auto meta_path = dir / "meta.json";
  if (std::filesystem::exists(meta_path)) {
    try {
      meta = nlohmann::ordered_json::parse(read_file(meta_path));
    } catch (const nlohmann::json::exception&) {
      meta = nlohmann::ordered_json::object();
    }
  }
  for (const auto& [key, entry] : entries_) {
    const std::string stem = file_stem(key.first, key.second);
    write_file(dir / (stem + ".json"), entry.body);
    meta[stem] = {{"query", entry.query},
                  {"elapsed", entry.elapsed},
                  {"status", entry.status}};
  }
  write_file(meta_path, meta.dump(2) + "\n");
}

bool FixtureSet::put(SourceId source, FixtureEntry entry) {
  auto key = std::make_pair(source, entry.query);
  auto [it, inserted] = entries_.insert_or_assign(std::move(key), std::move(entry));
  return !inserted;
}

const FixtureEntry* FixtureSet::find(SourceId source,
                                     std::string_view query) const {
  auto it = entries_.find({source, std::string(query)});
  return it == entries_.end() ? nullptr : &it->second;
}

TransportResponse ReplayTransport::fetch(const SourceRequest& request) {
  TransportResponse out;
  const FixtureEntry* entry = fixtures_.find(request.source, request.query);
  if (entry == nullptr) {
    out.status = 404;
    out.error_message = "no fixture for " +
                        FixtureSet::file_stem(request.source, request.query);
    out.recorded_elapsed = 0.0;
    return out;
  }
  out.recorded_elapsed = entry->elapsed;
  if (entry->elapsed * 1000.0 > static_cast<double>(request.timeout.count())) {
    out.error = TransportError::kTimeout;
    out.error_message = "recorded latency exceeds the timeout";
    return out;
  }
  out.status = entry->status;
  out.body = entry->body;
  return out;
}

TransportResponse RecordingTransport::fetch(const SourceRequest& request) {
  TransportResponse res = inner_->fetch(request);
  if (res.error == TransportError::kNone && res.status >= 200 &&
      res.status < 300) {
    std::lock_guard lock(mu_);
    if (fixtures_.put(request.source, FixtureEntry{request.query, res.body,
                                                   res.measured_elapsed,
                                                   res.status})) {
      overwritten_.push_back(FixtureSet::file_stem(request.source, request.query));
    }
  }
  return res;
}

FixtureSet RecordingTransport::fixtures() const {
  std::lock_guard lock(mu_);
  return fixtures_;
}

std::vector<std::string> RecordingTransport::overwritten() const {
  std::lock_guard lock(mu_);
  return overwritten_;
}

SourceGateway::SourceGateway(std::shared_ptr<Transport> transport,
                             std::map<SourceId, SourceConfig> configs,
                             RetryPolicy retry)
    : transport_(std::move(transport)),
      configs_(std::move(configs)),
      retry_(retry) {
  for (SourceId s : kAllSources) {
    if (!configs_.contains(s)) configs_[s] = default_source_config(s);
    configs_[s].validate();
    in_flight_[s] = std::make_unique<std::mutex>();
  }
}

const SourceConfig& SourceGateway::config(SourceId source) const {
  return configs_.at(source);
}

SourceResult SourceGateway::search_source(SourceId source,
                                          std::string_view query, int limit) {
  const std::string q = text::trim(query);
  if (q.empty()) throw InvalidArgument("query is empty");
  const SourceConfig& cfg = config(source);
  if (limit < 1 || limit > cfg.max_results) {
    throw InvalidArgument("limit " + std::to_string(limit) +
                          " outside [1, " + std::to_string(cfg.max_results) +
                          "]");
  }

  SourceResult result;
  result.timing.source = source;
  result.timing.query = q;
  const SourceRequest request = build_request(source, q, limit, cfg);

  std::lock_guard in_flight(*in_flight_.at(source));
  const auto start = Clock::now();
  TransportResponse res;
  double recorded = 0.0;
  bool replayed = false;
  for (int attempt = 0;; ++attempt) {
    res = transport_->fetch(request);
    if (res.recorded_elapsed) {
      replayed = true;
      recorded += *res.recorded_elapsed;
    }
    if (res.error != TransportError::kConnection ||
        attempt >= retry_.max_retries) {
      break;
    }
    std::this_thread::sleep_for(retry_.delay);
  }

  auto finish = [&](RetrievalOutcome outcome, std::string error) {
    result.timing.outcome = outcome;
    result.error = std::move(error);
    result.timing.paper_count = result.records.size();
    result.timing.elapsed = replayed ? recorded : seconds_since(start);
    return result;
  };

  if (res.error == TransportError::kTimeout ||
      (!replayed && seconds_since(start) * 1000.0 >
                        static_cast<double>(cfg.timeout.count()))) {
    return finish(RetrievalOutcome::kTimeout,
                  "timed out: " + res.error_message);
  }
  if (res.error == TransportError::kConnection) {
    return finish(RetrievalOutcome::kHttpError,
                  "transport failure: " + res.error_message);
  }
  result.http_status = res.status;
  if (res.status < 200 || res.status >= 300) {
    return finish(RetrievalOutcome::kHttpError,
                  "http status " + std::to_string(res.status) +
                      (res.error_message.empty() ? "" : ": " + res.error_message));
  }
  try {
    result.records = parse_response(source, res.body);
  } catch (const ParseError& e) {
    result.records.clear();
    return finish(RetrievalOutcome::kParseError, e.what());
  }
  if (result.records.size() > static_cast<size_t>(limit)) {
    result.records.resize(static_cast<size_t>(limit));
  }
  return finish(RetrievalOutcome::kOk, {});
}

SearchAllResult SourceGateway::search_all(std::string_view query,
                                          const std::set<SourceId>& sources,
                                          int limit, LogSink* sink,
                                          std::string_view session_id) {
  if (sources.empty()) throw InvalidArgument("no sources requested");
  const std::string q = text::trim(query);
  if (q.empty()) throw InvalidArgument("query is empty");

  // std::set<SourceId> iterates in precedence order.
  std::vector<std::future<SourceResult>> pending;
  for (SourceId s : sources) {
    pending.push_back(std::async(std::launch::async, [this, s, &q, limit] {
      return search_source(s, q, limit);
    }));
  }

  SearchAllResult out;
  std::vector<PaperRecord> merged;
  size_t failures = 0;
  const Timestamp when = now_utc();
  for (auto& f : pending) {
    SourceResult r = f.get();
    if (r.timing.outcome != RetrievalOutcome::kOk) {
      ++failures;
      out.errors.push_back(std::string(to_string(r.timing.source)) + ": " +
                           r.error);
    }
    merged.insert(merged.end(), r.records.begin(), r.records.end());
    if (sink != nullptr) sink->append(to_log_entry(r.timing, session_id, when));
    out.timings.push_back(std::move(r.timing));
  }
  if (failures == sources.size()) {
    std::string msg = "every source failed";
    for (const auto& e : out.errors) msg += "; " + e;
    throw AllSourcesFailedError(msg);
  }
  out.corpus = dedup_corpus(merged, q);
  return out;
}

RetrievalLogEntry to_log_entry(const RetrievalTiming& timing,
                               std::string_view session_id, Timestamp when) {
  RetrievalLogEntry e;
  e.timestamp = when;
  e.session_id = std::string(session_id);
  e.query = timing.query;
  e.source = timing.source;
  e.elapsed = timing.elapsed;
  e.paper_count = timing.paper_count;
  e.outcome = std::string(to_string(timing.outcome));
  return e;
}

}  // namespace kgd
