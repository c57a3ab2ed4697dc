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
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <shared_mutex>
#include <string>

#include "kgd/pipeline.hpp"
#include "kgd/session_log.hpp"

namespace httplib {
class Server;
}

namespace kgd {

// One traversal of the workflow: a query, its corpus and frozen theme index,
// and the evolving selection.
struct SessionState {
  std::string session_id;
  SearchResult search;
  ThemeSelection current_selection;
  std::optional<FilterResult> last_filter;
  Timestamp created_at;
};

// In-memory sessions with a time-to-live counted from creation. Reads of
// different sessions run concurrently; mutations of one session are
// serialized through its own mutex.
class SessionStore {
 public:
  using Clock = std::function<std::chrono::steady_clock::time_point()>;

  explicit SessionStore(std::chrono::seconds ttl, Clock clock = nullptr);

  void insert(std::string id, SearchResult search);

  // Runs `fn` with exclusive access to the live session. Returns false when
  // the id is unknown or expired.
  bool with_session(const std::string& id,
                    const std::function<void(SessionState&)>& fn);

  size_t purge_expired();
  size_t size() const;

 private:
  struct Slot {
    std::mutex mu;
    SessionState state;
    std::chrono::steady_clock::time_point expires_at;
  };

  std::shared_ptr<Slot> find_live(const std::string& id);

  std::chrono::seconds ttl_;
  Clock clock_;
  mutable std::shared_mutex mu_;
  std::map<std::string, std::shared_ptr<Slot>> slots_;
};

std::string new_session_id();

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

// The HTTP API as plain functions over request data, so every endpoint is
// testable without a socket. Errors come back as
// {"error": {"code", "message"}} with the matching status.
class DiscoveryService {
 public:
  DiscoveryService(std::shared_ptr<DiscoveryPipeline> pipeline,
                   std::shared_ptr<SessionLog> log, std::chrono::seconds ttl,
                   SessionStore::Clock clock = nullptr);

  // POST /api/search {query, sources?, limit?}
  ApiResponse search(const std::string& body);
  // POST /api/filter {session_id, selected_themes}
  ApiResponse filter(const std::string& body);
  // GET /api/graph?session_id=..&view=unfiltered|filtered
  ApiResponse graph(const std::string& session_id, const std::string& view);
  // GET /api/metrics/report?format=json|md|csv
  ApiResponse report(const std::string& format);
  // GET /api/sessions/{id}/themes -> {themes, selected_themes}
  ApiResponse themes(const std::string& session_id);

  SessionStore& sessions() { return sessions_; }

 private:
  std::shared_ptr<DiscoveryPipeline> pipeline_;
  std::shared_ptr<SessionLog> log_;
  SessionStore sessions_;
};

ApiResponse error_response(int status, std::string_view code,
                           std::string_view message);

// Wires the endpoints (and optional static files at "/") into `server`.
void register_routes(httplib::Server& server, DiscoveryService& service,
                     const std::optional<std::filesystem::path>& static_dir);

// Blocks serving on `config.bind_address`. Returns false if binding failed.
bool serve(const AppConfig& config);

}  // namespace kgd
