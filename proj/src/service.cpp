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

#include "kgd/service.hpp"

#include <httplib.h>

#include <boost/uuid/uuid.hpp>
#include <boost/uuid/uuid_generators.hpp>
#include <boost/uuid/uuid_io.hpp>
#include <iostream>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

SessionStore::SessionStore(std::chrono::seconds ttl, Clock clock)
    : ttl_(ttl), clock_(std::move(clock)) {
  if (!clock_) clock_ = [] { return std::chrono::steady_clock::now(); };
}

void SessionStore::insert(std::string id, SearchResult search) {
  auto slot = std::make_shared<Slot>();
  slot->state.session_id = id;
  slot->state.search = std::move(search);
  slot->state.created_at = now_utc();
  slot->expires_at = clock_() + ttl_;
  std::unique_lock lock(mu_);
  slots_[std::move(id)] = std::move(slot);
}

std::shared_ptr<SessionStore::Slot> SessionStore::find_live(
    const std::string& id) {
  {
    std::shared_lock lock(mu_);
    auto it = slots_.find(id);
    if (it == slots_.end()) return nullptr;
    if (clock_() < it->second->expires_at) return it->second;
  }
  std::unique_lock lock(mu_);
  slots_.erase(id);
  return nullptr;
}

bool SessionStore::with_session(const std::string& id,
                                const std::function<void(SessionState&)>& fn) {
  auto slot = find_live(id);
  if (!slot) return false;
  std::lock_guard lock(slot->mu);
  fn(slot->state);
  return true;
}

size_t SessionStore::purge_expired() {
  const auto now = clock_();
  std::unique_lock lock(mu_);
  return std::erase_if(slots_, [&](const auto& kv) {
    return now >= kv.second->expires_at;
  });
}

size_t SessionStore::size() const {
  std::shared_lock lock(mu_);
  return slots_.size();
}

std::string new_session_id() {
  thread_local boost::uuids::random_generator generator;
  return boost::uuids::to_string(generator());
}

ApiResponse error_response(int status, std::string_view code,
                           std::string_view message) {
  nlohmann::json body = {
      {"error", {{"code", std::string(code)}, {"message", std::string(message)}}}};
  return {status, "application/json", body.dump()};
}

namespace {

ApiResponse json_response(const nlohmann::json& j) {
  return {200, "application/json", j.dump()};
}

std::optional<nlohmann::json> parse_object(const std::string& body) {
  try {
    auto j = nlohmann::json::parse(body);
    if (j.is_object()) return j;
  } catch (const nlohmann::json::exception&) {
  }
  return std::nullopt;
}

ApiResponse session_not_found(const std::string& id) {
  return error_response(404, "session_not_found",
                        "no live session '" + id + "'");
}

}  // namespace

DiscoveryService::DiscoveryService(std::shared_ptr<DiscoveryPipeline> pipeline,
                                   std::shared_ptr<SessionLog> log,
                                   std::chrono::seconds ttl,
                                   SessionStore::Clock clock)
    : pipeline_(std::move(pipeline)),
      log_(std::move(log)),
      sessions_(ttl, std::move(clock)) {}

ApiResponse DiscoveryService::search(const std::string& body) {
  auto j = parse_object(body);
  if (!j) return error_response(400, "bad_request", "body must be a json object");

  SearchRequest request;
  try {
    request.query = j->value("query", "");
    if (j->contains("sources") && !(*j)["sources"].is_null()) {
      request.sources.clear();
      for (const auto& s : (*j)["sources"]) {
        auto source = parse_source(s.get<std::string>());
        if (!source) {
          return error_response(400, "unknown_source",
                                "unknown source '" + s.get<std::string>() +
                                    "'; expected europe_pmc, openalex or "
                                    "semantic_scholar");
        }
        request.sources.insert(*source);
      }
      if (request.sources.empty()) {
        return error_response(400, "bad_request", "sources must not be empty");
      }
    }
    request.limit = j->value("limit", kDefaultPerSourceLimit);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "bad_request", e.what());
  }
  if (text::trim(request.query).empty()) {
    return error_response(400, "empty_query", "query must not be empty");
  }

  const std::string id = new_session_id();
  SearchResult result;
  try {
    result = pipeline_->search(request, log_.get(), id);
  } catch (const AllSourcesFailedError& e) {
    return error_response(502, e.code(), e.what());
  } catch (const InvalidArgument& e) {
    return error_response(400, e.code(), e.what());
  } catch (const ProviderUnavailableError& e) {
    return error_response(503, e.code(), e.what());
  }

  nlohmann::json out = search_result_to_json(result);
  out["session_id"] = id;
  sessions_.insert(id, std::move(result));
  return json_response(out);
}

ApiResponse DiscoveryService::filter(const std::string& body) {
  auto j = parse_object(body);
  if (!j) return error_response(400, "bad_request", "body must be a json object");
  std::string id;
  std::vector<std::string> selected;
  try {
    id = j->at("session_id").get<std::string>();
    if (j->contains("selected_themes")) {
      selected = (*j)["selected_themes"].get<std::vector<std::string>>();
    }
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, "bad_request", e.what());
  }

  std::optional<ApiResponse> response;
  bool found = sessions_.with_session(id, [&](SessionState& session) {
    try {
      ThemeSelection selection(selected);
      FilterResult result =
          pipeline_->filter(session.search, selection, log_.get(), id);
      session.current_selection = selection;
      session.last_filter = result;
      response = json_response(filter_result_to_json(result));
    } catch (const UnknownThemeError& e) {
      response = error_response(422, e.code(), e.what());
    }
  });
  if (!found) return session_not_found(id);
  return *response;
}

ApiResponse DiscoveryService::graph(const std::string& session_id,
                                    const std::string& view) {
  auto parsed = parse_graph_view(view.empty() ? "unfiltered" : view);
  if (!parsed) {
    return error_response(400, "bad_request",
                          "view must be unfiltered or filtered");
  }
  std::optional<ApiResponse> response;
  bool found = sessions_.with_session(session_id, [&](SessionState& session) {
    DiscoveryGraph g = graph_for(session.search, session.last_filter, *parsed);
    response = ApiResponse{200, "application/json", export_graph_json(g)};
  });
  if (!found) return session_not_found(session_id);
  return *response;
}

ApiResponse DiscoveryService::report(const std::string& format) {
  LogSnapshot snap = log_->read();
  auto tables = render_report(snap.entries);
  if (format.empty() || format == "json") {
    nlohmann::json j = report_to_json(tables);
    j["malformed_lines"] = snap.malformed_lines;
    return json_response(j);
  }
  if (format == "md") return {200, "text/markdown", render_markdown(tables)};
  if (format == "csv") return {200, "text/csv", render_csv(tables)};
  return error_response(400, "bad_request", "format must be json, md or csv");
}

ApiResponse DiscoveryService::themes(const std::string& session_id) {
  std::optional<ApiResponse> response;
  bool found = sessions_.with_session(session_id, [&](SessionState& session) {
    response = json_response(
        {{"themes", theme_index_to_json(session.search.theme_index)},
         {"selected_themes", session.current_selection.selected()}});
  });
  if (!found) return session_not_found(session_id);
  return *response;
}

namespace {

void reply(httplib::Response& res, const ApiResponse& api) {
  res.status = api.status;
  res.set_content(api.body, api.content_type);
}

}  // namespace

void register_routes(httplib::Server& server, DiscoveryService& service,
                     const std::optional<std::filesystem::path>& static_dir) {
  server.Post("/api/search", [&service](const httplib::Request& req,
                                        httplib::Response& res) {
    reply(res, service.search(req.body));
  });
  server.Post("/api/filter", [&service](const httplib::Request& req,
                                        httplib::Response& res) {
    reply(res, service.filter(req.body));
  });
  server.Get("/api/graph", [&service](const httplib::Request& req,
                                      httplib::Response& res) {
    reply(res, service.graph(req.get_param_value("session_id"),
                             req.get_param_value("view")));
  });
  server.Get("/api/metrics/report", [&service](const httplib::Request& req,
                                               httplib::Response& res) {
    reply(res, service.report(req.get_param_value("format")));
  });
  server.Get(R"(/api/sessions/([^/]+)/themes)",
             [&service](const httplib::Request& req, httplib::Response& res) {
               reply(res, service.themes(req.matches[1]));
             });
  if (static_dir) server.set_mount_point("/", static_dir->string());
}

bool serve(const AppConfig& config) {
  auto pipeline =
      std::make_shared<DiscoveryPipeline>(DiscoveryPipeline::from_config(config));
  auto log = std::make_shared<SessionLog>(config.log_path);
  DiscoveryService service(pipeline, log, config.session_ttl);

  httplib::Server server;
  register_routes(server, service, config.static_dir);

  const std::string& bind = config.bind_address;
  size_t colon = bind.rfind(':');
  if (colon == std::string::npos) {
    throw InvalidArgument("bind address '" + bind + "' needs host:port");
  }
  const std::string host = bind.substr(0, colon);
  const int port = std::stoi(bind.substr(colon + 1));
  std::cerr << "listening on " << host << ":" << port << "\n";
  return server.listen(host, port);
}

}  // namespace kgd
