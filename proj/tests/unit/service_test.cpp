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

#include <gtest/gtest.h>
#include <httplib.h>

#include <atomic>
#include <thread>

#include "replay_session.hpp"
#include "test_support.hpp"

namespace kgd {
namespace {

using namespace std::chrono_literals;
using nlohmann::json;

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    log_ = std::make_shared<SessionLog>(dir_ / "sessions.jsonl");
    service_ = std::make_unique<DiscoveryService>(
        testing::replay_pipeline(), log_, 3600s, [this] { return now_; });
  }

  json ok_json(const ApiResponse& r) {
    EXPECT_EQ(r.status, 200) << r.body;
    EXPECT_EQ(r.content_type, "application/json");
    return json::parse(r.body);
  }

  std::string error_code(const ApiResponse& r) {
    return json::parse(r.body)["error"]["code"].get<std::string>();
  }

  std::string start_session() {
    return ok_json(service_->search(R"({"query":"semantic search libraries"})"))
        ["session_id"];
  }

  // 30 papers; the first 25 carry the theme "kept".
  std::string insert_synthetic_session() {
    SearchResult r;
    r.query = "synthetic";
    r.corpus.query = r.query;
    for (int i = 0; i < 30; ++i) {
      auto p = testing::make_paper("P" + std::to_string(i), SourceId::kOpenAlex,
                                   "paper " + std::to_string(i));
      r.paper_themes[canonical_key(p)] = {{i < 25 ? "kept" : "other", 0.9}};
      r.corpus.papers.push_back(p);
    }
    r.theme_index = corpus_theme_frequencies(r.corpus, r.paper_themes);
    service_->sessions().insert("synthetic-session", std::move(r));
    return "synthetic-session";
  }

  testing::TempDir dir_;
  std::chrono::steady_clock::time_point now_{};
  std::shared_ptr<SessionLog> log_;
  std::unique_ptr<DiscoveryService> service_;
};

TEST_F(ServiceTest, SearchReturnsSessionAndCorpus) {
  json j = ok_json(service_->search(R"({"query":"semantic search libraries"})"));
  EXPECT_EQ(j["papers"].size(), 30u);
  EXPECT_EQ(j["timings"].size(), 3u);
  EXPECT_FALSE(j["themes"].empty());
  EXPECT_EQ(j["session_id"].get<std::string>().size(), 36u);
  EXPECT_EQ(service_->sessions().size(), 1u);
  EXPECT_EQ(log_->read().entries.size(), 3u);
}

TEST_F(ServiceTest, SearchValidation) {
  EXPECT_EQ(service_->search("not json").status, 400);
  EXPECT_EQ(service_->search("[1]").status, 400);
  auto blank = service_->search(R"({"query":"   "})");
  EXPECT_EQ(blank.status, 400);
  EXPECT_EQ(error_code(blank), "empty_query");
  auto bad = service_->search(R"({"query":"x","sources":["scopus"]})");
  EXPECT_EQ(bad.status, 400);
  EXPECT_EQ(error_code(bad), "unknown_source");
  EXPECT_EQ(service_->search(R"({"query":"x","sources":[]})").status, 400);
  EXPECT_EQ(service_->search(R"({"query":"x","limit":0})").status, 400);
  EXPECT_EQ(service_->search(R"({"query":7})").status, 400);
  EXPECT_EQ(service_->sessions().size(), 0u);
}

TEST_F(ServiceTest, SearchSourceSubset) {
  json j = ok_json(service_->search(
      R"({"query":"semantic search libraries","sources":["semantic_scholar"]})"));
  EXPECT_EQ(j["papers"].size(), 10u);
  for (const auto& p : j["papers"]) EXPECT_EQ(p["source"], "semantic_scholar");
}

TEST_F(ServiceTest, AllSourcesFailedIs502) {
  auto r = service_->search(R"({"query":"never captured"})");
  EXPECT_EQ(r.status, 502);
  EXPECT_EQ(error_code(r), "all_sources_failed");
}

TEST_F(ServiceTest, FilterComputesPercentages) {
  std::string id = insert_synthetic_session();
  json j = ok_json(service_->filter(
      json{{"session_id", id}, {"selected_themes", {"kept"}}}.dump()));
  EXPECT_EQ(j["retrieved_count"], 30);
  EXPECT_EQ(j["filtered_count"], 25);
  EXPECT_EQ(j["relevance_pct"].get<double>(), 83.33);
  EXPECT_EQ(j["reduction_pct"].get<double>(), 16.67);
  EXPECT_EQ(j["papers"].size(), 25u);
}

TEST_F(ServiceTest, FilterErrors) {
  EXPECT_EQ(service_->filter("{}").status, 400);
  auto missing = service_->filter(R"({"session_id":"nope","selected_themes":[]})");
  EXPECT_EQ(missing.status, 404);
  EXPECT_EQ(error_code(missing), "session_not_found");
  std::string id = insert_synthetic_session();
  auto unknown = service_->filter(
      json{{"session_id", id}, {"selected_themes", {"absent"}}}.dump());
  EXPECT_EQ(unknown.status, 422);
  EXPECT_EQ(error_code(unknown), "unknown_theme");
}

TEST_F(ServiceTest, ThemesStayFrozenAcrossFilters) {
  std::string id = start_session();
  json before = ok_json(service_->themes(id));
  EXPECT_TRUE(before["selected_themes"].empty());
  std::string pick = before["themes"][0]["text"];
  ok_json(service_->filter(
      json{{"session_id", id}, {"selected_themes", {pick}}}.dump()));
  json after = ok_json(service_->themes(id));
  EXPECT_EQ(after["themes"], before["themes"]);
  EXPECT_EQ(after["selected_themes"], json::array({pick}));
  EXPECT_EQ(service_->themes("nope").status, 404);
}

TEST_F(ServiceTest, GraphViews) {
  std::string id = start_session();
  EXPECT_EQ(service_->graph(id, "sideways").status, 400);
  EXPECT_EQ(service_->graph("nope", "filtered").status, 404);
  std::string unfiltered = service_->graph(id, "").body;
  EXPECT_EQ(service_->graph(id, "unfiltered").body, unfiltered);
  // Before any filter the filtered view shows everything.
  EXPECT_EQ(service_->graph(id, "filtered").body, unfiltered);

  std::string pick = ok_json(service_->themes(id))["themes"].back()["text"];
  ok_json(service_->filter(
      json{{"session_id", id}, {"selected_themes", {pick}}}.dump()));
  auto filtered = import_graph_json(service_->graph(id, "filtered").body);
  auto full = import_graph_json(unfiltered);
  EXPECT_LT(filtered.nodes.size(), full.nodes.size());
  for (const auto& n : filtered.nodes) {
    EXPECT_NE(std::find(full.nodes.begin(), full.nodes.end(), n), full.nodes.end());
  }
}

TEST_F(ServiceTest, ReportFormats) {
  std::string id = start_session();
  ok_json(service_->filter(json{{"session_id", id}}.dump()));
  json j = ok_json(service_->report("json"));
  EXPECT_EQ(j["malformed_lines"], 0);
  EXPECT_EQ(j, ok_json(service_->report("")));
  auto md = service_->report("md");
  EXPECT_EQ(md.status, 200);
  EXPECT_EQ(md.content_type, "text/markdown");
  EXPECT_EQ(md.body, render_markdown(render_report(log_->read().entries)));
  auto csv = service_->report("csv");
  EXPECT_EQ(csv.content_type, "text/csv");
  EXPECT_EQ(service_->report("pdf").status, 400);
}

TEST_F(ServiceTest, SessionsExpire) {
  std::string id = start_session();
  now_ += 3599s;
  EXPECT_EQ(service_->themes(id).status, 200);
  now_ += 1s;
  EXPECT_EQ(service_->themes(id).status, 404);
  EXPECT_EQ(service_->sessions().size(), 0u);
}

TEST_F(ServiceTest, PurgeExpired) {
  start_session();
  now_ += 1800s;
  start_session();
  now_ += 1800s;
  EXPECT_EQ(service_->sessions().purge_expired(), 1u);
  EXPECT_EQ(service_->sessions().size(), 1u);
}

TEST_F(ServiceTest, ConcurrentFiltersOnOneSession) {
  std::string id = insert_synthetic_session();
  std::vector<std::thread> threads;
  std::atomic<int> ok{0};
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i) {
        std::string theme = (t + i) % 2 ? "kept" : "other";
        auto r = service_->filter(
            json{{"session_id", id}, {"selected_themes", {theme}}}.dump());
        if (r.status == 200) ++ok;
      }
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(ok, 80);
  // 80 filters, each one aggregate row plus one per source with papers.
  EXPECT_EQ(log_->read().entries.size(), 160u);
  json themes = ok_json(service_->themes(id));
  EXPECT_EQ(themes["selected_themes"].size(), 1u);
}

TEST(SessionIdTest, UniqueUuids) {
  std::set<std::string> ids;
  for (int i = 0; i < 1000; ++i) ids.insert(new_session_id());
  EXPECT_EQ(ids.size(), 1000u);
  EXPECT_EQ(ids.begin()->size(), 36u);
}

TEST(ErrorResponseTest, Shape) {
  auto r = error_response(404, "session_not_found", "gone");
  EXPECT_EQ(r.status, 404);
  EXPECT_EQ(r.body, R"({"error":{"code":"session_not_found","message":"gone"}})");
}

TEST(RoutesTest, HttpRoundTrip) {
  testing::TempDir dir;
  testing::write_file(dir / "index.html", "<html>kgd</html>");
  auto log = std::make_shared<SessionLog>(dir / "log.jsonl");
  DiscoveryService service(testing::replay_pipeline(), log, 3600s);
  httplib::Server server;
  register_routes(server, service, dir.path());
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto res = client.Post("/api/search", R"({"query":"AI in OPAC"})",
                         "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  std::string id = json::parse(res->body)["session_id"];
  res = client.Get("/api/sessions/" + id + "/themes");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = client.Post("/api/filter", json{{"session_id", id}}.dump(),
                    "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body)["filtered_count"], 20);
  res = client.Get("/api/graph?session_id=" + id + "&view=filtered");
  ASSERT_TRUE(res);
  EXPECT_NO_THROW(import_graph_json(res->body));
  res = client.Get("/api/metrics/report?format=csv");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "text/csv");
  res = client.Get("/api/graph?session_id=missing");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  res = client.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, "<html>kgd</html>");

  server.stop();
  th.join();
}

}  // namespace
}  // namespace kgd
