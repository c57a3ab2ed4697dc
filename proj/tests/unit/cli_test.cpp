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


#include "kgd/cli.hpp"

#include <gtest/gtest.h>

#include <sstream>

#include "fake_server.hpp"
#include "replay_session.hpp"
#include "test_support.hpp"

namespace kgd {
namespace {

using nlohmann::json;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "kgd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  std::string fixtures() const { return testing::fixture_dir().string(); }
  std::string log() const { return (dir_ / "log.jsonl").string(); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  testing::TempDir dir_;
};

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"search"}).code, kExitUsage);
  EXPECT_EQ(run({"frobnicate"}).code, kExitUsage);
  EXPECT_EQ(run({"search", "q", "--limit", "0"}).code, kExitUsage);
  EXPECT_EQ(run({"graph", "--in", "x", "--format", "svg"}).code, kExitUsage);
  auto blank = run({"search", "  ", "--fixtures", fixtures(), "--log", log()});
  EXPECT_EQ(blank.code, kExitUsage);
}

TEST_F(CliTest, UnknownSourceListsValidOnes) {
  auto r = run({"search", "q", "--sources", "bogus", "--fixtures", fixtures(),
                "--log", log()});
  EXPECT_EQ(r.code, kExitUsage);
  EXPECT_NE(r.err.find("europe_pmc, openalex, semantic_scholar"),
            std::string::npos);
}

TEST_F(CliTest, Help) {
  auto r = run({"--help"});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("search"), std::string::npos);
}

TEST_F(CliTest, SearchMatchesDirectPipelineCall) {
  auto r = run({"search", "semantic search libraries", "--fixtures", fixtures(),
                "--log", log()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  auto direct = testing::replay_pipeline()->search({"semantic search libraries"});
  EXPECT_EQ(r.out, search_result_to_json(direct).dump(2) + "\n");
  EXPECT_EQ(read_log(log()).entries.size(), 3u);
}

TEST_F(CliTest, SearchOptions) {
  auto r = run({"search", "semantic search libraries", "--fixtures", fixtures(),
                "--log", log(), "--sources", "openalex,semantic_scholar",
                "--limit", "4", "--themes-per-doc", "2", "--out",
                path("s.json")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_TRUE(r.out.empty());
  json j = json::parse(testing::read_file(path("s.json")));
  EXPECT_EQ(j["papers"].size(), 8u);
  for (const auto& [key, themes] : j["paper_themes"].items()) {
    EXPECT_LE(themes.size(), 2u);
  }
}

TEST_F(CliTest, AllSourcesFailed) {
  auto r = run({"search", "never captured", "--fixtures", fixtures(), "--log",
                log()});
  EXPECT_EQ(r.code, kExitRetrievalFailed);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
}

TEST_F(CliTest, IoErrors) {
  auto r = run({"search", "AI in OPAC", "--fixtures", fixtures(), "--log", log(),
                "--out", path("no/such/dir/out.json")});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_EQ(run({"filter", "--in", path("missing.json"), "--log", log()}).code,
            kExitIo);
  EXPECT_EQ(run({"search", "q", "--fixtures", path("nofixtures")}).code, kExitIo);
  EXPECT_EQ(run({"search", "AI in OPAC", "--fixtures", fixtures(), "--log",
                 path("no/such/dir/log.jsonl")})
                .code,
            kExitIo);
}

TEST_F(CliTest, FilterGraphAndReportChain) {
  ASSERT_EQ(run({"search", "semantic search libraries", "--fixtures", fixtures(),
                 "--log", log(), "--out", path("s.json")})
                .code,
            kExitOk);
  auto search = search_result_from_json(
      json::parse(testing::read_file(path("s.json"))));
  const std::string pick = search.theme_index[0].text;

  auto bad = run({"filter", "--in", path("s.json"), "--select", "zzz absent",
                  "--log", log()});
  EXPECT_EQ(bad.code, kExitUsage);

  auto f = run({"filter", "--in", path("s.json"), "--select", pick, "--log",
                log(), "--out", path("f.json")});
  ASSERT_EQ(f.code, kExitOk) << f.err;
  auto direct = apply_filter(search, ThemeSelection(std::vector<std::string>{pick}));
  EXPECT_EQ(f.out, "relevance_pct: " + format_decimal(*direct.relevance) +
                       "\nreduction_pct: " + format_decimal(*direct.reduction) +
                       "\n");
  json fj = json::parse(testing::read_file(path("f.json")));
  EXPECT_EQ(fj["filtered_count"], direct.outcome.filtered_count);
  EXPECT_EQ(fj["papers"], json(direct.outcome.retained));

  auto g = run({"graph", "--in", path("f.json"), "--view", "filtered",
                "--format", "dot"});
  ASSERT_EQ(g.code, kExitOk) << g.err;
  EXPECT_EQ(g.out, export_graph_dot(graph_for(search, direct, GraphView::kFiltered)));
  auto gu = run({"graph", "--in", path("s.json")});
  EXPECT_EQ(gu.out,
            export_graph_json(graph_for(search, std::nullopt, GraphView::kUnfiltered)) +
                "\n");

  auto rep = run({"report", "--log", log()});
  ASSERT_EQ(rep.code, kExitOk);
  EXPECT_EQ(rep.out, render_markdown(render_report(read_log(log()).entries)));
  auto csv = run({"report", "--log", log(), "--format", "csv"});
  EXPECT_EQ(csv.out, render_csv(render_report(read_log(log()).entries)));
}

TEST_F(CliTest, ReportOnEmptyLog) {
  auto r = run({"report", "--log", path("never-written.jsonl")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_EQ(r.out, render_markdown(render_report({})));
  auto j = run({"report", "--log", path("never-written.jsonl"), "--format", "json"});
  EXPECT_NO_THROW(json::parse(j.out));
}

TEST_F(CliTest, ReportWarnsAboutMalformedLines) {
  testing::write_file(path("l.jsonl"), "garbage\n");
  auto r = run({"report", "--log", path("l.jsonl")});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.err.find("skipped 1 malformed"), std::string::npos);
}

TEST_F(CliTest, CaptureRecordsAndWarnsOnOverwrite) {
  testing::FakeServer server;
  server.server().Get("/works", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        R"({"meta":{"count":1},"results":[{"id":"https://openalex.org/W9","display_name":"Captured work"}]})",
        "application/json");
  });
  server.start();
  testing::write_file(
      path("cfg.json"),
      json{{"sources", {{"openalex", {{"base_url", server.base_url()}}}}}}.dump());

  const std::vector<std::string> args = {"--config",  path("cfg.json"),
                                         "capture",   "captured query",
                                         "--sources", "openalex",
                                         "--fixtures", path("fx")};
  auto first = run(args);
  ASSERT_EQ(first.code, kExitOk) << first.err;
  EXPECT_EQ(first.out.rfind("openalex: ok, 1 records", 0), 0u);
  EXPECT_TRUE(first.err.empty());
  auto second = run(args);
  EXPECT_NE(second.err.find("overwriting fixture " +
                            FixtureSet::file_stem(SourceId::kOpenAlex,
                                                  "captured query")),
            std::string::npos);

  auto replayed = run({"search", "captured query", "--sources", "openalex",
                       "--fixtures", path("fx"), "--log", log()});
  ASSERT_EQ(replayed.code, kExitOk) << replayed.err;
  EXPECT_EQ(json::parse(replayed.out)["papers"][0]["title"], "Captured work");
}

}  // namespace
}  // namespace kgd
