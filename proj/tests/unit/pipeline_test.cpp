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


#include "kgd/pipeline.hpp"

#include <gtest/gtest.h>

#include "kgd/errors.hpp"
#include "replay_session.hpp"
#include "test_support.hpp"

namespace kgd {
namespace {

using testing::replay_pipeline;

TEST(PipelineTest, ReplaySearch) {
  auto pipeline = replay_pipeline();
  MemoryLog log;
  SearchResult r = pipeline->search({"  semantic search libraries "}, &log, "s");
  EXPECT_EQ(r.query, "semantic search libraries");
  EXPECT_EQ(r.corpus.papers.size(), 30u);
  EXPECT_EQ(r.paper_themes.size(), 30u);
  EXPECT_EQ(r.timings.size(), 3u);
  EXPECT_TRUE(r.warnings.empty());
  EXPECT_FALSE(r.theme_index.empty());
  for (const auto& [key, themes] : r.paper_themes) {
    EXPECT_GE(themes.size(), 1u);
    EXPECT_LE(themes.size(), 5u);
  }
  for (size_t i = 1; i < r.theme_index.size(); ++i) {
    const auto& a = r.theme_index[i - 1];
    const auto& b = r.theme_index[i];
    EXPECT_TRUE(a.doc_frequency > b.doc_frequency ||
                (a.doc_frequency == b.doc_frequency && a.text < b.text));
  }
  EXPECT_EQ(log.entries().size(), 3u);
}

TEST(PipelineTest, TwoSourceQuery) {
  auto r = replay_pipeline()->search({"AI in OPAC"});
  EXPECT_EQ(r.corpus.papers.size(), 20u);
  EXPECT_EQ(r.timings[2].paper_count, 0u);
}

TEST(PipelineTest, EmptyQuery) {
  EXPECT_THROW(replay_pipeline()->search({" \t"}), EmptyQueryError);
}

TEST(PipelineTest, SourceSubset) {
  SearchRequest req{testing::kReplayQuery, {SourceId::kSemanticScholar}, 10};
  auto r = replay_pipeline()->search(req);
  EXPECT_EQ(r.corpus.papers.size(), 10u);
  EXPECT_EQ(r.timings.size(), 1u);
}

TEST(PipelineTest, UntokenizablePaperWarnsAndIsDropped) {
  nlohmann::json body = {
      {"meta", {{"count", 2}}},
      {"results",
       {{{"id", "https://openalex.org/W1"}, {"display_name", "Graph search"}},
        {{"id", "https://openalex.org/W2"}, {"display_name", "\xe2\x80\x94 ??"}}}}};
  FixtureSet set;
  set.put(SourceId::kOpenAlex, {"q", body.dump(), 1.0, 200});
  testing::TempDir dir;
  set.save(dir.path());
  auto r = replay_pipeline(dir.path())->search({"q", {SourceId::kOpenAlex}, 10});
  EXPECT_EQ(r.corpus.papers.size(), 1u);
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_EQ(r.warnings[0].code, "empty_text");
  EXPECT_EQ(r.warnings[0].status, 422);
  EXPECT_EQ(r.warnings[0].paper_id, "https://openalex.org/W2");
}

TEST(PipelineTest, FilterRejectsUnknownTheme) {
  auto pipeline = replay_pipeline();
  auto r = pipeline->search({testing::kReplayQuery});
  EXPECT_THROW(pipeline->filter(r, ThemeSelection(std::vector<std::string>{
                                       "zzz not a theme"})),
               UnknownThemeError);
}

TEST(PipelineTest, FilterMetrics) {
  auto pipeline = replay_pipeline();
  auto r = pipeline->search({testing::kReplayQuery});
  auto all = pipeline->filter(r, ThemeSelection{});
  EXPECT_EQ(all.outcome.filtered_count, 30u);
  EXPECT_EQ(to_double(*all.relevance), 100.0);
  EXPECT_EQ(to_double(*all.reduction), 0.0);

  auto top = pipeline->filter(
      r, ThemeSelection(std::vector<std::string>{r.theme_index[0].text}));
  EXPECT_EQ(top.outcome.filtered_count, r.theme_index[0].doc_frequency);
  EXPECT_EQ(*top.relevance + *top.reduction, Percentage(100));
}

TEST(PipelineTest, FilterOnEmptyCorpusHasNoMetrics) {
  SearchResult empty;
  empty.query = "q";
  auto f = apply_filter(empty, ThemeSelection{});
  EXPECT_FALSE(f.relevance);
  EXPECT_FALSE(f.reduction);
  auto j = filter_result_to_json(f);
  EXPECT_TRUE(j["relevance_pct"].is_null());
}

TEST(PipelineTest, GraphViews) {
  auto pipeline = replay_pipeline();
  auto r = pipeline->search({testing::kReplayQuery});
  auto unfiltered = graph_for(r, std::nullopt, GraphView::kUnfiltered);
  auto no_filter = graph_for(r, std::nullopt, GraphView::kFiltered);
  EXPECT_EQ(export_graph_json(no_filter), export_graph_json(unfiltered));

  auto everything = pipeline->filter(r, ThemeSelection{});
  EXPECT_EQ(export_graph_json(graph_for(r, everything, GraphView::kFiltered)),
            export_graph_json(unfiltered));

  auto narrow = pipeline->filter(
      r, ThemeSelection(std::vector<std::string>{r.theme_index.back().text}));
  auto g = graph_for(r, narrow, GraphView::kFiltered);
  size_t papers = 0;
  for (const auto& n : g.nodes) papers += n.kind == NodeKind::kPaper;
  EXPECT_EQ(papers, narrow.outcome.filtered_count);
  EXPECT_LT(g.nodes.size(), unfiltered.nodes.size());
  EXPECT_NO_THROW(validate(g));
}

TEST(PipelineTest, ParseGraphView) {
  EXPECT_EQ(parse_graph_view("filtered"), GraphView::kFiltered);
  EXPECT_EQ(parse_graph_view("unfiltered"), GraphView::kUnfiltered);
  EXPECT_FALSE(parse_graph_view("Filtered"));
}

TEST(PipelineTest, SearchResultJsonRoundTrip) {
  auto r = replay_pipeline()->search({testing::kReplayQuery});
  auto j = search_result_to_json(r);
  SearchResult back = search_result_from_json(j);
  EXPECT_EQ(back.corpus, r.corpus);
  EXPECT_EQ(back.paper_themes, r.paper_themes);
  EXPECT_EQ(back.timings, r.timings);
  EXPECT_EQ(search_result_to_json(back).dump(), j.dump());
  EXPECT_THROW(search_result_from_json(nlohmann::json::object()), InvalidArgument);
}

TEST(PipelineTest, ProviderDimensionChecked) {
  class Tiny : public EmbeddingProvider {
   public:
    std::string name() const override { return "tiny"; }
    size_t dimension() const override { return 8; }
    EmbeddingVector embed(std::string_view) const override {
      return EmbeddingVector::normalized(std::vector<double>(8, 1.0));
    }
  };
  auto gw = std::make_shared<SourceGateway>(
      std::make_shared<ReplayTransport>(FixtureSet{}),
      std::map<SourceId, SourceConfig>{});
  EXPECT_THROW(DiscoveryPipeline(gw, std::make_shared<Tiny>(),
                                 Stopwords::builtin(), {}),
               DimensionMismatchError);
}

TEST(ConfigTest, Defaults) {
  testing::EnvGuard a("KGD_FIXTURE_DIR", std::nullopt);
  testing::EnvGuard b("KGD_LOG_PATH", std::nullopt);
  AppConfig c = default_config();
  EXPECT_EQ(c.bind_address, "127.0.0.1:8080");
  EXPECT_EQ(c.sources.size(), 3u);
  EXPECT_EQ(c.extraction.themes_per_document, 5u);
  EXPECT_FALSE(c.extraction.embed_abstract);
  EXPECT_EQ(c.session_ttl, std::chrono::seconds(3600));
  EXPECT_EQ(c.log_path, "sessions.jsonl");
  EXPECT_FALSE(c.fixture_dir);
  EXPECT_EQ(c.provider.kind, ProviderConfig::Kind::kHashed);
}

TEST(ConfigTest, FromJson) {
  auto c = config_from_json(nlohmann::json::parse(R"({
    "bind_address": "0.0.0.0:9000",
    "themes_per_doc": 3,
    "embed_abstract": true,
    "session_ttl_seconds": 60,
    "provider": {"kind": "remote", "base_url": "http://127.0.0.1:5000"},
    "sources": {"openalex": {"timeout_ms": 2500, "contact_email": "x@y.z"}}
  })"));
  EXPECT_EQ(c.bind_address, "0.0.0.0:9000");
  EXPECT_EQ(c.extraction.themes_per_document, 3u);
  EXPECT_TRUE(c.extraction.embed_abstract);
  EXPECT_EQ(c.session_ttl, std::chrono::seconds(60));
  EXPECT_EQ(c.provider.kind, ProviderConfig::Kind::kRemote);
  EXPECT_EQ(c.sources[SourceId::kOpenAlex].timeout,
            std::chrono::milliseconds(2500));
  EXPECT_EQ(c.sources[SourceId::kOpenAlex].contact_email, "x@y.z");
  EXPECT_EQ(c.sources[SourceId::kEuropePmc].timeout,
            std::chrono::milliseconds(10000));
}

TEST(ConfigTest, Rejections) {
  for (const char* bad : {
           R"([])",
           R"({"themes_per_doc": 0})",
           R"({"session_ttl_seconds": 0})",
           R"({"provider": {"kind": "magic"}})",
           R"({"provider": {"kind": "remote"}})",
           R"({"sources": {"scopus": {}}})",
           R"({"sources": {"openalex": {"max_results": 500}}})",
           R"({"themes_per_doc": "five"})",
       }) {
    EXPECT_THROW(config_from_json(nlohmann::json::parse(bad)), InvalidArgument)
        << bad;
  }
}

TEST(ConfigTest, EnvironmentWins) {
  testing::EnvGuard a("KGD_LOG_PATH", "/tmp/env.jsonl");
  testing::EnvGuard b("KGD_S2_API_KEY", "k");
  auto c = config_from_json(nlohmann::json::parse(R"({"log_path": "file.jsonl"})"));
  EXPECT_EQ(c.log_path, "/tmp/env.jsonl");
  EXPECT_EQ(c.sources[SourceId::kSemanticScholar].api_key, "k");
}

TEST(ConfigTest, LoadFile) {
  testing::TempDir dir;
  EXPECT_THROW(load_config(dir / "missing.json"), IoError);
  testing::write_file(dir / "bad.json", "{not json");
  EXPECT_THROW(load_config(dir / "bad.json"), InvalidArgument);
  testing::write_file(dir / "ok.json", R"({"fixture_dir": "fx"})");
  testing::EnvGuard g("KGD_FIXTURE_DIR", std::nullopt);
  EXPECT_EQ(load_config(dir / "ok.json").fixture_dir, "fx");
}

TEST(ConfigTest, MakeProviderAndTransport) {
  EXPECT_EQ(make_provider({})->name(), "hashed-fallback");
  ProviderConfig remote{ProviderConfig::Kind::kRemote, "http://127.0.0.1:1",
                        std::chrono::milliseconds(100)};
  EXPECT_EQ(make_provider(remote)->name(), "remote:http://127.0.0.1:1");
  AppConfig c = config_from_json(nlohmann::json::object());
  c.fixture_dir = testing::fixture_dir();
  EXPECT_NE(dynamic_cast<ReplayTransport*>(make_transport(c).get()), nullptr);
  c.fixture_dir.reset();
  EXPECT_NE(dynamic_cast<LiveTransport*>(make_transport(c).get()), nullptr);
}

// Frozen end-to-end outputs of the replayed session.
class GoldenTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    artifacts_ = new testing::ReplayArtifacts(
        testing::run_replay_session(*replay_pipeline()));
  }
  static void TearDownTestSuite() {
    delete artifacts_;
    artifacts_ = nullptr;
  }
  static void check(const std::string& name, const std::string& actual) {
    std::string diag;
    EXPECT_TRUE(testing::matches_golden(name, actual, &diag)) << diag;
  }
  static testing::ReplayArtifacts* artifacts_;
};

testing::ReplayArtifacts* GoldenTest::artifacts_ = nullptr;

TEST_F(GoldenTest, SearchResult) { check("search.json", artifacts_->search_json); }
TEST_F(GoldenTest, FilterResult) { check("filter.json", artifacts_->filter_json); }
TEST_F(GoldenTest, GraphJson) { check("graph.json", artifacts_->graph_json); }
TEST_F(GoldenTest, GraphDot) { check("graph.dot", artifacts_->graph_dot); }
TEST_F(GoldenTest, FilteredGraphDot) {
  check("graph_filtered.dot", artifacts_->filtered_graph_dot);
}
TEST_F(GoldenTest, Report) { check("report.md", artifacts_->report_md); }

TEST_F(GoldenTest, RerunIsByteIdentical) {
  auto again = testing::run_replay_session(*replay_pipeline());
  EXPECT_EQ(again.search_json, artifacts_->search_json);
  EXPECT_EQ(again.graph_dot, artifacts_->graph_dot);
  EXPECT_EQ(again.report_md, artifacts_->report_md);
}

}  // namespace
}  // namespace kgd
