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


#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include "kgd/errors.hpp"
#include "kgd/gateway.hpp"
#include "test_support.hpp"

namespace kgd {
namespace {

const std::string kQuery = "semantic search libraries";

std::string fixture_body(SourceId source, const std::string& query) {
  return testing::read_file(testing::fixture_dir() /
                            (FixtureSet::file_stem(source, query) + ".json"));
}

TEST(EuropePmcParserTest, FixtureTitlesAndSource) {
  std::string body = fixture_body(SourceId::kEuropePmc, kQuery);
  auto raw = nlohmann::json::parse(body)["resultList"]["result"];
  auto records = parse_europe_pmc(body);
  ASSERT_EQ(records.size(), 10u);
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].title, raw[i]["title"].get<std::string>());
    EXPECT_EQ(records[i].source, SourceId::kEuropePmc);
    EXPECT_EQ(records[i].url, "https://europepmc.org/article/MED/" +
                                  raw[i]["id"].get<std::string>());
    EXPECT_NO_THROW(validate(records[i]));
  }
  EXPECT_EQ(records[0].authors, (std::vector<std::string>{"Rao K", "Menon S"}));
  EXPECT_EQ(records[0].year, 2024);
  EXPECT_EQ(records[0].doi, "10.5555/kgd.ssl.e01");
}

TEST(EuropePmcParserTest, EdgeCases) {
  EXPECT_TRUE(parse_europe_pmc(R"({"resultList":{"result":[]}})").empty());
  auto r = parse_europe_pmc(
      R"({"resultList":{"result":[{"id":"1","source":"PMC","title":"T",)"
      R"("pubYear":2020,"authorString":"Solo A"}]}})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].doi);
  EXPECT_FALSE(r[0].abstract);
  EXPECT_EQ(r[0].year, 2020);
  EXPECT_EQ(r[0].authors, (std::vector<std::string>{"Solo A"}));
  EXPECT_EQ(r[0].url, "https://europepmc.org/article/PMC/1");
}

TEST(EuropePmcParserTest, ErrorsCarryPath) {
  try {
    parse_europe_pmc(R"({"resultList":{"result":[{"title":"no id"}]}})");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.path(), "$.resultList.result[0].id");
  }
  EXPECT_THROW(parse_europe_pmc("{"), ParseError);
  EXPECT_THROW(parse_europe_pmc(R"({"hitCount":0})"), ParseError);
  EXPECT_THROW(parse_europe_pmc(R"({"resultList":{"result":{}}})"), ParseError);
}

TEST(OpenAlexParserTest, FixtureTitlesAndAbstract) {
  std::string body = fixture_body(SourceId::kOpenAlex, kQuery);
  auto raw = nlohmann::json::parse(body)["results"];
  auto records = parse_openalex(body);
  ASSERT_EQ(records.size(), 10u);
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].title, raw[i]["display_name"].get<std::string>());
    EXPECT_EQ(records[i].id, raw[i]["id"].get<std::string>());
    EXPECT_EQ(records[i].url, records[i].id);
    EXPECT_NO_THROW(validate(records[i]));
  }
  EXPECT_EQ(records[0].abstract,
            "Open scholarly metadata enables semantic search across libraries "
            "and repositories.");
  EXPECT_EQ(records[0].doi, "10.5555/kgd.ssl.o01");
  EXPECT_FALSE(records[4].doi);
  EXPECT_EQ(records[2].title, "Bibliothèques numériques et recherche sémantique");
}

TEST(OpenAlexParserTest, InvertedIndex) {
  EXPECT_EQ(reconstruct_inverted_abstract(
                nlohmann::json::parse(R"({"semantic":[0],"search":[1]})")),
            "semantic search");
  EXPECT_EQ(reconstruct_inverted_abstract(nlohmann::json::parse(
                R"({"the":[0,3],"cat":[1],"saw":[2],"dog":[4]})")),
            "the cat saw the dog");
  EXPECT_THROW(reconstruct_inverted_abstract(nlohmann::json::parse(R"({"a":1})")),
               ParseError);
}

TEST(OpenAlexParserTest, EdgeCases) {
  EXPECT_TRUE(parse_openalex(R"({"meta":{"count":0},"results":[]})").empty());
  auto r = parse_openalex(
      R"({"results":[{"id":"https://openalex.org/W1","title":"Fallback title",)"
      R"("display_name":null,"doi":"https://doi.org/10.1/ABC",)"
      R"("publication_year":2024,"abstract_inverted_index":null},)"
      R"({"id":"https://openalex.org/W2","display_name":"  "}]})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].title, "Fallback title");
  EXPECT_EQ(r[0].doi, "10.1/abc");
  EXPECT_FALSE(r[0].abstract);
  EXPECT_THROW(parse_openalex(R"({"results":[{"id":"W","display_name":"x",)"
                              R"("abstract_inverted_index":[]}]})"),
               ParseError);
}

TEST(SemanticScholarParserTest, FixtureTitles) {
  std::string body = fixture_body(SourceId::kSemanticScholar, kQuery);
  auto raw = nlohmann::json::parse(body)["data"];
  auto records = parse_semantic_scholar(body);
  ASSERT_EQ(records.size(), 10u);
  for (size_t i = 0; i < records.size(); ++i) {
    EXPECT_EQ(records[i].title, raw[i]["title"].get<std::string>());
    EXPECT_EQ(records[i].id, raw[i]["paperId"].get<std::string>());
    EXPECT_NO_THROW(validate(records[i]));
  }
  // Upper-case DOI on the wire, lower-case in the record.
  EXPECT_EQ(raw[0]["externalIds"]["DOI"], "10.5555/KGD.SSL.S01");
  EXPECT_EQ(records[0].doi, "10.5555/kgd.ssl.s01");
  EXPECT_FALSE(records[5].doi);
}

TEST(SemanticScholarParserTest, EdgeCases) {
  EXPECT_TRUE(parse_semantic_scholar(R"({"total":0,"offset":0})").empty());
  auto r = parse_semantic_scholar(
      R"({"total":1,"data":[{"paperId":"abc","title":"T","year":null}]})");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].doi);
  EXPECT_FALSE(r[0].year);
  EXPECT_FALSE(r[0].url);
  EXPECT_THROW(parse_semantic_scholar(R"({"data":[{"title":"T"}]})"), ParseError);
  EXPECT_THROW(parse_semantic_scholar(R"([])"), ParseError);
}

TEST(ParseResponseTest, GoldenRecords) {
  for (SourceId s : kAllSources) {
    nlohmann::json j = parse_response(s, fixture_body(s, kQuery));
    std::string diag;
    EXPECT_TRUE(testing::matches_golden(
        "parsed_" + std::string(to_string(s)) + ".json", j.dump(1) + "\n", &diag))
        << diag;
  }
}

}  // namespace
}  // namespace kgd
