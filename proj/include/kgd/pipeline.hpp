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
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kgd/embedding.hpp"
#include "kgd/filter.hpp"
#include "kgd/gateway.hpp"
#include "kgd/graph.hpp"
#include "kgd/metrics.hpp"
#include "kgd/themes.hpp"

namespace kgd {

inline constexpr int kDefaultPerSourceLimit = 10;

struct ProviderConfig {
  enum class Kind { kHashed, kRemote };
  Kind kind = Kind::kHashed;
  std::string base_url;  // remote only
  std::chrono::milliseconds timeout{10'000};
};

// Settings shared by the HTTP service and the command line. Loaded from a
// JSON file; every key is optional:
//
//   {
//     "bind_address": "127.0.0.1:8080",
//     "themes_per_doc": 5,
//     "embed_abstract": false,
//     "session_ttl_seconds": 3600,
//     "log_path": "sessions.jsonl",
//     "fixture_dir": "fixtures/",
//     "static_dir": "web/dist",
//     "provider": {"kind": "hashed"} | {"kind": "remote", "base_url": "..."},
//     "sources": {"openalex": {"base_url": "...", "timeout_ms": 10000,
//                              "max_results": 100, "contact_email": "..."}}
//   }
struct AppConfig {
  std::string bind_address = "127.0.0.1:8080";
  std::map<SourceId, SourceConfig> sources;
  ExtractionOptions extraction;
  ProviderConfig provider;
  std::chrono::seconds session_ttl{3600};
  std::filesystem::path log_path;
  std::optional<std::filesystem::path> fixture_dir;
  std::optional<std::filesystem::path> static_dir;
  RetryPolicy retry;

  // Throws InvalidArgument.
  void validate() const;
};

// Defaults plus environment overrides (KGD_S2_API_KEY, KGD_OPENALEX_MAILTO,
// KGD_FIXTURE_DIR, KGD_LOG_PATH).
AppConfig default_config();
// Defaults, then the file, then the environment. Throws IoError or
// InvalidArgument.
AppConfig load_config(const std::filesystem::path& path);
AppConfig config_from_json(const nlohmann::json& j);

std::shared_ptr<const EmbeddingProvider> make_provider(
    const ProviderConfig& config);
// Replay when the config names a fixture directory, live otherwise.
std::shared_ptr<Transport> make_transport(const AppConfig& config);

struct SearchRequest {
  std::string query;
  std::set<SourceId> sources{kAllSources.begin(), kAllSources.end()};
  int limit = kDefaultPerSourceLimit;
};

struct PaperWarning {
  std::string code;  // "empty_text"
  int status = 422;
  std::string paper_id;
  SourceId source = SourceId::kEuropePmc;
  std::string message;
};

// Everything one pass of retrieval and theme extraction produced.
struct SearchResult {
  std::string query;
  Corpus corpus;
  PaperThemes paper_themes;
  std::vector<ThemeFrequency> theme_index;
  std::vector<RetrievalTiming> timings;
  std::vector<PaperWarning> warnings;
};

struct FilterResult {
  ThemeSelection selection;
  FilterOutcome outcome;
  // Absent when the corpus is empty.
  std::optional<Percentage> relevance;
  std::optional<Percentage> reduction;
};

// Retrieval, theme extraction and filtering wired together. The CLI and the
// service both go through this class.
class DiscoveryPipeline {
 public:
  DiscoveryPipeline(std::shared_ptr<SourceGateway> gateway,
                    std::shared_ptr<const EmbeddingProvider> provider,
                    Stopwords stopwords, ExtractionOptions options);

  static DiscoveryPipeline from_config(const AppConfig& config);

  // Throws EmptyQueryError and AllSourcesFailedError.
  SearchResult search(const SearchRequest& request, LogSink* sink = nullptr,
                      std::string_view session_id = {}) const;

  FilterResult filter(const SearchResult& search,
                      const ThemeSelection& selection,
                      LogSink* sink = nullptr,
                      std::string_view session_id = {}) const;

  const EmbeddingProvider& provider() const { return *provider_; }

 private:
  std::shared_ptr<SourceGateway> gateway_;
  std::shared_ptr<const EmbeddingProvider> provider_;
  Stopwords stopwords_;
  ExtractionOptions options_;
};

// Validates the selection against the frozen theme index, filters, and
// computes relevance and reduction. Throws UnknownThemeError.
FilterResult apply_filter(const SearchResult& search,
                          const ThemeSelection& selection,
                          LogSink* sink = nullptr,
                          std::string_view session_id = {});

enum class GraphView { kUnfiltered, kFiltered };

std::optional<GraphView> parse_graph_view(std::string_view s);

DiscoveryGraph graph_for(const SearchResult& search,
                         const std::optional<FilterResult>& filter,
                         GraphView view);

// JSON forms shared by the CLI output files and the HTTP responses.
nlohmann::json search_result_to_json(const SearchResult& r);
SearchResult search_result_from_json(const nlohmann::json& j);
nlohmann::json filter_result_to_json(const FilterResult& r);
nlohmann::json theme_index_to_json(const std::vector<ThemeFrequency>& index);

}  // namespace kgd
