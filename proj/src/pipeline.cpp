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

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

void AppConfig::validate() const {
  if (extraction.themes_per_document < 1) {
    throw InvalidArgument("themes_per_doc must be >= 1");
  }
  if (session_ttl.count() <= 0) {
    throw InvalidArgument("session_ttl_seconds must be > 0");
  }
  for (const auto& [_, s] : sources) s.validate();
  if (provider.kind == ProviderConfig::Kind::kRemote &&
      provider.base_url.empty()) {
    throw InvalidArgument("remote provider needs a base_url");
  }
}

namespace {

void apply_env(AppConfig& c) {
  if (const char* key = std::getenv("KGD_S2_API_KEY"); key && *key) {
    c.sources[SourceId::kSemanticScholar].api_key = key;
  }
  if (const char* mail = std::getenv("KGD_OPENALEX_MAILTO"); mail && *mail) {
    c.sources[SourceId::kOpenAlex].contact_email = mail;
  }
  if (const char* dir = std::getenv("KGD_FIXTURE_DIR"); dir && *dir) {
    c.fixture_dir = dir;
  }
  if (const char* log = std::getenv("KGD_LOG_PATH"); log && *log) {
    c.log_path = log;
  }
}

AppConfig base_config() {
  AppConfig c;
  for (SourceId s : kAllSources) c.sources[s] = default_source_config(s);
  c.log_path = "sessions.jsonl";
  return c;
}

void merge_json(AppConfig& c, const nlohmann::json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a json object");
  c.bind_address = j.value("bind_address", c.bind_address);
  if (j.contains("themes_per_doc")) {
    int n = j["themes_per_doc"].get<int>();
    if (n < 1) throw InvalidArgument("themes_per_doc must be >= 1");
    c.extraction.themes_per_document = static_cast<size_t>(n);
  }
  c.extraction.embed_abstract =
      j.value("embed_abstract", c.extraction.embed_abstract);
  if (j.contains("session_ttl_seconds")) {
    c.session_ttl = std::chrono::seconds(j["session_ttl_seconds"].get<int64_t>());
  }
  if (j.contains("log_path")) c.log_path = j["log_path"].get<std::string>();
  if (j.contains("fixture_dir")) {
    c.fixture_dir = j["fixture_dir"].get<std::string>();
  }
  if (j.contains("static_dir")) c.static_dir = j["static_dir"].get<std::string>();
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    std::string kind = p.value("kind", "hashed");
    if (kind == "hashed") {
      c.provider.kind = ProviderConfig::Kind::kHashed;
    } else if (kind == "remote") {
      c.provider.kind = ProviderConfig::Kind::kRemote;
      c.provider.base_url = p.value("base_url", "");
    } else {
      throw InvalidArgument("unknown provider kind '" + kind + "'");
    }
    if (p.contains("timeout_ms")) {
      c.provider.timeout = std::chrono::milliseconds(p["timeout_ms"].get<int64_t>());
    }
  }
  if (j.contains("retry")) {
    c.retry.max_retries = j["retry"].value("max_retries", c.retry.max_retries);
    if (j["retry"].contains("delay_ms")) {
      c.retry.delay = std::chrono::milliseconds(j["retry"]["delay_ms"].get<int64_t>());
    }
  }
  if (j.contains("sources")) {
    for (const auto& [name, s] : j["sources"].items()) {
      auto source = parse_source(name);
      if (!source) throw InvalidArgument("unknown source '" + name + "'");
      SourceConfig& sc = c.sources[*source];
      sc.base_url = s.value("base_url", sc.base_url);
      if (s.contains("timeout_ms")) {
        sc.timeout = std::chrono::milliseconds(s["timeout_ms"].get<int64_t>());
      }
      sc.max_results = s.value("max_results", sc.max_results);
      if (s.contains("contact_email")) {
        sc.contact_email = s["contact_email"].get<std::string>();
      }
      if (s.contains("api_key")) sc.api_key = s["api_key"].get<std::string>();
    }
  }
}

}  // namespace

AppConfig default_config() {
  AppConfig c = base_config();
  apply_env(c);
  return c;
}

AppConfig config_from_json(const nlohmann::json& j) {
  AppConfig c = base_config();
  try {
    merge_json(c, j);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("bad config: ") + e.what());
  }
  apply_env(c);
  c.validate();
  return c;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config " + path.string() + " is not json: " +
                          e.what());
  }
  return config_from_json(j);
}

std::shared_ptr<const EmbeddingProvider> make_provider(
    const ProviderConfig& config) {
  if (config.kind == ProviderConfig::Kind::kRemote) {
    return std::make_shared<RemoteEmbeddingProvider>(config.base_url,
                                                     config.timeout);
  }
  return std::make_shared<HashedFallbackProvider>();
}

std::shared_ptr<Transport> make_transport(const AppConfig& config) {
  if (config.fixture_dir) {
    return std::make_shared<ReplayTransport>(
        FixtureSet::load(*config.fixture_dir));
  }
  return std::make_shared<LiveTransport>();
}

DiscoveryPipeline::DiscoveryPipeline(
    std::shared_ptr<SourceGateway> gateway,
    std::shared_ptr<const EmbeddingProvider> provider, Stopwords stopwords,
    ExtractionOptions options)
    : gateway_(std::move(gateway)),
      provider_(std::move(provider)),
      stopwords_(std::move(stopwords)),
      options_(options) {
  if (provider_->dimension() != kEmbeddingDimension) {
    throw DimensionMismatchError(
        "provider " + provider_->name() + " reports dimension " +
        std::to_string(provider_->dimension()) + ", expected " +
        std::to_string(kEmbeddingDimension));
  }
}

DiscoveryPipeline DiscoveryPipeline::from_config(const AppConfig& config) {
  auto gateway = std::make_shared<SourceGateway>(make_transport(config),
                                                 config.sources, config.retry);
  return DiscoveryPipeline(std::move(gateway), make_provider(config.provider),
                           Stopwords::from_env(), config.extraction);
}

SearchResult DiscoveryPipeline::search(const SearchRequest& request,
                                       LogSink* sink,
                                       std::string_view session_id) const {
  const std::string query = text::trim(request.query);
  if (query.empty()) throw EmptyQueryError("query is empty");

  SearchAllResult retrieved =
      gateway_->search_all(query, request.sources, request.limit, sink,
                           session_id);
  CorpusExtraction extraction =
      extract_corpus_themes(retrieved.corpus, *provider_, stopwords_, options_);

  SearchResult out;
  out.query = query;
  out.timings = std::move(retrieved.timings);
  out.corpus.query = query;
  for (PaperRecord& p : retrieved.corpus.papers) {
    const std::string key = canonical_key(p);
    if (!extraction.themes.contains(key)) continue;
    if (auto dup = retrieved.corpus.duplicates.find(key);
        dup != retrieved.corpus.duplicates.end()) {
      out.corpus.duplicates[key] = dup->second;
    }
    out.corpus.papers.push_back(std::move(p));
  }
  for (const PaperRecord& p : extraction.dropped) {
    out.warnings.push_back({"empty_text", 422, p.id, p.source,
                            "title has no tokens to embed; paper dropped"});
  }
  out.paper_themes = std::move(extraction.themes);
  out.theme_index = corpus_theme_frequencies(out.corpus, out.paper_themes);
  return out;
}

FilterResult apply_filter(const SearchResult& search,
                          const ThemeSelection& selection, LogSink* sink,
                          std::string_view session_id) {
  std::set<std::string> known;
  for (const ThemeFrequency& t : search.theme_index) known.insert(t.text);
  for (const std::string& s : selection.selected()) {
    if (!known.contains(s)) {
      throw UnknownThemeError("theme '" + s + "' is not in this session's index");
    }
  }

  FilterResult out;
  out.selection = selection;
  out.outcome = filter_corpus(search.corpus, search.paper_themes, selection,
                              {sink, std::string(session_id), search.query});
  if (out.outcome.retrieved_count > 0) {
    out.relevance = compute_relevance(out.outcome.retrieved_count,
                                      out.outcome.filtered_count);
    out.reduction = compute_reduction(out.outcome.retrieved_count,
                                      out.outcome.filtered_count);
  }
  return out;
}

std::optional<GraphView> parse_graph_view(std::string_view s) {
  if (s == "unfiltered") return GraphView::kUnfiltered;
  if (s == "filtered") return GraphView::kFiltered;
  return std::nullopt;
}

DiscoveryGraph graph_for(const SearchResult& search,
                         const std::optional<FilterResult>& filter,
                         GraphView view) {
  if (view == GraphView::kFiltered && filter) {
    return build_graph(search.query, filter->outcome.retained,
                       search.paper_themes);
  }
  return build_graph(search.query, search.corpus.papers, search.paper_themes);
}

nlohmann::json theme_index_to_json(const std::vector<ThemeFrequency>& index) {
  nlohmann::json out = nlohmann::json::array();
  for (const ThemeFrequency& t : index) out.push_back(t);
  return out;
}

nlohmann::json search_result_to_json(const SearchResult& r) {
  nlohmann::json j;
  j["query"] = r.query;
  j["papers"] = r.corpus.papers;
  j["themes"] = theme_index_to_json(r.theme_index);
  nlohmann::json per_paper = nlohmann::json::object();
  for (const auto& [key, themes] : r.paper_themes) per_paper[key] = themes;
  j["paper_themes"] = std::move(per_paper);
  nlohmann::json dups = nlohmann::json::object();
  for (const auto& [key, sources] : r.corpus.duplicates) dups[key] = sources;
  j["duplicates"] = std::move(dups);
  j["timings"] = r.timings;
  nlohmann::json warnings = nlohmann::json::array();
  for (const PaperWarning& w : r.warnings) {
    warnings.push_back({{"code", w.code},
                        {"status", w.status},
                        {"paper_id", w.paper_id},
                        {"source", w.source},
                        {"message", w.message}});
  }
  j["warnings"] = std::move(warnings);
  return j;
}

SearchResult search_result_from_json(const nlohmann::json& j) {
  SearchResult r;
  try {
    j.at("query").get_to(r.query);
    r.corpus.query = r.query;
    j.at("papers").get_to(r.corpus.papers);
    for (const auto& [key, themes] : j.at("paper_themes").items()) {
      r.paper_themes[key] = themes.get<std::vector<Theme>>();
    }
    if (j.contains("duplicates")) {
      for (const auto& [key, sources] : j["duplicates"].items()) {
        r.corpus.duplicates[key] = sources.get<std::vector<SourceId>>();
      }
    }
    if (j.contains("timings")) {
      for (const auto& t : j["timings"]) {
        RetrievalTiming timing;
        t.at("source").get_to(timing.source);
        t.at("query").get_to(timing.query);
        t.at("elapsed").get_to(timing.elapsed);
        t.at("paper_count").get_to(timing.paper_count);
        const std::string outcome = t.at("outcome").get<std::string>();
        for (auto o : {RetrievalOutcome::kOk, RetrievalOutcome::kTimeout,
                       RetrievalOutcome::kHttpError,
                       RetrievalOutcome::kParseError}) {
          if (to_string(o) == outcome) timing.outcome = o;
        }
        r.timings.push_back(timing);
      }
    }
    if (j.contains("warnings")) {
      for (const auto& w : j["warnings"]) {
        r.warnings.push_back({w.at("code").get<std::string>(),
                              w.at("status").get<int>(),
                              w.at("paper_id").get<std::string>(),
                              w.at("source").get<SourceId>(),
                              w.at("message").get<std::string>()});
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed search result: ") + e.what());
  }
  for (const PaperRecord& p : r.corpus.papers) validate(p);
  // The index is derived, never trusted from the file.
  r.theme_index = corpus_theme_frequencies(r.corpus, r.paper_themes);
  return r;
}

FilterResult DiscoveryPipeline::filter(const SearchResult& search,
                                       const ThemeSelection& selection,
                                       LogSink* sink,
                                       std::string_view session_id) const {
  return apply_filter(search, selection, sink, session_id);
}

nlohmann::json filter_result_to_json(const FilterResult& r) {
  nlohmann::json j;
  j["selected_themes"] = r.selection.selected();
  j["papers"] = r.outcome.retained;
  j["retrieved_count"] = r.outcome.retrieved_count;
  j["filtered_count"] = r.outcome.filtered_count;
  j["relevance_pct"] =
      r.relevance ? nlohmann::json(rounded_percentage(*r.relevance))
                  : nlohmann::json(nullptr);
  j["reduction_pct"] =
      r.reduction ? nlohmann::json(rounded_percentage(*r.reduction))
                  : nlohmann::json(nullptr);
  return j;
}

}  // namespace kgd
