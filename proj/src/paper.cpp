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

#include "kgd/paper.hpp"

#include <regex>
#include <unordered_set>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

std::string_view to_string(SourceId source) {
  switch (source) {
    case SourceId::kEuropePmc:
      return "europe_pmc";
    case SourceId::kOpenAlex:
      return "openalex";
    case SourceId::kSemanticScholar:
      return "semantic_scholar";
  }
  return "unknown";
}

std::string_view display_name(SourceId source) {
  switch (source) {
    case SourceId::kEuropePmc:
      return "Europe PMC";
    case SourceId::kOpenAlex:
      return "OpenAlex";
    case SourceId::kSemanticScholar:
      return "Semantic Scholar";
  }
  return "Unknown";
}

std::optional<SourceId> parse_source(std::string_view name) {
  for (SourceId s : kAllSources) {
    if (to_string(s) == name) return s;
  }
  return std::nullopt;
}

int precedence(SourceId source) { return static_cast<int>(source); }

std::optional<std::string> normalize_doi(std::string_view raw) {
  std::string doi = text::trim(raw);
  for (char& c : doi) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  static constexpr std::string_view kPrefixes[] = {
      "https://doi.org/", "http://doi.org/", "https://dx.doi.org/",
      "http://dx.doi.org/", "doi:"};
  for (std::string_view prefix : kPrefixes) {
    if (doi.starts_with(prefix)) {
      doi.erase(0, prefix.size());
      break;
    }
  }
  static const std::regex kDoiPattern(R"(^10\.[^/\s]+/\S+$)");
  if (!std::regex_match(doi, kDoiPattern)) return std::nullopt;
  return doi;
}

void validate(const PaperRecord& paper) {
  if (text::trim(paper.title).empty()) {
    throw InvalidArgument("paper '" + paper.id + "' has an empty title");
  }
  if (paper.doi && normalize_doi(*paper.doi) != paper.doi) {
    throw InvalidArgument("paper '" + paper.id + "' has a malformed doi '" +
                          *paper.doi + "'");
  }
  if (paper.year && (*paper.year < kMinYear || *paper.year > kMaxYear)) {
    throw InvalidArgument("paper '" + paper.id + "' has year " +
                          std::to_string(*paper.year) + " out of range");
  }
}

std::string canonical_key(const PaperRecord& paper) {
  if (paper.doi) return *paper.doi;
  return text::normalize_phrase(paper.title);
}

Corpus dedup_corpus(const std::vector<PaperRecord>& papers, std::string query) {
  Corpus corpus;
  corpus.query = std::move(query);
  std::unordered_set<std::string> seen;
  for (const PaperRecord& p : papers) {
    std::string key = canonical_key(p);
    if (seen.insert(key).second) {
      corpus.papers.push_back(p);
    } else {
      corpus.duplicates[key].push_back(p.source);
    }
  }
  return corpus;
}

void to_json(nlohmann::json& j, SourceId source) {
  j = std::string(to_string(source));
}

void from_json(const nlohmann::json& j, SourceId& source) {
  auto parsed = parse_source(j.get<std::string>());
  if (!parsed) {
    throw InvalidArgument("unknown source '" + j.get<std::string>() + "'");
  }
  source = *parsed;
}

void to_json(nlohmann::json& j, const PaperRecord& paper) {
  j = nlohmann::json::object();
  j["id"] = paper.id;
  j["source"] = paper.source;
  j["title"] = paper.title;
  if (paper.abstract) j["abstract"] = *paper.abstract;
  j["authors"] = paper.authors;
  if (paper.year) j["year"] = *paper.year;
  if (paper.doi) j["doi"] = *paper.doi;
  if (paper.url) j["url"] = *paper.url;
}

void from_json(const nlohmann::json& j, PaperRecord& paper) {
  paper = PaperRecord{};
  j.at("id").get_to(paper.id);
  j.at("source").get_to(paper.source);
  j.at("title").get_to(paper.title);
  if (j.contains("abstract")) paper.abstract = j["abstract"].get<std::string>();
  if (j.contains("authors")) j["authors"].get_to(paper.authors);
  if (j.contains("year")) paper.year = j["year"].get<int>();
  if (j.contains("doi")) paper.doi = j["doi"].get<std::string>();
  if (j.contains("url")) paper.url = j["url"].get<std::string>();
}

}  // namespace kgd
