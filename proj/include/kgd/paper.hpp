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

#include <array>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace kgd {

enum class SourceId { kEuropePmc, kOpenAlex, kSemanticScholar };

// Fixed source precedence used for ordering and first-wins deduplication.
inline constexpr std::array<SourceId, 3> kAllSources = {
    SourceId::kEuropePmc, SourceId::kOpenAlex, SourceId::kSemanticScholar};

// "europe_pmc", "openalex", "semantic_scholar".
std::string_view to_string(SourceId source);
// Human-readable name used in report tables ("Europe PMC", ...).
std::string_view display_name(SourceId source);
std::optional<SourceId> parse_source(std::string_view name);
int precedence(SourceId source);

// One bibliographic record normalized from any of the three sources.
struct PaperRecord {
  std::string id;
  SourceId source = SourceId::kEuropePmc;
  std::string title;
  std::optional<std::string> abstract;
  std::vector<std::string> authors;
  std::optional<int> year;
  std::optional<std::string> doi;
  std::optional<std::string> url;

  friend bool operator==(const PaperRecord&, const PaperRecord&) = default;
};

inline constexpr int kMinYear = 1500;
inline constexpr int kMaxYear = 2100;

// Lowercases and strips resolver prefixes ("https://doi.org/", "doi:").
// Returns nullopt when the result is not of the form `10.<prefix>/<suffix>`.
std::optional<std::string> normalize_doi(std::string_view raw);

// Throws InvalidArgument when `paper` breaks a record invariant.
void validate(const PaperRecord& paper);

// Deduplication key: the DOI when present, otherwise the normalized title.
std::string canonical_key(const PaperRecord& paper);

struct Corpus {
  std::string query;
  std::vector<PaperRecord> papers;
  // Sources whose copies of a surviving paper were dropped, keyed by
  // canonical_key. Lets per-source metrics count pre-dedup volumes.
  std::map<std::string, std::vector<SourceId>> duplicates;

  friend bool operator==(const Corpus&, const Corpus&) = default;
};

// First occurrence of each canonical key wins; survivors keep input order.
Corpus dedup_corpus(const std::vector<PaperRecord>& papers,
                    std::string query = {});

void to_json(nlohmann::json& j, SourceId source);
void from_json(const nlohmann::json& j, SourceId& source);
void to_json(nlohmann::json& j, const PaperRecord& paper);
void from_json(const nlohmann::json& j, PaperRecord& paper);

}  // namespace kgd
