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

#include "kgd/filter.hpp"

#include <map>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

ThemeSelection::ThemeSelection(const std::vector<std::string>& themes) {
  for (const std::string& t : themes) {
    std::string n = text::normalize_selection(t);
    if (!n.empty()) selected_.insert(std::move(n));
  }
}

ThemeSelection::ThemeSelection(const std::set<std::string>& themes)
    : ThemeSelection(std::vector<std::string>(themes.begin(), themes.end())) {}

bool matches(const std::vector<Theme>& paper_themes,
             const ThemeSelection& selection) {
  for (const Theme& t : paper_themes) {
    if (selection.contains(t.text)) return true;
  }
  return false;
}

FilterOutcome filter_corpus(const Corpus& corpus, const PaperThemes& themes,
                            const ThemeSelection& selection,
                            const FilterLogContext& log) {
  FilterOutcome out;
  out.retrieved_count = corpus.papers.size();
  std::map<SourceId, std::pair<size_t, size_t>> per_source;

  for (const PaperRecord& paper : corpus.papers) {
    auto it = themes.find(canonical_key(paper));
    if (it == themes.end()) {
      throw InvalidArgument("no themes recorded for paper '" + paper.id + "'");
    }
    const bool keep = selection.empty() || matches(it->second, selection);
    if (keep) out.retained.push_back(paper);

    std::vector<SourceId> copies = {paper.source};
    if (auto dup = corpus.duplicates.find(it->first);
        dup != corpus.duplicates.end()) {
      copies.insert(copies.end(), dup->second.begin(), dup->second.end());
    }
    for (SourceId source : copies) {
      auto& [retrieved, kept] = per_source[source];
      ++retrieved;
      if (keep) ++kept;
    }
  }
  out.filtered_count = out.retained.size();

  if (log.sink != nullptr) {
    FilterLogEntry entry;
    entry.timestamp = now_utc();
    entry.session_id = log.session_id;
    entry.query = log.query.empty() ? corpus.query : log.query;
    entry.selected_themes = selection.selected();
    entry.retrieved = out.retrieved_count;
    entry.filtered = out.filtered_count;
    log.sink->append(entry);
    for (const auto& [source, counts] : per_source) {
      entry.source = source;
      entry.retrieved = counts.first;
      entry.filtered = counts.second;
      log.sink->append(entry);
    }
  }
  return out;
}

}  // namespace kgd
