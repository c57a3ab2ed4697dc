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

#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include "kgd/paper.hpp"
#include "kgd/session_log.hpp"
#include "kgd/themes.hpp"

namespace kgd {

// The facet values a user has ticked. Elements are stored normalized
// (casefolded, single spaces).
class ThemeSelection {
 public:
  ThemeSelection() = default;
  explicit ThemeSelection(const std::vector<std::string>& themes);
  explicit ThemeSelection(const std::set<std::string>& themes);
  ThemeSelection(std::initializer_list<std::string> themes)
      : ThemeSelection(std::vector<std::string>(themes)) {}

  const std::set<std::string>& selected() const { return selected_; }
  bool empty() const { return selected_.empty(); }
  bool contains(const std::string& normalized) const {
    return selected_.contains(normalized);
  }

  friend bool operator==(const ThemeSelection&,
                         const ThemeSelection&) = default;

 private:
  std::set<std::string> selected_;
};

struct FilterOutcome {
  std::vector<PaperRecord> retained;
  size_t retrieved_count = 0;
  size_t filtered_count = 0;
};

// True when some theme's text is an exact member of the selection.
bool matches(const std::vector<Theme>& paper_themes,
             const ThemeSelection& selection);

// Context written into the filter log rows. When `sink` is null nothing is
// logged.
struct FilterLogContext {
  LogSink* sink = nullptr;
  std::string session_id;
  std::string query;
};

// An empty selection keeps every paper. Otherwise keeps the papers that
// `matches` the selection, in corpus order. Logs one aggregate row over the
// deduplicated corpus plus one row per source counting that source's own
// copies, duplicates included.
FilterOutcome filter_corpus(const Corpus& corpus, const PaperThemes& themes,
                            const ThemeSelection& selection,
                            const FilterLogContext& log = {});

}  // namespace kgd
