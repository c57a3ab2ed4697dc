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

#include <boost/rational.hpp>
#include <cstdint>
#include <map>
#include <nlohmann/json.hpp>
#include <span>
#include <string>
#include <vector>

#include "kgd/paper.hpp"
#include "kgd/session_log.hpp"

namespace kgd {

// Exact percentage. Rounding happens only when a value is rendered.
using Percentage = boost::rational<int64_t>;

double to_double(const Percentage& p);

// Mean of the entries' elapsed seconds (compensated sum, clamped to
// [min, max]). Throws EmptyInputError on no entries and InvalidArgument when
// the entries mix sources.
double compute_art(std::span<const RetrievalLogEntry> entries);

// filtered / retrieved * 100. Throws ZeroRetrievedError, and InvalidArgument
// when filtered > retrieved.
Percentage compute_relevance(uint64_t retrieved, uint64_t filtered);

// (1 - filtered / retrieved) * 100. Same errors as compute_relevance.
Percentage compute_reduction(uint64_t retrieved, uint64_t filtered);

// Share of the total per source. Throws ZeroTotalError.
std::map<SourceId, Percentage> compute_contribution(
    const std::map<SourceId, uint64_t>& per_source_counts);

// Half-up rounding to `decimals` places with trailing zeros (and a bare
// decimal point) trimmed: 83.333.. -> "83.33", 65 -> "65", 1.1 -> "1.1".
std::string format_decimal(const Percentage& value, int decimals = 2);
std::string format_decimal(double value, int decimals);

// The number a client sees for a percentage: rounded half-up to 2 places.
double rounded_percentage(const Percentage& value);

struct ReportTable {
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  friend bool operator==(const ReportTable&, const ReportTable&) = default;
};

inline constexpr std::string_view kRetrievalTableTitle =
    "Retrieval Performance by Source";
inline constexpr std::string_view kRelevanceTableTitle =
    "Relevance Effectiveness by Query";
inline constexpr std::string_view kContributionTableTitle =
    "Source Contribution Distribution";
inline constexpr std::string_view kReductionTableTitle =
    "Information Overload Reduction by Query and Source";

// The four evaluation tables, in order: retrieval performance per source,
// relevance per query, source contribution, reduction per (query, source).
//
// Retrieval rows use every entry of a source for the mean time; papers and
// queries handled count successful retrievals (queries only when they
// returned papers). Filter rows: the latest row per (query, source) wins;
// per-query relevance sums those rows over sources, falling back to the
// latest aggregate row when a query has no per-source rows. Queries appear
// in order of first appearance in the log, sources in fixed precedence.
std::vector<ReportTable> render_report(const std::vector<LogEntry>& log);

std::string render_markdown(const std::vector<ReportTable>& tables);
std::string render_csv(const std::vector<ReportTable>& tables);
nlohmann::json report_to_json(const std::vector<ReportTable>& tables);

}  // namespace kgd
