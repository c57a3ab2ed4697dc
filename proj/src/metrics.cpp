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

#include "kgd/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "kgd/errors.hpp"

namespace kgd {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t pow10(int decimals) {
  int64_t p = 1;
  for (int i = 0; i < decimals; ++i) p *= 10;
  return p;
}

// `digits` is an unsigned integer scaled by 10^decimals.
std::string place_point(std::string digits, bool negative, int decimals) {
  if (decimals > 0) {
    if (digits.size() <= static_cast<size_t>(decimals)) {
      digits.insert(0, static_cast<size_t>(decimals) + 1 - digits.size(), '0');
    }
    digits.insert(digits.size() - static_cast<size_t>(decimals), ".");
    while (digits.back() == '0') digits.pop_back();
    if (digits.back() == '.') digits.pop_back();
  }
  if (negative && digits != "0") digits.insert(0, "-");
  return digits;
}

void check_counts(uint64_t retrieved, uint64_t filtered) {
  if (retrieved == 0) {
    throw ZeroRetrievedError("relevance is undefined with zero retrieved papers");
  }
  if (filtered > retrieved) {
    throw InvalidArgument("filtered count " + std::to_string(filtered) +
                          " exceeds retrieved count " +
                          std::to_string(retrieved));
  }
}

}  // namespace

double to_double(const Percentage& p) {
  return static_cast<double>(p.numerator()) /
         static_cast<double>(p.denominator());
}

double compute_art(std::span<const RetrievalLogEntry> entries) {
  if (entries.empty()) {
    throw EmptyInputError("average retrieval time needs at least one entry");
  }
  // Neumaier summation.
  double sum = 0.0;
  double compensation = 0.0;
  double lo = entries.front().elapsed;
  double hi = entries.front().elapsed;
  for (const RetrievalLogEntry& e : entries) {
    if (e.source != entries.front().source) {
      throw InvalidArgument("average retrieval time mixes sources");
    }
    double t = sum + e.elapsed;
    if (std::abs(sum) >= std::abs(e.elapsed)) {
      compensation += (sum - t) + e.elapsed;
    } else {
      compensation += (e.elapsed - t) + sum;
    }
    sum = t;
    lo = std::min(lo, e.elapsed);
    hi = std::max(hi, e.elapsed);
  }
  double mean = (sum + compensation) / static_cast<double>(entries.size());
  return std::clamp(mean, lo, hi);
}

Percentage compute_relevance(uint64_t retrieved, uint64_t filtered) {
  check_counts(retrieved, filtered);
  return Percentage(static_cast<int64_t>(filtered) * 100,
                    static_cast<int64_t>(retrieved));
}

Percentage compute_reduction(uint64_t retrieved, uint64_t filtered) {
  check_counts(retrieved, filtered);
  return Percentage(static_cast<int64_t>(retrieved - filtered) * 100,
                    static_cast<int64_t>(retrieved));
}

std::map<SourceId, Percentage> compute_contribution(
    const std::map<SourceId, uint64_t>& per_source_counts) {
  uint64_t total = 0;
  for (const auto& [_, count] : per_source_counts) total += count;
  if (total == 0) {
    throw ZeroTotalError("source contribution is undefined for zero papers");
  }
  std::map<SourceId, Percentage> out;
  for (const auto& [source, count] : per_source_counts) {
    out[source] = Percentage(static_cast<int64_t>(count) * 100,
                             static_cast<int64_t>(total));
  }
  return out;
}

std::string format_decimal(const Percentage& value, int decimals) {
  const int64_t scale = pow10(decimals);
  // floor(value * scale + 1/2), exactly.
  const int64_t n = value.numerator();
  const int64_t d = value.denominator();
  int64_t scaled = floor_div(2 * n * scale + d, 2 * d);
  bool negative = scaled < 0;
  return place_point(std::to_string(negative ? -scaled : scaled), negative,
                     decimals);
}

std::string format_decimal(double value, int decimals) {
  if (!std::isfinite(value)) return std::isnan(value) ? "nan" : "inf";
  // Round the shortest round-trip decimal form, so 1.0005 -> "1.001".
  char buf[512];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), std::abs(value),
                                 std::chars_format::fixed);
  if (ec != std::errc()) return std::to_string(value);
  std::string s(buf, end);
  size_t point = s.find('.');
  std::string int_part = point == std::string::npos ? s : s.substr(0, point);
  std::string frac = point == std::string::npos ? "" : s.substr(point + 1);
  bool round_up = frac.size() > static_cast<size_t>(decimals) &&
                  frac[static_cast<size_t>(decimals)] >= '5';
  frac.resize(static_cast<size_t>(decimals), '0');
  std::string digits = int_part + frac;
  if (round_up) {
    int i = static_cast<int>(digits.size()) - 1;
    while (i >= 0 && digits[static_cast<size_t>(i)] == '9') {
      digits[static_cast<size_t>(i)] = '0';
      --i;
    }
    if (i < 0) {
      digits.insert(0, "1");
    } else {
      ++digits[static_cast<size_t>(i)];
    }
  }
  size_t nonzero = digits.find_first_not_of('0');
  digits = nonzero == std::string::npos ? "0" : digits.substr(nonzero);
  return place_point(digits, value < 0, decimals);
}

double rounded_percentage(const Percentage& value) {
  return std::stod(format_decimal(value, 2));
}

std::vector<ReportTable> render_report(const std::vector<LogEntry>& log) {
  std::vector<const RetrievalLogEntry*> retrievals;
  std::vector<const FilterLogEntry*> filters;
  for (const LogEntry& e : log) {
    if (const auto* r = std::get_if<RetrievalLogEntry>(&e)) {
      retrievals.push_back(r);
    } else {
      filters.push_back(&std::get<FilterLogEntry>(e));
    }
  }

  // Retrieval performance and source contribution.
  ReportTable retrieval{std::string(kRetrievalTableTitle),
                        {"Source", "Avg Retrieval Time(sec)",
                         "Total Papers Retrieved", "Queries Handled"},
                        {}};
  ReportTable contribution{std::string(kContributionTableTitle),
                           {"Source", "Papers Contributed", "Contribution %"},
                           {}};
  std::map<SourceId, uint64_t> papers_by_source;
  for (SourceId source : kAllSources) {
    std::vector<RetrievalLogEntry> entries;
    uint64_t papers = 0;
    std::set<std::string> handled;
    for (const RetrievalLogEntry* r : retrievals) {
      if (r->source != source) continue;
      entries.push_back(*r);
      if (r->outcome == "ok") {
        papers += r->paper_count;
        if (r->paper_count > 0) handled.insert(r->query);
      }
    }
    if (entries.empty()) continue;
    papers_by_source[source] = papers;
    retrieval.rows.push_back({std::string(display_name(source)),
                              format_decimal(compute_art(entries), 3),
                              std::to_string(papers),
                              std::to_string(handled.size())});
  }
  uint64_t total_papers = 0;
  for (const auto& [_, n] : papers_by_source) total_papers += n;
  std::map<SourceId, Percentage> shares;
  if (total_papers > 0) shares = compute_contribution(papers_by_source);
  for (const auto& [source, n] : papers_by_source) {
    contribution.rows.push_back(
        {std::string(display_name(source)), std::to_string(n),
         format_decimal(total_papers > 0 ? shares[source] : Percentage(0), 2)});
  }

  // Filtering: the latest row per (query, source) and per query aggregate.
  std::vector<std::string> queries;
  std::map<std::string, std::map<SourceId, const FilterLogEntry*>> by_source;
  std::map<std::string, const FilterLogEntry*> aggregate;
  for (const FilterLogEntry* f : filters) {
    if (std::find(queries.begin(), queries.end(), f->query) == queries.end()) {
      queries.push_back(f->query);
    }
    if (f->source) {
      by_source[f->query][*f->source] = f;
    } else {
      aggregate[f->query] = f;
    }
  }

  ReportTable relevance{std::string(kRelevanceTableTitle),
                        {"Query", "Total Papers Retrieved",
                         "Papers After Filter", "Relevance %"},
                        {}};
  ReportTable reduction{std::string(kReductionTableTitle),
                        {"Query", "Source", "Papers Retrieved",
                         "Papers After Filter", "Reduction %"},
                        {}};
  for (const std::string& q : queries) {
    uint64_t retrieved = 0;
    uint64_t kept = 0;
    auto sources = by_source.find(q);
    if (sources != by_source.end()) {
      for (const auto& [source, f] : sources->second) {
        retrieved += f->retrieved;
        kept += f->filtered;
        reduction.rows.push_back(
            {q, std::string(display_name(source)), std::to_string(f->retrieved),
             std::to_string(f->filtered),
             f->retrieved > 0
                 ? format_decimal(compute_reduction(f->retrieved, f->filtered))
                 : "-"});
      }
    } else if (auto agg = aggregate.find(q); agg != aggregate.end()) {
      retrieved = agg->second->retrieved;
      kept = agg->second->filtered;
    }
    relevance.rows.push_back(
        {q, std::to_string(retrieved), std::to_string(kept),
         retrieved > 0 ? format_decimal(compute_relevance(retrieved, kept))
                       : "-"});
  }

  return {std::move(retrieval), std::move(relevance), std::move(contribution),
          std::move(reduction)};
}

namespace {

std::string md_cell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else if (c == '\n') out += ' ';
    else out.push_back(c);
  }
  return out;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

std::string render_markdown(const std::vector<ReportTable>& tables) {
  std::ostringstream out;
  for (size_t t = 0; t < tables.size(); ++t) {
    const ReportTable& table = tables[t];
    if (t > 0) out << "\n";
    out << "### " << table.title << "\n\n";
    out << "|";
    for (const auto& c : table.columns) out << " " << md_cell(c) << " |";
    out << "\n|";
    for (size_t i = 0; i < table.columns.size(); ++i) out << " --- |";
    out << "\n";
    for (const auto& row : table.rows) {
      out << "|";
      for (const auto& cell : row) out << " " << md_cell(cell) << " |";
      out << "\n";
    }
  }
  return out.str();
}

std::string render_csv(const std::vector<ReportTable>& tables) {
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (i > 0) out << ",";
      out << csv_cell(cells[i]);
    }
    out << "\n";
  };
  for (size_t t = 0; t < tables.size(); ++t) {
    if (t > 0) out << "\n";
    out << "# " << tables[t].title << "\n";
    line(tables[t].columns);
    for (const auto& row : tables[t].rows) line(row);
  }
  return out.str();
}

nlohmann::json report_to_json(const std::vector<ReportTable>& tables) {
  nlohmann::json out = nlohmann::json::array();
  for (const ReportTable& t : tables) {
    out.push_back(
        {{"title", t.title}, {"columns", t.columns}, {"rows", t.rows}});
  }
  return nlohmann::json{{"tables", std::move(out)}};
}

}  // namespace kgd
