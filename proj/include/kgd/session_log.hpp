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
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "kgd/paper.hpp"

namespace kgd {

using Timestamp = std::chrono::time_point<std::chrono::system_clock,
                                          std::chrono::milliseconds>;

Timestamp now_utc();
// "2026-10-16T08:30:00.125Z"
std::string format_timestamp(Timestamp t);
// Throws InvalidArgument on anything but the format above.
Timestamp parse_timestamp(std::string_view s);

// One per-source retrieval; `elapsed` is the t_i averaged by compute_art.
struct RetrievalLogEntry {
  Timestamp timestamp;
  std::string session_id;
  std::string query;
  SourceId source = SourceId::kEuropePmc;
  double elapsed = 0.0;  // seconds
  size_t paper_count = 0;
  std::string outcome;  // ok | timeout | http_error | parse_error

  friend bool operator==(const RetrievalLogEntry&,
                         const RetrievalLogEntry&) = default;
};

// One filtering step. Rows with a source are per-source counts; rows without
// one aggregate the whole corpus.
struct FilterLogEntry {
  Timestamp timestamp;
  std::string session_id;
  std::string query;
  std::optional<SourceId> source;
  std::set<std::string> selected_themes;
  size_t retrieved = 0;
  size_t filtered = 0;

  friend bool operator==(const FilterLogEntry&,
                         const FilterLogEntry&) = default;
};

using LogEntry = std::variant<RetrievalLogEntry, FilterLogEntry>;

void to_json(nlohmann::json& j, const RetrievalLogEntry& e);
void from_json(const nlohmann::json& j, RetrievalLogEntry& e);
void to_json(nlohmann::json& j, const FilterLogEntry& e);
void from_json(const nlohmann::json& j, FilterLogEntry& e);

// Single JSON line, no trailing newline.
std::string serialize_entry(const LogEntry& entry);
// Entries carry no type tag: retrieval rows have "elapsed", filter rows
// have "selected_themes". Throws InvalidArgument on anything else.
LogEntry parse_entry(std::string_view line);

// Destination for log events produced by the gateway and the filter.
class LogSink {
 public:
  virtual ~LogSink() = default;
  virtual void append(const LogEntry& entry) = 0;
};

struct LogSnapshot {
  std::vector<LogEntry> entries;
  // Lines that did not parse; they are skipped, never repaired.
  size_t malformed_lines = 0;
};

// Append-only JSON Lines file. Every entry is written with one write(2) on
// an O_APPEND descriptor under a mutex, so lines never interleave.
class SessionLog final : public LogSink {
 public:
  // Default location: $KGD_LOG_PATH, else ./sessions.jsonl.
  static std::filesystem::path default_path();

  // Opens (creating if needed) the file. Throws IoError.
  explicit SessionLog(std::filesystem::path path);
  ~SessionLog() override;
  SessionLog(const SessionLog&) = delete;
  SessionLog& operator=(const SessionLog&) = delete;

  // Throws IoError.
  void append(const LogEntry& entry) override;

  const std::filesystem::path& path() const { return path_; }
  LogSnapshot read() const;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
  std::mutex mu_;
};

// Reads a log file. A missing file is an empty log.
LogSnapshot read_log(const std::filesystem::path& path);
LogSnapshot parse_log(std::string_view contents);

// In-memory sink, handy for tests and dry runs.
class MemoryLog final : public LogSink {
 public:
  void append(const LogEntry& entry) override;
  std::vector<LogEntry> entries() const;

 private:
  mutable std::mutex mu_;
  std::vector<LogEntry> entries_;
};

}  // namespace kgd
