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

#include "kgd/session_log.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include "kgd/errors.hpp"

namespace kgd {

Timestamp now_utc() {
  return std::chrono::time_point_cast<std::chrono::milliseconds>(
      std::chrono::system_clock::now());
}

std::string format_timestamp(Timestamp t) {
  auto ms = t.time_since_epoch().count();
  std::time_t secs = static_cast<std::time_t>(ms / 1000);
  int millis = static_cast<int>(ms % 1000);
  if (millis < 0) {
    millis += 1000;
    --secs;
  }
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ",
                tm.tm_year + 1900, tm.tm_mon + 1, tm.tm_mday, tm.tm_hour,
                tm.tm_min, tm.tm_sec, millis);
  return buf;
}

Timestamp parse_timestamp(std::string_view s) {
  std::tm tm{};
  int millis = 0;
  char z = 0;
  std::string copy(s);
  int fields = std::sscanf(copy.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d.%3d%c",
                           &tm.tm_year, &tm.tm_mon, &tm.tm_mday, &tm.tm_hour,
                           &tm.tm_min, &tm.tm_sec, &millis, &z);
  if (fields != 8 || z != 'Z' || copy.size() != 24) {
    throw InvalidArgument("malformed timestamp '" + copy + "'");
  }
  tm.tm_year -= 1900;
  tm.tm_mon -= 1;
  std::time_t secs = timegm(&tm);
  return Timestamp(std::chrono::milliseconds(
      static_cast<int64_t>(secs) * 1000 + millis));
}

void to_json(nlohmann::json& j, const RetrievalLogEntry& e) {
  j = nlohmann::json{{"timestamp", format_timestamp(e.timestamp)},
                     {"session_id", e.session_id},
                     {"query", e.query},
                     {"source", e.source},
                     {"elapsed", e.elapsed},
                     {"paper_count", e.paper_count},
                     {"outcome", e.outcome}};
}

void from_json(const nlohmann::json& j, RetrievalLogEntry& e) {
  e.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  j.at("session_id").get_to(e.session_id);
  j.at("query").get_to(e.query);
  j.at("source").get_to(e.source);
  j.at("elapsed").get_to(e.elapsed);
  j.at("paper_count").get_to(e.paper_count);
  j.at("outcome").get_to(e.outcome);
  if (e.elapsed < 0) throw InvalidArgument("negative elapsed time");
}

void to_json(nlohmann::json& j, const FilterLogEntry& e) {
  j = nlohmann::json{{"timestamp", format_timestamp(e.timestamp)},
                     {"session_id", e.session_id},
                     {"query", e.query}};
  if (e.source) j["source"] = *e.source;
  j["selected_themes"] = e.selected_themes;
  j["retrieved"] = e.retrieved;
  j["filtered"] = e.filtered;
}

void from_json(const nlohmann::json& j, FilterLogEntry& e) {
  e.timestamp = parse_timestamp(j.at("timestamp").get<std::string>());
  j.at("session_id").get_to(e.session_id);
  j.at("query").get_to(e.query);
  e.source.reset();
  if (j.contains("source")) e.source = j["source"].get<SourceId>();
  j.at("selected_themes").get_to(e.selected_themes);
  j.at("retrieved").get_to(e.retrieved);
  j.at("filtered").get_to(e.filtered);
  if (e.filtered > e.retrieved) {
    throw InvalidArgument("filtered count exceeds retrieved count");
  }
}

std::string serialize_entry(const LogEntry& entry) {
  nlohmann::json j;
  std::visit([&](const auto& e) { j = e; }, entry);
  return j.dump();
}

LogEntry parse_entry(std::string_view line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
    if (!j.is_object()) throw InvalidArgument("log line is not an object");
    if (j.contains("elapsed")) return j.get<RetrievalLogEntry>();
    if (j.contains("selected_themes")) return j.get<FilterLogEntry>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed log line: ") + e.what());
  }
  throw InvalidArgument("log line is neither a retrieval nor a filter entry");
}

LogSnapshot parse_log(std::string_view contents) {
  LogSnapshot snap;
  size_t start = 0;
  while (start < contents.size()) {
    size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string_view line = contents.substr(start, end - start);
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      snap.entries.push_back(parse_entry(line));
    } catch (const Error&) {
      ++snap.malformed_lines;
    }
  }
  return snap;
}

LogSnapshot read_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!std::filesystem::exists(path)) return {};
    throw IoError("cannot read log " + path.string());
  }
  std::ostringstream contents;
  contents << in.rdbuf();
  return parse_log(contents.str());
}

std::filesystem::path SessionLog::default_path() {
  if (const char* p = std::getenv("KGD_LOG_PATH"); p && *p) return p;
  return "sessions.jsonl";
}

SessionLog::SessionLog(std::filesystem::path path) : path_(std::move(path)) {
  fd_ = ::open(path_.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) {
    throw IoError("cannot open log " + path_.string() + ": " +
                  std::strerror(errno));
  }
}

SessionLog::~SessionLog() {
  if (fd_ >= 0) ::close(fd_);
}

void SessionLog::append(const LogEntry& entry) {
  std::string line = serialize_entry(entry);
  line.push_back('\n');
  std::lock_guard lock(mu_);
  size_t written = 0;
  while (written < line.size()) {
    ssize_t n = ::write(fd_, line.data() + written, line.size() - written);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw IoError("cannot append to " + path_.string() + ": " +
                    std::strerror(errno));
    }
    written += static_cast<size_t>(n);
  }
}

LogSnapshot SessionLog::read() const { return read_log(path_); }

void MemoryLog::append(const LogEntry& entry) {
  std::lock_guard lock(mu_);
  entries_.push_back(entry);
}

std::vector<LogEntry> MemoryLog::entries() const {
  std::lock_guard lock(mu_);
  return entries_;
}

}  // namespace kgd
