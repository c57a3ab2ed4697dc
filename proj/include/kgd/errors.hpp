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

#include <stdexcept>
#include <string>

namespace kgd {

// Base of every error the library raises. `code()` is the stable
// machine-readable name used in API error bodies.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& message)
      : Error("invalid_argument", message) {}
};

class EmptyTextError : public Error {
 public:
  explicit EmptyTextError(const std::string& message)
      : Error("empty_text", message) {}
};

class DimensionMismatchError : public Error {
 public:
  explicit DimensionMismatchError(const std::string& message)
      : Error("dimension_mismatch", message) {}
};

class ProviderUnavailableError : public Error {
 public:
  explicit ProviderUnavailableError(const std::string& message)
      : Error("provider_unavailable", message) {}
};

// Malformed source response. `path()` names the offending JSON location,
// e.g. "resultList.result[3].title".
class ParseError : public Error {
 public:
  ParseError(std::string path, const std::string& message)
      : Error("parse_error", path.empty() ? message : path + ": " + message),
        path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class EmptyInputError : public Error {
 public:
  explicit EmptyInputError(const std::string& message)
      : Error("empty_input", message) {}
};

class ZeroRetrievedError : public Error {
 public:
  explicit ZeroRetrievedError(const std::string& message)
      : Error("zero_retrieved", message) {}
};

class ZeroTotalError : public Error {
 public:
  explicit ZeroTotalError(const std::string& message)
      : Error("zero_total", message) {}
};

class EmptyQueryError : public Error {
 public:
  explicit EmptyQueryError(const std::string& message)
      : Error("empty_query", message) {}
};

class AllSourcesFailedError : public Error {
 public:
  explicit AllSourcesFailedError(const std::string& message)
      : Error("all_sources_failed", message) {}
};

class UnknownThemeError : public Error {
 public:
  explicit UnknownThemeError(const std::string& message)
      : Error("unknown_theme", message) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& message) : Error("io_error", message) {}
};

}  // namespace kgd
