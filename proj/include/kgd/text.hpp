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

#include <string>
#include <string_view>
#include <vector>

namespace kgd::text {

// Strips leading and trailing ASCII whitespace.
std::string trim(std::string_view s);

// Full Unicode case folding of UTF-8 input. Invalid sequences become U+FFFD.
std::string casefold(std::string_view utf8);

// Casefolds `utf8` and returns every maximal run of alphanumeric code points
// (Unicode letters and digits) in order.
std::vector<std::string> alnum_runs(std::string_view utf8);

// Casefolded text with everything except letters, digits and whitespace
// removed, whitespace runs collapsed to one space, and the ends trimmed.
std::string normalize_phrase(std::string_view utf8);

// Casefolds, collapses whitespace runs to single spaces and trims.
std::string normalize_selection(std::string_view s);

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// Percent-encodes everything outside the RFC 3986 unreserved set.
std::string url_encode(std::string_view s);

}  // namespace kgd::text
