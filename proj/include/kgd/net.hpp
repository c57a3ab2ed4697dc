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

namespace kgd::net {

// "https://api.example.org/v1/" -> {origin "https://api.example.org",
// path_prefix "/v1"}. The prefix never ends with '/'.
struct BaseUrl {
  std::string origin;
  std::string path_prefix;
};

// Throws InvalidArgument when the scheme is not http or https.
BaseUrl split_base_url(std::string_view url);

}  // namespace kgd::net
