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

#include <ostream>

namespace kgd {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRetrievalFailed = 2;
inline constexpr int kExitIo = 3;

// Entry point of the `kgd` command line:
//   search QUERY   retrieve, extract themes, write {papers, themes, timings}
//   filter         apply a theme selection to a search result
//   graph          export the discovery graph as JSON or DOT
//   report         render the evaluation tables from a session log
//   capture QUERY  record live responses into a fixture directory
//   serve          run the HTTP service
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace kgd
