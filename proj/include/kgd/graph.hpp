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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kgd/paper.hpp"
#include "kgd/themes.hpp"

namespace kgd {

enum class NodeKind { kQuery, kPaper, kTheme };
enum class EdgeKind { kRetrieved, kHasTheme };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);

struct GraphNode {
  std::string id;  // "q:{query}", "p:{canonical_key}" or "t:{theme}"
  NodeKind kind = NodeKind::kQuery;
  std::string label;

  friend bool operator==(const GraphNode&, const GraphNode&) = default;
};

struct GraphEdge {
  std::string from;
  std::string to;
  EdgeKind kind = EdgeKind::kRetrieved;
  // Theme score, has_theme edges only.
  std::optional<double> score;

  friend bool operator==(const GraphEdge&, const GraphEdge&) = default;
};

// Directed three-layer graph: query -> paper -> theme. Theme nodes are
// shared by every paper that carries the theme.
struct DiscoveryGraph {
  std::vector<GraphNode> nodes;
  std::vector<GraphEdge> edges;

  friend bool operator==(const DiscoveryGraph&,
                         const DiscoveryGraph&) = default;
};

// Nodes: the query, papers in input order, then distinct themes ascending.
// Edges: retrieved edges in paper order, then has_theme edges per paper in
// paper order with themes ascending. Throws EmptyQueryError, and
// InvalidArgument when a paper has no entry in `themes`.
DiscoveryGraph build_graph(std::string_view query,
                           const std::vector<PaperRecord>& papers,
                           const PaperThemes& themes);

// Union of per-query graphs. Query nodes stay distinct, paper and theme
// nodes merge by id, edges are deduplicated by (from, to, kind).
DiscoveryGraph merge_graphs(const std::vector<DiscoveryGraph>& graphs);

// Throws InvalidArgument naming the first broken invariant: id prefix vs
// kind, duplicate ids, dangling endpoints, edge direction, orphan themes.
void validate(const DiscoveryGraph& graph);

// {"nodes":[{"id","kind","label"}...],"edges":[{"from","to","kind"[,"score"]}...]}
std::string export_graph_json(const DiscoveryGraph& graph);
// Inverse of export_graph_json. Throws InvalidArgument.
DiscoveryGraph import_graph_json(std::string_view json);

// Graphviz digraph; query=box, paper=ellipse, theme=diamond.
std::string export_graph_dot(const DiscoveryGraph& graph);

}  // namespace kgd
