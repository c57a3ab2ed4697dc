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

#include "kgd/graph.hpp"

#include <algorithm>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

namespace {

constexpr std::string_view kQueryPrefix = "q:";
constexpr std::string_view kPaperPrefix = "p:";
constexpr std::string_view kThemePrefix = "t:";

std::string_view prefix_for(NodeKind kind) {
  switch (kind) {
    case NodeKind::kQuery:
      return kQueryPrefix;
    case NodeKind::kPaper:
      return kPaperPrefix;
    case NodeKind::kTheme:
      return kThemePrefix;
  }
  return {};
}

NodeKind parse_node_kind(std::string_view s) {
  if (s == "query") return NodeKind::kQuery;
  if (s == "paper") return NodeKind::kPaper;
  if (s == "theme") return NodeKind::kTheme;
  throw InvalidArgument("unknown node kind '" + std::string(s) + "'");
}

EdgeKind parse_edge_kind(std::string_view s) {
  if (s == "retrieved") return EdgeKind::kRetrieved;
  if (s == "has_theme") return EdgeKind::kHasTheme;
  throw InvalidArgument("unknown edge kind '" + std::string(s) + "'");
}

std::string dot_quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        break;
      default:
        out.push_back(c);
    }
  }
  // DOT lexes backslash-quote as an escaped quote, so a label ending in a
  // backslash needs a separator before the closing quote.
  if (!s.empty() && s.back() == '\\') out.push_back(' ');
  out.push_back('"');
  return out;
}

std::string_view dot_shape(NodeKind kind) {
  switch (kind) {
    case NodeKind::kQuery:
      return "box";
    case NodeKind::kPaper:
      return "ellipse";
    case NodeKind::kTheme:
      return "diamond";
  }
  return "ellipse";
}

}  // namespace

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::kQuery:
      return "query";
    case NodeKind::kPaper:
      return "paper";
    case NodeKind::kTheme:
      return "theme";
  }
  return "unknown";
}

std::string_view to_string(EdgeKind kind) {
  return kind == EdgeKind::kRetrieved ? "retrieved" : "has_theme";
}

DiscoveryGraph build_graph(std::string_view query,
                           const std::vector<PaperRecord>& papers,
                           const PaperThemes& themes) {
  const std::string q = text::trim(query);
  if (q.empty()) throw EmptyQueryError("graph query is empty");

  DiscoveryGraph g;
  const std::string query_id = std::string(kQueryPrefix) + q;
  g.nodes.push_back({query_id, NodeKind::kQuery, q});

  std::set<std::string> seen_papers;
  std::set<std::string> theme_texts;
  std::vector<std::pair<std::string, const std::vector<Theme>*>> paper_themes;
  for (const PaperRecord& paper : papers) {
    const std::string key = canonical_key(paper);
    auto it = themes.find(key);
    if (it == themes.end()) {
      throw InvalidArgument("no themes recorded for paper '" + paper.id + "'");
    }
    const std::string paper_id = std::string(kPaperPrefix) + key;
    if (!seen_papers.insert(paper_id).second) continue;
    g.nodes.push_back({paper_id, NodeKind::kPaper, paper.title});
    paper_themes.emplace_back(paper_id, &it->second);
    for (const Theme& t : it->second) theme_texts.insert(t.text);
  }
  for (const std::string& t : theme_texts) {
    g.nodes.push_back({std::string(kThemePrefix) + t, NodeKind::kTheme, t});
  }

  for (const auto& [paper_id, _] : paper_themes) {
    g.edges.push_back({query_id, paper_id, EdgeKind::kRetrieved, std::nullopt});
  }
  for (const auto& [paper_id, list] : paper_themes) {
    // A repeated theme on one paper collapses to one edge with the mean
    // score; candidate dedup upstream means this does not happen in practice.
    std::map<std::string, std::pair<double, int>> scores;
    for (const Theme& t : *list) {
      auto& [sum, count] = scores[t.text];
      sum += t.score;
      ++count;
    }
    for (const auto& [text, acc] : scores) {
      g.edges.push_back({paper_id, std::string(kThemePrefix) + text,
                         EdgeKind::kHasTheme, acc.first / acc.second});
    }
  }
  return g;
}

DiscoveryGraph merge_graphs(const std::vector<DiscoveryGraph>& graphs) {
  DiscoveryGraph out;
  std::unordered_set<std::string> node_ids;
  std::set<std::tuple<std::string, std::string, EdgeKind>> edge_keys;
  std::vector<GraphNode> themes;
  for (const DiscoveryGraph& g : graphs) {
    for (const GraphNode& n : g.nodes) {
      if (!node_ids.insert(n.id).second) continue;
      if (n.kind == NodeKind::kTheme) {
        themes.push_back(n);
      } else {
        out.nodes.push_back(n);
      }
    }
    for (const GraphEdge& e : g.edges) {
      if (edge_keys.insert({e.from, e.to, e.kind}).second) {
        out.edges.push_back(e);
      }
    }
  }
  std::sort(themes.begin(), themes.end(),
            [](const GraphNode& a, const GraphNode& b) { return a.id < b.id; });
  out.nodes.insert(out.nodes.end(), themes.begin(), themes.end());
  std::stable_partition(out.edges.begin(), out.edges.end(),
                        [](const GraphEdge& e) {
                          return e.kind == EdgeKind::kRetrieved;
                        });
  return out;
}

void validate(const DiscoveryGraph& graph) {
  std::unordered_map<std::string, NodeKind> kinds;
  for (const GraphNode& n : graph.nodes) {
    if (!n.id.starts_with(prefix_for(n.kind))) {
      throw InvalidArgument("node '" + n.id + "' has the wrong prefix for kind " +
                            std::string(to_string(n.kind)));
    }
    if (!kinds.emplace(n.id, n.kind).second) {
      throw InvalidArgument("duplicate node id '" + n.id + "'");
    }
  }
  std::unordered_set<std::string> themes_with_edges;
  for (const GraphEdge& e : graph.edges) {
    auto from = kinds.find(e.from);
    auto to = kinds.find(e.to);
    if (from == kinds.end() || to == kinds.end()) {
      throw InvalidArgument("edge " + e.from + " -> " + e.to +
                            " has a missing endpoint");
    }
    const bool ok = e.kind == EdgeKind::kRetrieved
                        ? from->second == NodeKind::kQuery &&
                              to->second == NodeKind::kPaper
                        : from->second == NodeKind::kPaper &&
                              to->second == NodeKind::kTheme;
    if (!ok) {
      throw InvalidArgument("edge " + e.from + " -> " + e.to +
                            " breaks the layering for kind " +
                            std::string(to_string(e.kind)));
    }
    if (e.kind == EdgeKind::kHasTheme) themes_with_edges.insert(e.to);
  }
  for (const GraphNode& n : graph.nodes) {
    if (n.kind == NodeKind::kTheme && !themes_with_edges.contains(n.id)) {
      throw InvalidArgument("theme node '" + n.id + "' has no incident edge");
    }
  }
}

std::string export_graph_json(const DiscoveryGraph& graph) {
  nlohmann::ordered_json nodes = nlohmann::ordered_json::array();
  for (const GraphNode& n : graph.nodes) {
    nodes.push_back(
        {{"id", n.id}, {"kind", to_string(n.kind)}, {"label", n.label}});
  }
  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (const GraphEdge& e : graph.edges) {
    nlohmann::ordered_json je = {
        {"from", e.from}, {"to", e.to}, {"kind", to_string(e.kind)}};
    if (e.score) je["score"] = *e.score;
    edges.push_back(std::move(je));
  }
  nlohmann::ordered_json out;
  out["nodes"] = std::move(nodes);
  out["edges"] = std::move(edges);
  return out.dump();
}

DiscoveryGraph import_graph_json(std::string_view json) {
  DiscoveryGraph g;
  try {
    auto j = nlohmann::json::parse(json);
    for (const auto& n : j.at("nodes")) {
      g.nodes.push_back({n.at("id").get<std::string>(),
                         parse_node_kind(n.at("kind").get<std::string>()),
                         n.at("label").get<std::string>()});
    }
    for (const auto& e : j.at("edges")) {
      GraphEdge edge{e.at("from").get<std::string>(),
                     e.at("to").get<std::string>(),
                     parse_edge_kind(e.at("kind").get<std::string>()),
                     std::nullopt};
      if (e.contains("score")) edge.score = e["score"].get<double>();
      g.edges.push_back(std::move(edge));
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("malformed graph json: ") + e.what());
  }
  return g;
}

std::string export_graph_dot(const DiscoveryGraph& graph) {
  std::ostringstream out;
  out << "digraph discovery {\n";
  out << "  rankdir=LR;\n";
  for (const GraphNode& n : graph.nodes) {
    out << "  " << dot_quote(n.id) << " [label=" << dot_quote(n.label)
        << ", shape=" << dot_shape(n.kind) << "];\n";
  }
  for (const GraphEdge& e : graph.edges) {
    out << "  " << dot_quote(e.from) << " -> " << dot_quote(e.to)
        << " [label=" << dot_quote(to_string(e.kind)) << "];\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace kgd
