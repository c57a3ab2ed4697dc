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

#include <charconv>
#include <map>
#include <nlohmann/json.hpp>

#include "kgd/errors.hpp"
#include "kgd/gateway.hpp"
#include "kgd/text.hpp"

namespace kgd {

namespace {

using nlohmann::json;

json parse_body(std::string_view body) {
  try {
    return json::parse(body);
  } catch (const json::parse_error& e) {
    throw ParseError("$", std::string("invalid json: ") + e.what());
  }
}

const json& require(const json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ParseError(path, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(path + "." + key, "missing");
  return *it;
}

const json& require_array(const json& obj, const char* key,
                          const std::string& path) {
  const json& v = require(obj, key, path);
  if (!v.is_array()) throw ParseError(path + "." + key, "expected an array");
  return v;
}

// Missing and null both mean absent; any other non-string is malformed.
std::optional<std::string> opt_string(const json& obj, const char* key,
                                      const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw ParseError(path + "." + key, "expected a string");
  return it->get<std::string>();
}

// Accepts 2024 or "2024"; out-of-range or unparsable years are dropped.
std::optional<int> opt_year(const json& obj, const char* key,
                            const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  int year = 0;
  if (it->is_number_integer()) {
    year = it->get<int>();
  } else if (it->is_string()) {
    const std::string s = it->get<std::string>();
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), year);
    if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  } else {
    throw ParseError(path + "." + key, "expected a year");
  }
  if (year < kMinYear || year > kMaxYear) return std::nullopt;
  return year;
}

std::optional<std::string> opt_doi(const std::optional<std::string>& raw) {
  if (!raw) return std::nullopt;
  return normalize_doi(*raw);
}

std::string item_path(const std::string& array_path, size_t i) {
  return array_path + "[" + std::to_string(i) + "]";
}

std::string require_id(const json& item, const char* key,
                       const std::string& path) {
  const json& v = require(item, key, path);
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<int64_t>());
  throw ParseError(path + "." + key, "expected an identifier");
}

// "Rao K, Menon S." -> {"Rao K", "Menon S"}; the final period ends the list.
std::vector<std::string> split_authors(std::string_view s) {
  std::vector<std::string> out;
  while (!s.empty() && (s.back() == '.' || s.back() == ' ')) s.remove_suffix(1);
  size_t start = 0;
  while (start <= s.size()) {
    size_t end = s.find(", ", start);
    if (end == std::string_view::npos) end = s.size();
    std::string name = text::trim(s.substr(start, end - start));
    if (!name.empty()) out.push_back(std::move(name));
    start = end + 2;
  }
  return out;
}

}  // namespace

std::string reconstruct_inverted_abstract(const json& index) {
  std::map<int64_t, std::string> words;
  for (const auto& [word, positions] : index.items()) {
    if (!positions.is_array()) {
      throw ParseError("abstract_inverted_index." + word,
                       "expected a position array");
    }
    for (const json& p : positions) {
      if (!p.is_number_integer()) {
        throw ParseError("abstract_inverted_index." + word,
                         "expected integer positions");
      }
      words[p.get<int64_t>()] = word;
    }
  }
  std::string out;
  for (const auto& [_, word] : words) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::vector<PaperRecord> parse_europe_pmc(std::string_view body) {
  const json root = parse_body(body);
  const json& list = require(root, "resultList", "$");
  const json& results = require_array(list, "result", "$.resultList");

  std::vector<PaperRecord> out;
  for (size_t i = 0; i < results.size(); ++i) {
    const std::string path = item_path("$.resultList.result", i);
    const json& item = results[i];
    if (!item.is_object()) throw ParseError(path, "expected an object");
    auto title = opt_string(item, "title", path);
    if (!title || text::trim(*title).empty()) continue;

    PaperRecord p;
    p.source = SourceId::kEuropePmc;
    p.id = require_id(item, "id", path);
    p.title = text::trim(*title);
    p.abstract = opt_string(item, "abstractText", path);
    p.year = opt_year(item, "pubYear", path);
    p.doi = opt_doi(opt_string(item, "doi", path));
    if (auto authors = opt_string(item, "authorString", path)) {
      p.authors = split_authors(*authors);
    }
    std::string collection =
        opt_string(item, "source", path).value_or("MED");
    p.url = "https://europepmc.org/article/" + collection + "/" + p.id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PaperRecord> parse_openalex(std::string_view body) {
  const json root = parse_body(body);
  const json& results = require_array(root, "results", "$");

  std::vector<PaperRecord> out;
  for (size_t i = 0; i < results.size(); ++i) {
    const std::string path = item_path("$.results", i);
    const json& item = results[i];
    if (!item.is_object()) throw ParseError(path, "expected an object");
    auto title = opt_string(item, "display_name", path);
    if (!title || text::trim(*title).empty()) {
      title = opt_string(item, "title", path);
    }
    if (!title || text::trim(*title).empty()) continue;

    PaperRecord p;
    p.source = SourceId::kOpenAlex;
    p.id = require_id(item, "id", path);
    p.title = text::trim(*title);
    p.year = opt_year(item, "publication_year", path);

    std::optional<std::string> doi;
    if (auto ids = item.find("ids"); ids != item.end() && ids->is_object()) {
      doi = opt_string(*ids, "doi", path + ".ids");
    }
    if (!doi) doi = opt_string(item, "doi", path);
    p.doi = opt_doi(doi);

    if (auto idx = item.find("abstract_inverted_index");
        idx != item.end() && !idx->is_null()) {
      if (!idx->is_object()) {
        throw ParseError(path + ".abstract_inverted_index",
                         "expected an object");
      }
      try {
        std::string abstract = reconstruct_inverted_abstract(*idx);
        if (!abstract.empty()) p.abstract = std::move(abstract);
      } catch (const ParseError& e) {
        throw ParseError(path + "." + e.path(), "malformed inverted index");
      }
    }

    if (auto authorships = item.find("authorships");
        authorships != item.end() && authorships->is_array()) {
      for (size_t a = 0; a < authorships->size(); ++a) {
        const json& entry = (*authorships)[a];
        const std::string apath = path + ".authorships[" + std::to_string(a) + "]";
        if (!entry.is_object()) throw ParseError(apath, "expected an object");
        auto author = entry.find("author");
        if (author == entry.end() || !author->is_object()) continue;
        if (auto name = opt_string(*author, "display_name", apath + ".author")) {
          p.authors.push_back(*name);
        }
      }
    }
    p.url = p.id;
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PaperRecord> parse_semantic_scholar(std::string_view body) {
  const json root = parse_body(body);
  if (!root.is_object()) throw ParseError("$", "expected an object");
  // Zero-hit searches omit "data" and report only the total.
  if (!root.contains("data") && root.contains("total")) return {};
  const json& results = require_array(root, "data", "$");

  std::vector<PaperRecord> out;
  for (size_t i = 0; i < results.size(); ++i) {
    const std::string path = item_path("$.data", i);
    const json& item = results[i];
    if (!item.is_object()) throw ParseError(path, "expected an object");
    auto title = opt_string(item, "title", path);
    if (!title || text::trim(*title).empty()) continue;

    PaperRecord p;
    p.source = SourceId::kSemanticScholar;
    p.id = require_id(item, "paperId", path);
    p.title = text::trim(*title);
    p.abstract = opt_string(item, "abstract", path);
    p.year = opt_year(item, "year", path);
    if (auto ext = item.find("externalIds");
        ext != item.end() && ext->is_object()) {
      p.doi = opt_doi(opt_string(*ext, "DOI", path + ".externalIds"));
    }
    if (auto authors = item.find("authors");
        authors != item.end() && authors->is_array()) {
      for (size_t a = 0; a < authors->size(); ++a) {
        const std::string apath = path + ".authors[" + std::to_string(a) + "]";
        if (!(*authors)[a].is_object()) throw ParseError(apath, "expected an object");
        if (auto name = opt_string((*authors)[a], "name", apath)) {
          p.authors.push_back(*name);
        }
      }
    }
    p.url = opt_string(item, "url", path);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<PaperRecord> parse_response(SourceId source,
                                        std::string_view body) {
  switch (source) {
    case SourceId::kEuropePmc:
      return parse_europe_pmc(body);
    case SourceId::kOpenAlex:
      return parse_openalex(body);
    case SourceId::kSemanticScholar:
      return parse_semantic_scholar(body);
  }
  throw InvalidArgument("unknown source");
}

}  // namespace kgd
