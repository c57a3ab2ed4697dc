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

#include "kgd/themes.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "kgd/errors.hpp"
#include "kgd/text.hpp"

namespace kgd {

// Defined in the generated stopwords_data.cpp.
extern const std::string_view kBuiltinStopwordsText;

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  for (std::string& run : text::alnum_runs(text)) {
    tokens.push_back(Token{std::move(run), tokens.size()});
  }
  return tokens;
}

const Stopwords& Stopwords::builtin() {
  static const Stopwords kBuiltin = from_text(kBuiltinStopwordsText);
  return kBuiltin;
}

Stopwords Stopwords::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read stopword file " + path.string());
  std::ostringstream contents;
  contents << in.rdbuf();
  return from_text(contents.str());
}

Stopwords Stopwords::from_env() {
  if (const char* path = std::getenv("KGD_STOPWORDS"); path && *path) {
    return load(path);
  }
  return builtin();
}

Stopwords Stopwords::from_text(std::string_view contents) {
  Stopwords out;
  out.digest_ = text::sha256_hex(contents);
  size_t start = 0;
  while (start <= contents.size()) {
    size_t end = contents.find('\n', start);
    if (end == std::string_view::npos) end = contents.size();
    std::string word = text::trim(contents.substr(start, end - start));
    if (!word.empty()) out.words_.insert(text::casefold(word));
    start = end + 1;
  }
  return out;
}

bool Stopwords::contains(std::string_view word) const {
  return words_.contains(std::string(word));
}

std::set<CandidatePhrase> generate_candidates(const std::vector<Token>& tokens,
                                              const Stopwords& stopwords) {
  std::set<CandidatePhrase> out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (stopwords.contains(tokens[i].text)) continue;
    out.insert({tokens[i].text, 1});
    if (i + 1 < tokens.size() &&
        tokens[i + 1].position == tokens[i].position + 1 &&
        !stopwords.contains(tokens[i + 1].text)) {
      out.insert({tokens[i].text + " " + tokens[i + 1].text, 2});
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const Theme& theme) {
  j = nlohmann::json{{"text", theme.text}, {"score", theme.score}};
}

void from_json(const nlohmann::json& j, Theme& theme) {
  j.at("text").get_to(theme.text);
  j.at("score").get_to(theme.score);
}

std::string document_text(const PaperRecord& doc, bool embed_abstract) {
  if (embed_abstract && doc.abstract && !doc.abstract->empty()) {
    return doc.title + ". " + *doc.abstract;
  }
  return doc.title;
}

std::vector<Theme> extract_themes(const PaperRecord& doc, size_t n,
                                  const EmbeddingProvider& provider,
                                  const Stopwords& stopwords,
                                  bool embed_abstract) {
  const std::string text = document_text(doc, embed_abstract);
  const EmbeddingVector doc_vector = provider.embed(text);

  std::vector<Theme> scored;
  for (const CandidatePhrase& c :
       generate_candidates(tokenize(text), stopwords)) {
    double score = 0.0;
    try {
      score = cosine(provider.embed(c.text), doc_vector);
    } catch (const EmptyTextError&) {
      // Signed hashing can cancel a bigram to the zero vector; it carries
      // no direction, so it scores as orthogonal.
    }
    scored.push_back(Theme{c.text, score});
  }

  auto by_rank = [](const Theme& a, const Theme& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  };
  size_t keep = std::min(n, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + keep, scored.end(),
                    by_rank);
  scored.resize(keep);
  return scored;
}

CorpusExtraction extract_corpus_themes(const Corpus& corpus,
                                       const EmbeddingProvider& provider,
                                       const Stopwords& stopwords,
                                       const ExtractionOptions& options) {
  const size_t count = corpus.papers.size();
  std::vector<std::optional<std::vector<Theme>>> results(count);
  std::atomic<size_t> next{0};
  std::mutex error_mu;
  std::exception_ptr error;

  auto worker = [&] {
    for (size_t i = next++; i < count; i = next++) {
      try {
        results[i] = extract_themes(corpus.papers[i],
                                    options.themes_per_document, provider,
                                    stopwords, options.embed_abstract);
      } catch (const EmptyTextError&) {
        results[i].reset();
      } catch (...) {
        std::lock_guard lock(error_mu);
        if (!error) error = std::current_exception();
      }
    }
  };

  size_t workers = std::min<size_t>(
      count, std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::jthread> pool;
  for (size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (error) std::rethrow_exception(error);

  CorpusExtraction out;
  for (size_t i = 0; i < count; ++i) {
    if (results[i]) {
      out.themes[canonical_key(corpus.papers[i])] = std::move(*results[i]);
    } else {
      out.dropped.push_back(corpus.papers[i]);
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ThemeFrequency& t) {
  j = nlohmann::json{{"text", t.text}, {"doc_frequency", t.doc_frequency}};
}

void from_json(const nlohmann::json& j, ThemeFrequency& t) {
  j.at("text").get_to(t.text);
  j.at("doc_frequency").get_to(t.doc_frequency);
}

std::vector<ThemeFrequency> corpus_theme_frequencies(
    const Corpus& corpus, const PaperThemes& themes) {
  std::map<std::string, size_t> frequency;
  for (const PaperRecord& paper : corpus.papers) {
    auto it = themes.find(canonical_key(paper));
    if (it == themes.end()) {
      throw InvalidArgument("no themes recorded for paper '" + paper.id + "'");
    }
    std::set<std::string> distinct;
    for (const Theme& t : it->second) distinct.insert(t.text);
    for (const std::string& t : distinct) ++frequency[t];
  }
  std::vector<ThemeFrequency> out;
  for (auto& [text, df] : frequency) out.push_back({text, df});
  std::stable_sort(out.begin(), out.end(),
                   [](const ThemeFrequency& a, const ThemeFrequency& b) {
                     return a.doc_frequency > b.doc_frequency;
                   });
  return out;
}

std::vector<std::string> corpus_theme_index(const Corpus& corpus,
                                            const PaperThemes& themes) {
  std::vector<std::string> out;
  for (ThemeFrequency& t : corpus_theme_frequencies(corpus, themes)) {
    out.push_back(std::move(t.text));
  }
  return out;
}

}  // namespace kgd
