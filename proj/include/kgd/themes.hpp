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

#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "kgd/embedding.hpp"
#include "kgd/paper.hpp"

namespace kgd {

struct Token {
  std::string text;  // casefolded letters and digits only
  size_t position = 0;

  friend bool operator==(const Token&, const Token&) = default;
};

// Casefolds and splits on every maximal run of non-alphanumeric characters.
std::vector<Token> tokenize(std::string_view text);

// Pinned English stopword list. The built-in list is compiled from
// data/stopwords_en.txt; `KGD_STOPWORDS` may point at a replacement file
// (UTF-8, one word per line).
class Stopwords {
 public:
  static const Stopwords& builtin();
  // Throws IoError when the file cannot be read.
  static Stopwords load(const std::filesystem::path& path);
  // The file named by KGD_STOPWORDS when set, otherwise the built-in list.
  static Stopwords from_env();
  static Stopwords from_text(std::string_view contents);

  bool contains(std::string_view word) const;
  size_t size() const { return words_.size(); }
  // SHA-256 of the source text the list was built from.
  const std::string& digest() const { return digest_; }

 private:
  std::unordered_set<std::string> words_;
  std::string digest_;
};

// SHA-256 of the shipped stopword file.
inline constexpr std::string_view kBuiltinStopwordsSha256 =
    "a842e0a0135dc633d227e24f1378963f4a46cb229fd464d1e4ac71fc3c7c4b63";

struct CandidatePhrase {
  std::string text;  // one token or two space-joined tokens
  int arity = 1;

  friend auto operator<=>(const CandidatePhrase&,
                          const CandidatePhrase&) = default;
};

// Every non-stop unigram plus every bigram of positionally adjacent non-stop
// tokens. Bigrams never bridge a removed stopword.
std::set<CandidatePhrase> generate_candidates(const std::vector<Token>& tokens,
                                              const Stopwords& stopwords);

struct Theme {
  std::string text;
  double score = 0.0;

  friend bool operator==(const Theme&, const Theme&) = default;
};

void to_json(nlohmann::json& j, const Theme& theme);
void from_json(const nlohmann::json& j, Theme& theme);

inline constexpr size_t kDefaultThemesPerDocument = 5;

struct ExtractionOptions {
  size_t themes_per_document = kDefaultThemesPerDocument;
  // Embed "title. abstract" instead of the title alone.
  bool embed_abstract = false;
};

// The text a document is embedded and mined from.
std::string document_text(const PaperRecord& doc, bool embed_abstract);

// Scores every candidate by cosine against the document embedding and keeps
// the top `n` (score descending, then phrase text ascending bytewise).
// Throws EmptyTextError when the document text has no tokens.
std::vector<Theme> extract_themes(const PaperRecord& doc, size_t n,
                                  const EmbeddingProvider& provider,
                                  const Stopwords& stopwords,
                                  bool embed_abstract = false);

// Themes per paper, keyed by canonical_key.
using PaperThemes = std::map<std::string, std::vector<Theme>>;

struct CorpusExtraction {
  PaperThemes themes;
  // Papers dropped because their text had no tokens.
  std::vector<PaperRecord> dropped;
};

// Extracts themes for every paper, running papers concurrently. Results do
// not depend on scheduling.
CorpusExtraction extract_corpus_themes(const Corpus& corpus,
                                       const EmbeddingProvider& provider,
                                       const Stopwords& stopwords,
                                       const ExtractionOptions& options = {});

struct ThemeFrequency {
  std::string text;
  size_t doc_frequency = 0;

  friend bool operator==(const ThemeFrequency&,
                         const ThemeFrequency&) = default;
};

void to_json(nlohmann::json& j, const ThemeFrequency& t);
void from_json(const nlohmann::json& j, ThemeFrequency& t);

// Union of theme texts over the corpus ordered by document frequency
// descending, then text ascending. Throws InvalidArgument when a corpus
// paper has no entry in `themes`.
std::vector<ThemeFrequency> corpus_theme_frequencies(const Corpus& corpus,
                                                     const PaperThemes& themes);
std::vector<std::string> corpus_theme_index(const Corpus& corpus,
                                            const PaperThemes& themes);

}  // namespace kgd
