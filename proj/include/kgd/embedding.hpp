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

#include <chrono>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace kgd {

// Dimension shared by every provider in a session; matches the 384-wide
// MiniLM sentence-embedding family so a real model drops in unchanged.
inline constexpr size_t kEmbeddingDimension = 384;

inline constexpr double kUnitNormTolerance = 1e-6;

// Dense unit-norm vector with finite components.
class EmbeddingVector {
 public:
  // Validates length, finiteness and unit norm. Throws InvalidArgument.
  explicit EmbeddingVector(std::vector<double> values);

  // L2-normalizes `values` first. Throws InvalidArgument on a zero or
  // non-finite input.
  static EmbeddingVector normalized(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  size_t dimension() const { return values_.size(); }
  double operator[](size_t i) const { return values_[i]; }

  friend bool operator==(const EmbeddingVector&,
                         const EmbeddingVector&) = default;

 private:
  std::vector<double> values_;
};

// Dot product accumulated left to right from index 0, clamped to [-1, 1].
// Throws DimensionMismatchError.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

// 64-bit FNV-1a over raw bytes.
uint64_t fnv1a64(std::string_view bytes);

// Text embedding backend. Implementations must be deterministic and safe
// to call from several threads at once.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::string name() const = 0;
  virtual size_t dimension() const = 0;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
};

// Signed feature hashing of tokens into kEmbeddingDimension buckets.
//
// Each token's FNV-1a hash picks bucket `h % 384` and adds +1 when bit 63 is
// clear, -1 otherwise; the accumulator is then L2-normalized. Word order is
// ignored, so this is a testing stand-in rather than a semantic model.
class HashedFallbackProvider final : public EmbeddingProvider {
 public:
  std::string name() const override { return "hashed-fallback"; }
  size_t dimension() const override { return kEmbeddingDimension; }
  // Throws EmptyTextError when `text` has no tokens.
  EmbeddingVector embed(std::string_view text) const override;

  // Embeds an already tokenized phrase.
  EmbeddingVector embed_tokens(std::span<const std::string> tokens) const;
};

// Client for an embedding service speaking
//   POST {base}/embed  {"texts":[...]}  ->  {"vectors":[[...]]}
// Received vectors are re-normalized. Transport and protocol failures raise
// ProviderUnavailableError.
class RemoteEmbeddingProvider final : public EmbeddingProvider {
 public:
  RemoteEmbeddingProvider(std::string base_url,
                          std::chrono::milliseconds timeout,
                          size_t dimension = kEmbeddingDimension);

  std::string name() const override { return "remote:" + base_url_; }
  size_t dimension() const override { return dimension_; }
  EmbeddingVector embed(std::string_view text) const override;

  std::vector<EmbeddingVector> embed_batch(
      const std::vector<std::string>& texts) const;

 private:
  std::string base_url_;
  std::chrono::milliseconds timeout_;
  size_t dimension_;
};

}  // namespace kgd
