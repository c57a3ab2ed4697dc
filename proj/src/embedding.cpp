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

#include "kgd/embedding.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "kgd/errors.hpp"
#include "kgd/net.hpp"
#include "kgd/themes.hpp"

namespace kgd {

namespace {

constexpr uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
constexpr uint64_t kFnvPrime = 0x100000001b3ULL;

double l2_norm(const std::vector<double>& values) {
  double sum = 0.0;
  for (double v : values) sum += v * v;
  return std::sqrt(sum);
}

}  // namespace

EmbeddingVector::EmbeddingVector(std::vector<double> values)
    : values_(std::move(values)) {
  if (values_.empty()) throw InvalidArgument("embedding has no components");
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvalidArgument("embedding has a non-finite component");
    }
  }
  double norm = l2_norm(values_);
  if (std::abs(norm - 1.0) > kUnitNormTolerance) {
    throw InvalidArgument("embedding norm " + std::to_string(norm) +
                          " is not 1");
  }
}

EmbeddingVector EmbeddingVector::normalized(std::vector<double> values) {
  double norm = l2_norm(values);
  if (!std::isfinite(norm) || norm == 0.0) {
    throw InvalidArgument("cannot normalize a zero or non-finite vector");
  }
  for (double& v : values) v /= norm;
  return EmbeddingVector(std::move(values));
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw DimensionMismatchError("cannot compare vectors of dimension " +
                                 std::to_string(a.dimension()) + " and " +
                                 std::to_string(b.dimension()));
  }
  double dot = 0.0;
  for (size_t i = 0; i < a.dimension(); ++i) dot += a[i] * b[i];
  return std::clamp(dot, -1.0, 1.0);
}

uint64_t fnv1a64(std::string_view bytes) {
  uint64_t h = kFnvOffsetBasis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

EmbeddingVector HashedFallbackProvider::embed(std::string_view text) const {
  std::vector<std::string> tokens;
  for (Token& t : tokenize(text)) tokens.push_back(std::move(t.text));
  return embed_tokens(tokens);
}

EmbeddingVector HashedFallbackProvider::embed_tokens(
    std::span<const std::string> tokens) const {
  if (tokens.empty()) throw EmptyTextError("text has no tokens to embed");
  std::vector<double> acc(kEmbeddingDimension, 0.0);
  for (const std::string& token : tokens) {
    uint64_t h = fnv1a64(token);
    acc[h % kEmbeddingDimension] += (h >> 63) == 0 ? 1.0 : -1.0;
  }
  // Opposite signs in one bucket can cancel everything out.
  if (l2_norm(acc) == 0.0) {
    throw EmptyTextError("token hashes cancel to a zero vector");
  }
  return EmbeddingVector::normalized(std::move(acc));
}

RemoteEmbeddingProvider::RemoteEmbeddingProvider(
    std::string base_url, std::chrono::milliseconds timeout, size_t dimension)
    : base_url_(std::move(base_url)), timeout_(timeout), dimension_(dimension) {
  net::split_base_url(base_url_);
}

EmbeddingVector RemoteEmbeddingProvider::embed(std::string_view text) const {
  if (tokenize(text).empty()) throw EmptyTextError("text has no tokens");
  return embed_batch({std::string(text)}).front();
}

std::vector<EmbeddingVector> RemoteEmbeddingProvider::embed_batch(
    const std::vector<std::string>& texts) const {
  net::BaseUrl base = net::split_base_url(base_url_);
  httplib::Client client(base.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);

  nlohmann::json request = {{"texts", texts}};
  auto res = client.Post(base.path_prefix + "/embed", request.dump(),
                         "application/json");
  if (!res) {
    throw ProviderUnavailableError("embedding service unreachable: " +
                                   httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw ProviderUnavailableError("embedding service returned status " +
                                   std::to_string(res->status));
  }

  std::vector<EmbeddingVector> out;
  try {
    auto body = nlohmann::json::parse(res->body);
    const auto& vectors = body.at("vectors");
    if (!vectors.is_array() || vectors.size() != texts.size()) {
      throw ProviderUnavailableError("embedding service returned " +
                                     std::to_string(vectors.size()) +
                                     " vectors for " +
                                     std::to_string(texts.size()) + " texts");
    }
    for (const auto& v : vectors) {
      auto values = v.get<std::vector<double>>();
      if (values.size() != dimension_) {
        throw ProviderUnavailableError(
            "embedding service returned dimension " +
            std::to_string(values.size()) + ", expected " +
            std::to_string(dimension_));
      }
      out.push_back(EmbeddingVector::normalized(std::move(values)));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ProviderUnavailableError(std::string("malformed embedding reply: ") +
                                   e.what());
  } catch (const InvalidArgument& e) {
    throw ProviderUnavailableError(std::string("unusable embedding: ") +
                                   e.what());
  }
  return out;
}

}  // namespace kgd
