// Copyright 2026 The cvclean Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cvclean/error.hpp"
#include "cvclean/text.hpp"

namespace cvclean {

struct EmbeddingVector {
  std::string utterance_id;
  std::vector<float> values;

  std::size_t dim() const noexcept { return values.size(); }
};

/// Cosine similarity accumulated in double precision and clamped to
/// [-1, 1]. Exactly symmetric in its arguments.
inline double cosine_similarity(std::span<const float> a,
                                std::span<const float> b) {
  if (a.size() != b.size()) {
    throw ContractError("cosine_similarity: dimension mismatch (" +
                        std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()) + ")");
  }
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = a[i];
    const double y = b[i];
    dot += x * y;
    aa += x * x;
    bb += y * y;
  }
  if (!(aa > 0.0) || !(bb > 0.0)) {
    throw DegenerateInputError("cosine_similarity: zero-norm vector");
  }
  // sqrt(aa) * sqrt(bb) rather than sqrt(aa * bb): the product is
  // commutative, so swapping arguments gives the identical result.
  const double s = dot / (std::sqrt(aa) * std::sqrt(bb));
  return std::clamp(s, -1.0, 1.0);
}

inline double cosine_similarity(const EmbeddingVector& a,
                                const EmbeddingVector& b) {
  return cosine_similarity(std::span<const float>(a.values),
                           std::span<const float>(b.values));
}

/// Immutable id -> vector map with a fixed dimension.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dim) : dim_(dim) {
    if (dim == 0) throw ContractError("embedding dimension must be positive");
  }

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return entries_.size(); }

  /// Adds an entry; rejects duplicates, wrong dimension, non-finite values
  /// and zero-norm vectors.
  void insert(EmbeddingVector v) {
    if (v.dim() != dim_) {
      throw FormatError("embedding '" + v.utterance_id + "' has dimension " +
                        std::to_string(v.dim()) + ", table has " +
                        std::to_string(dim_));
    }
    double norm2 = 0.0;
    for (float x : v.values) {
      if (!std::isfinite(x)) {
        throw FormatError("embedding '" + v.utterance_id +
                          "' has a non-finite value");
      }
      norm2 += static_cast<double>(x) * x;
    }
    if (!(norm2 > 0.0)) {
      throw FormatError("embedding '" + v.utterance_id + "' has zero norm");
    }
    if (entries_.count(v.utterance_id)) {
      throw DuplicationError("duplicate embedding for '" + v.utterance_id +
                             "'");
    }
    std::string key = v.utterance_id;
    entries_.emplace(std::move(key), std::move(v));
  }

  const EmbeddingVector* find(std::string_view id) const {
    const auto it = entries_.find(id);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Entries in utterance_id order.
  const std::map<std::string, EmbeddingVector, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::size_t dim_;
  std::map<std::string, EmbeddingVector, std::less<>> entries_;
};

/// Anything that serves embeddings by utterance id. get() returns a
/// pointer-like handle that is null for unknown ids.
template <typename P>
concept EmbeddingProvider = requires(const P& p, const std::string& id) {
  { p.dim() } -> std::convertible_to<std::size_t>;
  { p.get(id) } -> std::convertible_to<const EmbeddingVector*>;
};

class TableProvider {
 public:
  explicit TableProvider(const EmbeddingTable& table) : table_(&table) {}
  std::size_t dim() const noexcept { return table_->dim(); }
  const EmbeddingVector* get(std::string_view id) const {
    return table_->find(id);
  }

 private:
  const EmbeddingTable* table_;
};

inline TableProvider table_provider(const EmbeddingTable& table) {
  return TableProvider(table);
}

/// Text format: "dim<TAB>D" header, then "id<TAB>v1 v2 ... vD" per line.
inline EmbeddingTable parse_embedding_table(std::string_view data) {
  const auto lines = text::split_lines(data);
  if (lines.empty()) throw FormatError("embedding table is empty");
  const auto header = text::split(lines.front().content, '\t');
  if (header.size() != 2 || header[0] != "dim") {
    throw RowError(1, "expected header 'dim<TAB>D'");
  }
  const auto dim = text::parse_number<std::size_t>(header[1]);
  if (!dim || *dim == 0) throw RowError(1, "invalid dimension");

  EmbeddingTable table(*dim);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (line.content.empty()) continue;
    const std::size_t tab = line.content.find('\t');
    if (tab == std::string_view::npos || tab == 0) {
      throw RowError(line.number, "expected 'utterance_id<TAB>values'");
    }
    EmbeddingVector v;
    v.utterance_id = std::string(line.content.substr(0, tab));
    const auto tokens = text::split(line.content.substr(tab + 1), ' ');
    if (tokens.size() != *dim) {
      throw RowError(line.number, "expected " + std::to_string(*dim) +
                                      " values, found " +
                                      std::to_string(tokens.size()));
    }
    v.values.reserve(*dim);
    for (auto tok : tokens) {
      const auto x = text::parse_number<float>(tok);
      if (!x) {
        throw RowError(line.number, "bad value '" + std::string(tok) + "'");
      }
      if (!std::isfinite(*x)) throw RowError(line.number, "non-finite value");
      v.values.push_back(*x);
    }
    try {
      table.insert(std::move(v));
    } catch (const DuplicationError& e) {
      throw DuplicationError(std::string(e.what()) + " at line " +
                             std::to_string(line.number));
    } catch (const FormatError& e) {
      throw RowError(line.number, e.what());
    }
  }
  return table;
}

inline EmbeddingTable load_embedding_table(const std::string& path) {
  return parse_embedding_table(text::read_file(path));
}

/// Inverse of parse_embedding_table; values use the shortest round-trip
/// representation so a reload is bit-exact.
inline std::string format_embedding_table(const EmbeddingTable& table) {
  std::string out = "dim\t" + std::to_string(table.dim()) + "\n";
  for (const auto& [id, v] : table.entries()) {
    out += id;
    out.push_back('\t');
    for (std::size_t i = 0; i < v.values.size(); ++i) {
      if (i) out.push_back(' ');
      out += text::format_shortest(v.values[i]);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace cvclean
