// Copyright 2026 The rtqe Authors
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

// Sentence embeddings from pluggable backends, and cosine similarity.
//
// Two backends are provided:
//  * file: a JSONL store, one {"key", "model", "dim", "values"} object per
//    line, keyed by the SHA-256 of the NFC-normalized sentence;
//  * http: an encoder service speaking POST /embed, GET /models, GET /health.

#ifndef RTQE_EMBEDDING_HPP
#define RTQE_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/error.hpp"
#include "rtqe/format.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/http.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

/// Invariant: values.size() == dim() > 0 and every value is finite.
struct EmbeddingVector {
  std::vector<double> values;
  std::string model_id;

  std::size_t dim() const noexcept { return values.size(); }

  bool well_formed() const {
    if (values.empty()) return false;
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  friend bool operator==(const EmbeddingVector&, const EmbeddingVector&) = default;
};

struct SimilarityScore {
  double value = 0.0;  // clamped to [-1, 1]
  std::size_t pair_id = 0;
  std::string model_id;
};

/// (a . b) / (|a| |b|), clamped to [-1, 1]. The dot product and norms are
/// accumulated left to right in index order, which makes the result exactly
/// symmetric in its arguments. A vector against itself is exactly 1.
inline double cosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DimensionMismatch(a.size(), b.size());
  double dot = 0.0, norm_a = 0.0, norm_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    norm_a += a[i] * a[i];
    norm_b += b[i] * b[i];
  }
  if (norm_a == 0.0 || norm_b == 0.0) throw ZeroVector();
  // sqrt(n * n) == n exactly, so identical vectors give exactly 1.
  const double prod = norm_a * norm_b;
  const double denom = std::isfinite(prod) && prod > 0.0 ? std::sqrt(prod)
                                                         : std::sqrt(norm_a) * std::sqrt(norm_b);
  return std::clamp(dot / denom, -1.0, 1.0);
}

inline SimilarityScore cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b,
                                         std::size_t pair_id = 0) {
  return {cosine(a.values, b.values), pair_id, a.model_id};
}

// ---------------------------------------------------------------------------
// Embedding store
// ---------------------------------------------------------------------------

/// Store key of a sentence: SHA-256 hex of its NFC form.
inline std::string sentence_key(std::string_view sentence) {
  return sha256_hex(nfc(sentence));
}

class MissingEmbedding : public DataError {
 public:
  explicit MissingEmbedding(const std::string& key)
      : DataError("missing embedding for sentence hash " + key), key_(key) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

class DimInconsistency : public DataError {
 public:
  DimInconsistency(std::size_t expected, std::size_t got, const std::string& where)
      : DataError("embedding dimension " + std::to_string(got) + " differs from " +
                  std::to_string(expected) + " (" + where + ")") {}
};

class StoreParseError : public DataError {
 public:
  StoreParseError(std::size_t line, const std::string& what)
      : DataError("embedding store line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Sentence key -> vector. All vectors share one dimension.
class EmbeddingStore {
 public:
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

  const EmbeddingVector* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  /// Inserts or replaces. Throws DimInconsistency on a dimension change.
  void put(const std::string& key, EmbeddingVector v) {
    check_dim(v.dim(), "key " + key);
    if (entries_.count(key)) warnings_.push_back("duplicate key " + key + "; last wins");
    entries_[key] = std::move(v);
  }

  void put_sentence(std::string_view sentence, EmbeddingVector v) {
    put(sentence_key(sentence), std::move(v));
  }

  /// Entries in key order, so output is independent of insertion order.
  void write_jsonl(std::ostream& out) const {
    for (const auto& [key, v] : entries_) {
      nlohmann::json line = {{"key", key}, {"model", v.model_id}, {"dim", v.dim()},
                             {"values", v.values}};
      out << line.dump() << '\n';
    }
  }

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write embedding store: " + path.string());
    write_jsonl(out);
  }

  static EmbeddingStore read_jsonl(std::istream& in) {
    EmbeddingStore store;
    std::string text;
    std::size_t line_no = 0;
    while (std::getline(in, text)) {
      ++line_no;
      if (trim(text).empty()) continue;
      auto j = nlohmann::json::parse(text, nullptr, false);
      if (j.is_discarded() || !j.is_object()) throw StoreParseError(line_no, "not a JSON object");
      try {
        EmbeddingVector v;
        const auto key = j.at("key").get<std::string>();
        v.model_id = j.at("model").get<std::string>();
        const auto dim = j.at("dim").get<std::size_t>();
        v.values = j.at("values").get<std::vector<double>>();
        if (v.values.size() != dim)
          throw StoreParseError(line_no, "dim " + std::to_string(dim) + " but " +
                                             std::to_string(v.values.size()) + " values");
        if (!v.well_formed()) throw StoreParseError(line_no, "empty or non-finite vector");
        store.check_dim(v.dim(), "line " + std::to_string(line_no));
        if (store.entries_.count(key))
          store.warnings_.push_back("duplicate key " + key + " at line " +
                                    std::to_string(line_no) + "; last wins");
        store.entries_[key] = std::move(v);
      } catch (const nlohmann::json::exception& e) {
        throw StoreParseError(line_no, e.what());
      }
    }
    return store;
  }

 private:
  void check_dim(std::size_t d, const std::string& where) {
    if (dim_ == 0) {
      dim_ = d;
    } else if (d != dim_) {
      throw DimInconsistency(dim_, d, where);
    }
  }

  std::map<std::string, EmbeddingVector> entries_;
  std::size_t dim_ = 0;
  std::vector<std::string> warnings_;
};

inline EmbeddingStore load_embedding_store(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding store: " + path.string());
  return EmbeddingStore::read_jsonl(in);
}

// ---------------------------------------------------------------------------
// Backends
// ---------------------------------------------------------------------------

enum class BackendKind { file, http };

struct EmbeddingBackendConfig {
  BackendKind kind = BackendKind::file;
  std::string model_id;
  std::string locator;  // store path or service URL
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 4;
  HttpOptions http;

  void validate() const {
    if (model_id.empty()) throw ConfigError("embedding backend needs a model id");
    if (locator.empty()) throw ConfigError("embedding backend '" + model_id + "' needs a locator");
    if (batch_size < 1 || batch_size > 512)
      throw ConfigError("embedding batch_size must be in [1, 512]");
    if (max_in_flight < 1) throw ConfigError("embedding max_in_flight must be >= 1");
  }
};

class EmbeddingBackend {
 public:
  virtual ~EmbeddingBackend() = default;
  virtual const std::string& model_id() const = 0;
  /// Vectors for `sentences`, in order. Called with a non-empty list.
  virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) = 0;
};

class FileEmbeddingBackend final : public EmbeddingBackend {
 public:
  FileEmbeddingBackend(std::string model_id, EmbeddingStore store)
      : model_id_(std::move(model_id)), store_(std::move(store)) {}

  const std::string& model_id() const override { return model_id_; }
  const EmbeddingStore& store() const noexcept { return store_; }

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) override {
    std::vector<EmbeddingVector> out;
    out.reserve(sentences.size());
    for (const auto& s : sentences) {
      const std::string key = sentence_key(s);
      const EmbeddingVector* v = store_.find(key);
      if (!v) throw MissingEmbedding(key);
      out.push_back(*v);
    }
    return out;
  }

 private:
  std::string model_id_;
  EmbeddingStore store_;
};

/// Client of the encoder service. Chunks are sent concurrently, at most
/// `max_in_flight` at a time, and reassembled in input order.
class HttpEmbeddingBackend final : public EmbeddingBackend {
 public:
  explicit HttpEmbeddingBackend(EmbeddingBackendConfig cfg)
      : cfg_(std::move(cfg)), endpoint_(Endpoint::parse(cfg_.locator)) {}

  const std::string& model_id() const override { return cfg_.model_id; }

  std::vector<EmbeddingVector> embed(const std::vector<std::string>& sentences) override {
    return run_chunked<EmbeddingVector>(
        sentences.size(), cfg_.batch_size, cfg_.max_in_flight,
        [&](std::size_t offset, std::size_t count) {
          std::vector<std::string> chunk(sentences.begin() + offset,
                                         sentences.begin() + offset + count);
          try {
            return request(chunk);
          } catch (TransportError& e) {
            e.chunk_offset = offset;
            e.chunk_size = count;
            throw;
          }
        });
  }

  std::vector<std::string> models() const {
    auto j = get_json(endpoint_, "/models", cfg_.http);
    try {
      return j.at("models").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(200, std::string("malformed /models response: ") + e.what());
    }
  }

  bool healthy() const {
    try {
      return get_json(endpoint_, "/health", cfg_.http).value("status", "") == "ok";
    } catch (const TransportError&) {
      return false;
    }
  }

 private:
  std::vector<EmbeddingVector> request(const std::vector<std::string>& chunk) const {
    const nlohmann::json body = {{"model", cfg_.model_id}, {"sentences", chunk}};
    const auto j = post_json(endpoint_, "/embed", body, cfg_.http);
    std::size_t dim = 0;
    std::vector<std::vector<double>> rows;
    try {
      dim = j.at("dim").get<std::size_t>();
      rows = j.at("vectors").get<std::vector<std::vector<double>>>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(200, std::string("malformed /embed response: ") + e.what());
    }
    if (rows.size() != chunk.size())
      throw TransportError(200, "/embed returned " + std::to_string(rows.size()) +
                                    " vectors for " + std::to_string(chunk.size()) +
                                    " sentences");
    std::vector<EmbeddingVector> out;
    out.reserve(rows.size());
    for (auto& row : rows) {
      if (row.size() != dim) throw DimInconsistency(dim, row.size(), "/embed response");
      EmbeddingVector v{std::move(row), cfg_.model_id};
      if (!v.well_formed()) throw TransportError(200, "/embed returned an empty or non-finite vector");
      out.push_back(std::move(v));
    }
    return out;
  }

  EmbeddingBackendConfig cfg_;
  Endpoint endpoint_;
};

inline std::unique_ptr<EmbeddingBackend> make_embedding_backend(
    const EmbeddingBackendConfig& cfg) {
  cfg.validate();
  if (cfg.kind == BackendKind::http) return std::make_unique<HttpEmbeddingBackend>(cfg);
  return std::make_unique<FileEmbeddingBackend>(cfg.model_id, load_embedding_store(cfg.locator));
}

/// Embeds `sentences` and checks the batch contract: one vector per input, a
/// shared dimension, and the backend's model id on every vector.
inline std::vector<EmbeddingVector> embed_batch(EmbeddingBackend& backend,
                                                const std::vector<std::string>& sentences) {
  if (sentences.empty()) throw DataError("embed_batch needs at least one sentence");
  auto out = backend.embed(sentences);
  if (out.size() != sentences.size())
    throw DataError("backend returned " + std::to_string(out.size()) + " vectors for " +
                    std::to_string(sentences.size()) + " sentences");
  for (auto& v : out) {
    if (v.dim() != out.front().dim()) throw DimInconsistency(out.front().dim(), v.dim(), "batch");
    v.model_id = backend.model_id();
  }
  return out;
}

}  // namespace rtqe

#endif  // RTQE_EMBEDDING_HPP
