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

// Reverse translation of forward-translated sentences through a pluggable MT
// client, with a persistent translation cache.
//
// Clients:
//  * identity: returns its input verbatim;
//  * file: TSV of `from <TAB> to <TAB> source <TAB> translated`;
//  * http: POST /translate {"from", "to", "texts"} -> {"texts"}.

#ifndef RTQE_ROUNDTRIP_HPP
#define RTQE_ROUNDTRIP_HPP

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/dataset.hpp"
#include "rtqe/error.hpp"
#include "rtqe/format.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/http.hpp"

namespace rtqe {

enum class MTClientKind { identity, file, http };

struct MTClientConfig {
  MTClientKind kind = MTClientKind::identity;
  std::string locator;  // ignored by identity
  std::size_t batch_size = 32;
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  std::size_t max_in_flight = 2;
  HttpOptions http;

  void validate() const {
    if (batch_size < 1) throw ConfigError("mt batch_size must be >= 1");
    if (max_retries < 0) throw ConfigError("mt max_retries must be >= 0");
    if (max_in_flight < 1) throw ConfigError("mt max_in_flight must be >= 1");
    if (kind != MTClientKind::identity && locator.empty())
      throw ConfigError("mt client needs a locator");
  }
};

class FileClientMiss : public DataError {
 public:
  explicit FileClientMiss(const std::string& text_hash)
      : DataError("file MT client has no translation for text hash " + text_hash),
        text_hash_(text_hash) {}
  const std::string& text_hash() const noexcept { return text_hash_; }

 private:
  std::string text_hash_;
};

class MTClient {
 public:
  virtual ~MTClient() = default;
  /// Stable identifier used to key cache entries.
  virtual std::string client_id() const = 0;
  virtual std::vector<std::string> translate(const std::vector<std::string>& texts,
                                             const std::string& from,
                                             const std::string& to) = 0;
};

class IdentityClient final : public MTClient {
 public:
  std::string client_id() const override { return "identity"; }
  std::vector<std::string> translate(const std::vector<std::string>& texts,
                                     const std::string&, const std::string&) override {
    return texts;
  }
};

class FileClient final : public MTClient {
 public:
  FileClient() = default;

  static FileClient load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open MT file store: " + path.string());
    FileClient client;
    client.id_ = "file:" + path.filename().string();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      auto cols = split(line, '\t');
      if (cols.size() != 4)
        throw DataError("MT file store line " + std::to_string(line_no) +
                        ": expected 4 columns, found " + std::to_string(cols.size()));
      client.add(std::string(cols[0]), std::string(cols[1]), std::string(cols[2]),
                 std::string(cols[3]));
    }
    return client;
  }

  void add(std::string from, std::string to, std::string source, std::string translated) {
    pairs_[{std::move(from), std::move(to), std::move(source)}] = std::move(translated);
  }

  std::string client_id() const override { return id_; }

  std::vector<std::string> translate(const std::vector<std::string>& texts,
                                     const std::string& from,
                                     const std::string& to) override {
    std::vector<std::string> out;
    out.reserve(texts.size());
    for (const auto& t : texts) {
      auto it = pairs_.find({from, to, t});
      if (it == pairs_.end()) throw FileClientMiss(sha256_hex(t));
      out.push_back(it->second);
    }
    return out;
  }

 private:
  std::string id_ = "file";
  std::map<std::tuple<std::string, std::string, std::string>, std::string> pairs_;
};

/// Chunks by batch_size, at most max_in_flight chunks concurrently, each
/// chunk retried with exponential backoff.
class HttpMTClient final : public MTClient {
 public:
  explicit HttpMTClient(MTClientConfig cfg)
      : cfg_(std::move(cfg)), endpoint_(Endpoint::parse(cfg_.locator)) {}

  std::string client_id() const override { return "http:" + cfg_.locator; }

  std::vector<std::string> translate(const std::vector<std::string>& texts,
                                     const std::string& from,
                                     const std::string& to) override {
    const RetryPolicy policy{cfg_.max_retries, cfg_.backoff_base, 2.0};
    return run_chunked<std::string>(
        texts.size(), cfg_.batch_size, cfg_.max_in_flight,
        [&](std::size_t offset, std::size_t count) {
          std::vector<std::string> chunk(texts.begin() + offset, texts.begin() + offset + count);
          try {
            return with_retries(policy, [&] { return request(chunk, from, to); });
          } catch (TransportError& e) {
            e.chunk_offset = offset;
            e.chunk_size = count;
            throw;
          }
        });
  }

  /// Requests issued so far, including retries.
  std::size_t requests_sent() const noexcept { return requests_.load(); }

 private:
  std::vector<std::string> request(const std::vector<std::string>& chunk,
                                   const std::string& from, const std::string& to) {
    ++requests_;
    const nlohmann::json body = {{"from", from}, {"to", to}, {"texts", chunk}};
    const auto j = post_json(endpoint_, "/translate", body, cfg_.http);
    std::vector<std::string> out;
    try {
      out = j.at("texts").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
      throw TransportError(200, std::string("malformed /translate response: ") + e.what());
    }
    if (out.size() != chunk.size())
      throw TransportError(200, "/translate returned " + std::to_string(out.size()) +
                                    " texts for " + std::to_string(chunk.size()));
    return out;
  }

  MTClientConfig cfg_;
  Endpoint endpoint_;
  std::atomic<std::size_t> requests_{0};
};

inline std::unique_ptr<MTClient> make_mt_client(const MTClientConfig& cfg) {
  cfg.validate();
  switch (cfg.kind) {
    case MTClientKind::identity: return std::make_unique<IdentityClient>();
    case MTClientKind::file: return std::make_unique<FileClient>(FileClient::load(cfg.locator));
    case MTClientKind::http: return std::make_unique<HttpMTClient>(cfg);
  }
  throw ConfigError("unknown MT client kind");
}

/// Order-preserving translation of a non-empty list.
inline std::vector<std::string> translate_batch(MTClient& client,
                                                const std::vector<std::string>& texts,
                                                const std::string& from, const std::string& to) {
  if (texts.empty()) throw DataError("translate_batch needs at least one text");
  auto out = client.translate(texts, from, to);
  if (out.size() != texts.size())
    throw DataError("MT client returned " + std::to_string(out.size()) + " texts for " +
                    std::to_string(texts.size()));
  return out;
}

// ---------------------------------------------------------------------------
// Cache
// ---------------------------------------------------------------------------

/// (client, from, to, sha256(text)) -> translation. Writes are serialized;
/// lookups return exactly the bytes the client produced.
class TranslationCache {
 public:
  using Key = std::tuple<std::string, std::string, std::string, std::string>;

  TranslationCache() = default;

  /// A cache bound to `path`; existing entries are loaded if the file exists.
  static TranslationCache open(const std::filesystem::path& path) {
    TranslationCache cache;
    cache.path_ = path;
    if (!std::filesystem::exists(path)) return cache;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open translation cache: " + path.string());
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      auto j = nlohmann::json::parse(line, nullptr, false);
      try {
        if (j.is_discarded()) throw DataError("invalid JSON");
        cache.entries_[{j.at("client").get<std::string>(), j.at("from").get<std::string>(),
                        j.at("to").get<std::string>(), j.at("key").get<std::string>()}] =
            j.at("text").get<std::string>();
      } catch (const std::exception& e) {
        throw DataError("translation cache line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return cache;
  }

  bool persisted() const noexcept { return path_.has_value(); }
  std::size_t size() const {
    std::lock_guard lock(*mutex_);
    return entries_.size();
  }

  std::optional<std::string> get(const std::string& client, const std::string& from,
                                 const std::string& to, const std::string& text) const {
    std::lock_guard lock(*mutex_);
    auto it = entries_.find({client, from, to, sha256_hex(text)});
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }

  void put(const std::string& client, const std::string& from, const std::string& to,
           const std::string& text, std::string translation) {
    std::lock_guard lock(*mutex_);
    entries_[{client, from, to, sha256_hex(text)}] = std::move(translation);
  }

  /// Rewrites the backing file in key order. No-op for in-memory caches.
  void save() const {
    if (!path_) return;
    std::lock_guard lock(*mutex_);
    const auto tmp = std::filesystem::path(path_->string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write translation cache: " + tmp.string());
      for (const auto& [key, text] : entries_) {
        const auto& [client, from, to, hash] = key;
        nlohmann::json j = {{"client", client}, {"from", from}, {"to", to},
                            {"key", hash}, {"text", text}};
        out << j.dump() << '\n';
      }
    }
    std::filesystem::rename(tmp, *path_);
  }

 private:
  std::optional<std::filesystem::path> path_;
  std::map<Key, std::string> entries_;
  std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();  // movable
};

// ---------------------------------------------------------------------------
// Round trip
// ---------------------------------------------------------------------------

enum class ResultSource { cache, fresh };

inline std::string_view source_name(ResultSource s) {
  return s == ResultSource::cache ? "cache" : "fresh";
}

struct RoundTripResult {
  std::size_t record_id = 0;
  std::string back_translation;
  ResultSource source = ResultSource::fresh;
  std::string client_id;
  bool empty = false;  // the client returned an empty string

  friend bool operator==(const RoundTripResult&, const RoundTripResult&) = default;
};

/// A translate failure during round_trip, with the affected record ids.
class RoundTripError : public Error {
 public:
  RoundTripError(ErrorCategory category, std::size_t first_id, std::size_t last_id,
                 const std::string& cause)
      : Error(category, "round trip failed for records " + std::to_string(first_id) + ".." +
                            std::to_string(last_id) + ": " + cause),
        first_id_(first_id),
        last_id_(last_id) {}

  std::size_t first_record() const noexcept { return first_id_; }
  std::size_t last_record() const noexcept { return last_id_; }

 private:
  std::size_t first_id_;
  std::size_t last_id_;
};

/// Back-translates every record's translation (target -> source language).
/// The cache is consulted first; only distinct uncached texts reach the
/// client, and fresh responses are written back.
inline std::vector<RoundTripResult> round_trip(MTClient& client, const QEDataset& ds,
                                               TranslationCache& cache) {
  const std::string& from = ds.language_pair().target;
  const std::string& to = ds.language_pair().source;
  const std::string id = client.client_id();

  std::vector<RoundTripResult> results(ds.size());
  std::vector<std::string> misses;
  std::vector<std::size_t> miss_first_record;
  std::unordered_map<std::string, std::size_t> miss_index;
  std::vector<std::optional<std::size_t>> pending(ds.size());

  for (std::size_t i = 0; i < ds.size(); ++i) {
    const QERecord& rec = ds[i];
    results[i].record_id = rec.id;
    results[i].client_id = id;
    if (auto hit = cache.get(id, from, to, rec.translation)) {
      results[i].back_translation = std::move(*hit);
      results[i].source = ResultSource::cache;
      continue;
    }
    auto [it, inserted] = miss_index.try_emplace(rec.translation, misses.size());
    if (inserted) {
      misses.push_back(rec.translation);
      miss_first_record.push_back(i);
    }
    pending[i] = it->second;
  }

  if (!misses.empty()) {
    std::vector<std::string> fresh;
    try {
      fresh = translate_batch(client, misses, from, to);
    } catch (const TransportError& e) {
      const std::size_t lo = e.chunk_size ? e.chunk_offset : 0;
      const std::size_t hi = e.chunk_size ? e.chunk_offset + e.chunk_size - 1 : misses.size() - 1;
      throw RoundTripError(ErrorCategory::transport, ds[miss_first_record[lo]].id,
                           ds[miss_first_record[hi]].id, e.what());
    } catch (const Error& e) {
      throw RoundTripError(e.category(), ds[miss_first_record.front()].id,
                           ds[miss_first_record.back()].id, e.what());
    }
    for (std::size_t m = 0; m < misses.size(); ++m) cache.put(id, from, to, misses[m], fresh[m]);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (!pending[i]) continue;
      results[i].back_translation = fresh[*pending[i]];
      results[i].source = ResultSource::fresh;
    }
  }

  for (auto& r : results) r.empty = r.back_translation.empty();
  return results;
}

}  // namespace rtqe

#endif  // RTQE_ROUNDTRIP_HPP
