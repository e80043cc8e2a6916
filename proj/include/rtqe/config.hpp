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

// Pipeline configuration: a JSON document, every key optional except
// dataset.path and metrics. Relative paths resolve against the directory of
// the config file. Unknown keys are rejected.
//
//   {
//     "dataset": {"path": "qe.tsv", "source_lang": "en", "target_lang": "de",
//                 "mode": "strict"},
//     "mt_client": {"kind": "identity", "locator": "", "batch_size": 32,
//                   "max_retries": 3, "backoff_base_ms": 1000,
//                   "max_in_flight": 2, "connect_timeout_ms": 5000,
//                   "read_timeout_ms": 60000},
//     "embeddings": [{"model": "use", "kind": "file", "locator": "use.jsonl",
//                     "batch_size": 64, "max_in_flight": 4}],
//     "metrics": ["bleu", "chrf", "ter", "tf_cosine", "embed_cosine:use"],
//     "bleu": {"max_n": 4, "smoothing": "add_one_higher_order"},
//     "chrf": {"max_n": 6, "beta": 2.0},
//     "stopwords": null,
//     "output_dir": "out",
//     "mt_cache": null,
//     "report": {"outliers": 5}
//   }
//
// mt_cache defaults to <output_dir>/cache/mt.jsonl; stopwords null selects
// the built-in English list.

#ifndef RTQE_CONFIG_HPP
#define RTQE_CONFIG_HPP

#include <algorithm>
#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/dataset.hpp"
#include "rtqe/embedding.hpp"
#include "rtqe/error.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/metrics.hpp"
#include "rtqe/roundtrip.hpp"

namespace rtqe {

inline constexpr std::string_view kEmbedCosinePrefix = "embed_cosine:";

inline const std::vector<std::string>& lexical_metric_names() {
  static const std::vector<std::string> names = {"bleu", "chrf", "ter", "tf_cosine"};
  return names;
}

struct DatasetSpec {
  std::filesystem::path path;
  LanguagePair pair{"en", "de"};
  ParseMode mode = ParseMode::strict;
};

struct PipelineConfig {
  DatasetSpec dataset;
  MTClientConfig mt;
  std::vector<EmbeddingBackendConfig> embeddings;
  std::vector<std::string> metrics;
  BleuConfig bleu;
  ChrfConfig chrf;
  std::optional<std::filesystem::path> stopwords;
  std::filesystem::path output_dir = "out";
  std::optional<std::filesystem::path> mt_cache;
  std::size_t report_outliers = 5;

  std::filesystem::path mt_cache_path() const {
    return mt_cache ? *mt_cache : output_dir / "cache" / "mt.jsonl";
  }

  const EmbeddingBackendConfig* embedding(std::string_view model) const {
    for (const auto& e : embeddings)
      if (e.model_id == model) return &e;
    return nullptr;
  }

  /// Checks everything that can be checked without doing work.
  void validate() const {
    if (dataset.path.empty()) throw ConfigError("dataset.path is required");
    dataset.pair.validate();
    mt.validate();
    bleu.validate();
    chrf.validate();
    std::set<std::string> models;
    for (const auto& e : embeddings) {
      e.validate();
      if (!models.insert(e.model_id).second)
        throw ConfigError("embedding model '" + e.model_id + "' listed twice");
    }
    if (metrics.empty()) throw ConfigError("no metrics enabled");
    std::set<std::string> seen;
    for (const auto& m : metrics) {
      if (!seen.insert(m).second) throw ConfigError("metric '" + m + "' listed twice");
      if (m.rfind(kEmbedCosinePrefix, 0) == 0) {
        const std::string model = m.substr(kEmbedCosinePrefix.size());
        if (!models.count(model))
          throw ConfigError("metric '" + m + "' needs an embeddings entry for model '" + model +
                            "'");
        continue;
      }
      const auto& lex = lexical_metric_names();
      if (std::find(lex.begin(), lex.end(), m) == lex.end())
        throw ConfigError("unknown metric '" + m +
                          "'; valid: bleu, chrf, ter, tf_cosine, embed_cosine:<model>");
    }
    if (output_dir.empty()) throw ConfigError("output_dir is empty");
  }

  /// Fully resolved configuration with every default filled in.
  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["dataset"] = {{"path", dataset.path.string()},
                    {"source_lang", dataset.pair.source},
                    {"target_lang", dataset.pair.target},
                    {"mode", dataset.mode == ParseMode::strict ? "strict" : "lenient"}};
    static const char* kinds[] = {"identity", "file", "http"};
    j["mt_client"] = {{"kind", kinds[static_cast<int>(mt.kind)]},
                      {"locator", mt.locator},
                      {"batch_size", mt.batch_size},
                      {"max_retries", mt.max_retries},
                      {"backoff_base_ms", mt.backoff_base.count()},
                      {"max_in_flight", mt.max_in_flight},
                      {"connect_timeout_ms", mt.http.connect_timeout.count()},
                      {"read_timeout_ms", mt.http.read_timeout.count()}};
    auto& emb = j["embeddings"] = nlohmann::ordered_json::array();
    for (const auto& e : embeddings)
      emb.push_back({{"model", e.model_id},
                     {"kind", e.kind == BackendKind::file ? "file" : "http"},
                     {"locator", e.locator},
                     {"batch_size", e.batch_size},
                     {"max_in_flight", e.max_in_flight},
                     {"connect_timeout_ms", e.http.connect_timeout.count()},
                     {"read_timeout_ms", e.http.read_timeout.count()}});
    j["metrics"] = metrics;
    j["bleu"] = {{"max_n", bleu.max_n},
                 {"smoothing",
                  bleu.smoothing == BleuSmoothing::none ? "none" : "add_one_higher_order"}};
    j["chrf"] = {{"max_n", chrf.max_n}, {"beta", chrf.beta}};
    const auto optional_path = [](const std::optional<std::filesystem::path>& p) {
      return p ? nlohmann::ordered_json(p->string()) : nlohmann::ordered_json();
    };
    j["stopwords"] = optional_path(stopwords);
    j["output_dir"] = output_dir.string();
    j["mt_cache"] = optional_path(mt_cache);
    j["report"] = {{"outliers", report_outliers}};
    return j;
  }

  /// Identifies the computation; the output location is not part of it.
  std::string hash() const {
    auto j = to_json();
    j.erase("output_dir");
    return config_token(j.dump());
  }
};

namespace detail {

/// Typed access to a JSON object that remembers which keys were read, so
/// unknown keys can be reported.
class ConfigReader {
 public:
  ConfigReader(const nlohmann::json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <typename T>
  std::optional<T> get(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end() || it->is_null()) return std::nullopt;
    try {
      return it->get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError(where_ + key + ": wrong type (" + it->dump() + ")");
    }
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (auto v = get<T>(key)) out = *v;
  }

  const nlohmann::json* child(const std::string& key) {
    used_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!used_.count(key)) throw ConfigError("unknown config key " + where_ + key);
  }

 private:
  const nlohmann::json& j_;
  std::string where_;
  std::set<std::string> used_;
};

inline std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

inline std::size_t read_size(ConfigReader& r, const std::string& key, std::size_t def) {
  auto v = r.get<long long>(key);
  if (!v) return def;
  if (*v < 0) throw ConfigError(key + " must be non-negative");
  return static_cast<std::size_t>(*v);
}

inline std::chrono::milliseconds read_ms(ConfigReader& r, const std::string& key,
                                         std::chrono::milliseconds def) {
  auto v = r.get<long long>(key);
  if (!v) return def;
  if (*v < 0) throw ConfigError(key + " must be non-negative");
  return std::chrono::milliseconds(*v);
}

}  // namespace detail

/// Builds a config from JSON. `base_dir` anchors relative paths.
inline PipelineConfig config_from_json(const nlohmann::json& j,
                                       const std::filesystem::path& base_dir = {}) {
  using detail::ConfigReader;
  PipelineConfig cfg;
  ConfigReader root(j, "");

  if (const auto* d = root.child("dataset")) {
    ConfigReader r(*d, "dataset.");
    if (auto p = r.get<std::string>("path")) cfg.dataset.path = detail::resolve(base_dir, *p);
    r.read("source_lang", cfg.dataset.pair.source);
    r.read("target_lang", cfg.dataset.pair.target);
    if (auto mode = r.get<std::string>("mode")) {
      if (*mode == "strict") cfg.dataset.mode = ParseMode::strict;
      else if (*mode == "lenient") cfg.dataset.mode = ParseMode::lenient;
      else throw ConfigError("dataset.mode must be strict or lenient");
    }
    r.finish();
  }

  if (const auto* m = root.child("mt_client")) {
    ConfigReader r(*m, "mt_client.");
    if (auto kind = r.get<std::string>("kind")) {
      if (*kind == "identity") cfg.mt.kind = MTClientKind::identity;
      else if (*kind == "file") cfg.mt.kind = MTClientKind::file;
      else if (*kind == "http") cfg.mt.kind = MTClientKind::http;
      else throw ConfigError("mt_client.kind must be identity, file or http");
    }
    if (auto loc = r.get<std::string>("locator"))
      cfg.mt.locator = cfg.mt.kind == MTClientKind::file
                           ? detail::resolve(base_dir, *loc).string()
                           : *loc;
    cfg.mt.batch_size = detail::read_size(r, "batch_size", cfg.mt.batch_size);
    if (auto v = r.get<int>("max_retries")) cfg.mt.max_retries = *v;
    cfg.mt.backoff_base = detail::read_ms(r, "backoff_base_ms", cfg.mt.backoff_base);
    cfg.mt.max_in_flight = detail::read_size(r, "max_in_flight", cfg.mt.max_in_flight);
    cfg.mt.http.connect_timeout =
        detail::read_ms(r, "connect_timeout_ms", cfg.mt.http.connect_timeout);
    cfg.mt.http.read_timeout = detail::read_ms(r, "read_timeout_ms", cfg.mt.http.read_timeout);
    r.finish();
  }

  if (const auto* e = root.child("embeddings")) {
    if (!e->is_array()) throw ConfigError("embeddings must be a list");
    for (std::size_t i = 0; i < e->size(); ++i) {
      ConfigReader r((*e)[i], "embeddings[" + std::to_string(i) + "].");
      EmbeddingBackendConfig b;
      r.read("model", b.model_id);
      if (auto kind = r.get<std::string>("kind")) {
        if (*kind == "file") b.kind = BackendKind::file;
        else if (*kind == "http") b.kind = BackendKind::http;
        else throw ConfigError("embeddings kind must be file or http");
      }
      if (auto loc = r.get<std::string>("locator"))
        b.locator = b.kind == BackendKind::file ? detail::resolve(base_dir, *loc).string() : *loc;
      b.batch_size = detail::read_size(r, "batch_size", b.batch_size);
      b.max_in_flight = detail::read_size(r, "max_in_flight", b.max_in_flight);
      b.http.connect_timeout = detail::read_ms(r, "connect_timeout_ms", b.http.connect_timeout);
      b.http.read_timeout = detail::read_ms(r, "read_timeout_ms", b.http.read_timeout);
      r.finish();
      cfg.embeddings.push_back(std::move(b));
    }
  }

  root.read("metrics", cfg.metrics);

  if (const auto* b = root.child("bleu")) {
    ConfigReader r(*b, "bleu.");
    r.read("max_n", cfg.bleu.max_n);
    if (auto s = r.get<std::string>("smoothing")) {
      if (*s == "none") cfg.bleu.smoothing = BleuSmoothing::none;
      else if (*s == "add_one_higher_order") cfg.bleu.smoothing = BleuSmoothing::add_one_higher_order;
      else throw ConfigError("bleu.smoothing must be none or add_one_higher_order");
    }
    r.finish();
  }
  if (const auto* c = root.child("chrf")) {
    ConfigReader r(*c, "chrf.");
    r.read("max_n", cfg.chrf.max_n);
    r.read("beta", cfg.chrf.beta);
    r.finish();
  }
  if (auto s = root.get<std::string>("stopwords")) cfg.stopwords = detail::resolve(base_dir, *s);
  if (auto o = root.get<std::string>("output_dir")) cfg.output_dir = detail::resolve(base_dir, *o);
  if (auto c = root.get<std::string>("mt_cache")) cfg.mt_cache = detail::resolve(base_dir, *c);
  if (const auto* rep = root.child("report")) {
    ConfigReader r(*rep, "report.");
    cfg.report_outliers = detail::read_size(r, "outliers", cfg.report_outliers);
    r.finish();
  }
  root.finish();
  return cfg;
}

/// Sets `dotted.key=value` in a JSON tree. The value is parsed as JSON when
/// possible and taken as a string otherwise.
inline void apply_override(nlohmann::json& j, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw ConfigError("override must look like key.path=value, got '" +
                      std::string(assignment) + "'");
  const std::string key(assignment.substr(0, eq));
  const std::string raw(assignment.substr(eq + 1));
  auto value = nlohmann::json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  nlohmann::json* node = &j;
  for (auto part : split(key, '.')) {
    if (part.empty()) throw ConfigError("empty component in override key '" + key + "'");
    if (node->is_null()) *node = nlohmann::json::object();
    if (node->is_array()) {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
      if (ec != std::errc() || ptr != part.data() + part.size() || idx >= node->size())
        throw ConfigError("bad list index '" + std::string(part) + "' in override '" + key + "'");
      node = &(*node)[idx];
    } else if (node->is_object()) {
      node = &(*node)[std::string(part)];
    } else {
      throw ConfigError("override '" + key + "' descends into a scalar");
    }
  }
  *node = std::move(value);
}

inline nlohmann::json read_config_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  auto j = nlohmann::json::parse(buf.str(), nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw ConfigError("config file is not valid JSON: " + path.string());
  return j;
}

inline PipelineConfig load_config(const std::filesystem::path& path,
                                  const std::vector<std::string>& overrides = {}) {
  auto j = read_config_json(path);
  for (const auto& o : overrides) apply_override(j, o);
  auto cfg = config_from_json(j, path.parent_path());
  cfg.validate();
  return cfg;
}

}  // namespace rtqe

#endif  // RTQE_CONFIG_HPP
