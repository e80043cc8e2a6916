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

// The staged pipeline: ingest -> roundtrip -> embed -> score -> correlate ->
// report. Every stage reads its inputs from and writes its outputs to the
// output directory:
//
//   dataset.tsv, validation.json            ingest
//   roundtrips.tsv                          roundtrip
//   embeddings/<model>.jsonl                embed
//   scores.tsv, flags.tsv                   score
//   correlation.json, correlation.tsv,
//   distribution.csv                        correlate
//   report.txt                              report
//   manifest.json                           every run
//
// A stage is reused when its stamp (.rtqe/<stage>.json) holds the same key,
// all of its outputs exist, and no earlier stage ran in this invocation. The
// key hashes the stage's settings and the bytes of its input files.

#ifndef RTQE_PIPELINE_HPP
#define RTQE_PIPELINE_HPP

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/analysis.hpp"
#include "rtqe/config.hpp"
#include "rtqe/dataset.hpp"
#include "rtqe/embedding.hpp"
#include "rtqe/error.hpp"
#include "rtqe/format.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/metrics.hpp"
#include "rtqe/roundtrip.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

enum class Stage { ingest, roundtrip, embed, score, correlate, report };

inline constexpr std::array<Stage, 6> kStages = {Stage::ingest,  Stage::roundtrip,
                                                 Stage::embed,   Stage::score,
                                                 Stage::correlate, Stage::report};

inline std::string_view stage_name(Stage s) {
  switch (s) {
    case Stage::ingest: return "ingest";
    case Stage::roundtrip: return "roundtrip";
    case Stage::embed: return "embed";
    case Stage::score: return "score";
    case Stage::correlate: return "correlate";
    case Stage::report: return "report";
  }
  return "unknown";
}

inline std::optional<Stage> parse_stage(std::string_view name) {
  for (Stage s : kStages)
    if (stage_name(s) == name) return s;
  return std::nullopt;
}

enum class StageStatus { not_run, ran, reused, skipped, failed };

inline std::string_view status_name(StageStatus s) {
  switch (s) {
    case StageStatus::not_run: return "not_run";
    case StageStatus::ran: return "ran";
    case StageStatus::reused: return "reused";
    case StageStatus::skipped: return "skipped";
    case StageStatus::failed: return "failed";
  }
  return "unknown";
}

struct StageRecord {
  Stage stage = Stage::ingest;
  StageStatus status = StageStatus::not_run;
  std::size_t records = 0;
  std::vector<std::string> outputs;  // relative to the output directory
  std::size_t warning_count = 0;
  std::string error;
  std::string started_at;
  std::string finished_at;
};

/// What a run did. Written to manifest.json exactly once per run.
struct RunManifest {
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::string status = "incomplete";  // complete | partial | failed
  std::string error;
  std::vector<StageRecord> stages;
  std::vector<std::string> warnings;
  nlohmann::ordered_json metric_configs = nlohmann::ordered_json::object();

  const StageRecord& stage(Stage s) const {
    for (const auto& r : stages)
      if (r.stage == s) return r;
    throw std::out_of_range("stage not in manifest");
  }

  /// Outputs of stages that completed, in stage order.
  std::vector<std::string> outputs() const {
    std::vector<std::string> out;
    for (const auto& r : stages)
      if (r.status == StageStatus::ran || r.status == StageStatus::reused)
        out.insert(out.end(), r.outputs.begin(), r.outputs.end());
    return out;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["config_hash"] = config_hash;
    j["started_at"] = started_at;
    j["finished_at"] = finished_at;
    j["status"] = status;
    if (!error.empty()) j["error"] = error;
    auto& st = j["stages"] = nlohmann::ordered_json::array();
    for (const auto& r : stages) {
      nlohmann::ordered_json s;
      s["name"] = stage_name(r.stage);
      s["status"] = status_name(r.status);
      s["records"] = r.records;
      s["warnings"] = r.warning_count;
      s["outputs"] = r.outputs;
      if (!r.started_at.empty()) s["started_at"] = r.started_at;
      if (!r.finished_at.empty()) s["finished_at"] = r.finished_at;
      if (!r.error.empty()) s["error"] = r.error;
      st.push_back(std::move(s));
    }
    j["metric_configs"] = metric_configs;
    j["warning_count"] = warnings.size();
    j["warnings"] = warnings;
    j["outputs"] = outputs();
    return j;
  }
};

struct RunOptions {
  Stage until = Stage::report;
  std::function<void(const std::string&)> log;
};

namespace pipeline_files {
inline constexpr const char* dataset = "dataset.tsv";
inline constexpr const char* validation = "validation.json";
inline constexpr const char* roundtrips = "roundtrips.tsv";
inline constexpr const char* scores = "scores.tsv";
inline constexpr const char* flags = "flags.tsv";
inline constexpr const char* correlation_json = "correlation.json";
inline constexpr const char* correlation_tsv = "correlation.tsv";
inline constexpr const char* distribution = "distribution.csv";
inline constexpr const char* report = "report.txt";
inline constexpr const char* manifest = "manifest.json";
inline constexpr const char* stamps = ".rtqe";
}  // namespace pipeline_files

namespace detail {

inline std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

/// Write-then-rename, so a crashed stage never leaves a half-written output.
inline void write_file(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::create_directories(path.parent_path());
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

/// Embedding file name for a model id.
inline std::string model_file_stem(std::string_view model) {
  std::string out;
  for (char c : model) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '-' || c == '_';
    out += ok ? c : '_';
  }
  return out;
}

/// Cuts at most `max_bytes` bytes without splitting a UTF-8 sequence.
inline std::string truncate_utf8(std::string_view s, std::size_t max_bytes) {
  if (s.size() <= max_bytes) return std::string(s);
  std::size_t cut = max_bytes;
  while (cut > 0 && (static_cast<unsigned char>(s[cut]) & 0xC0) == 0x80) --cut;
  return std::string(s.substr(0, cut)) + "...";
}

inline std::string pad_right(std::string s, std::size_t width) {
  if (s.size() < width) s.resize(width, ' ');
  return s;
}

inline std::vector<std::vector<std::string_view>> tsv_rows(std::string_view text,
                                                           std::size_t columns,
                                                           std::string_view what) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    if (line_no++ == 0) continue;  // header
    if (line.empty()) continue;
    auto cols = split(line, '\t');
    if (cols.size() != columns)
      throw DataError(std::string(what) + " line " + std::to_string(line_no) + ": expected " +
                      std::to_string(columns) + " columns");
    rows.push_back(std::move(cols));
  }
  return rows;
}

inline std::size_t parse_index(std::string_view s, std::size_t limit, std::string_view what) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v >= limit)
    throw DataError(std::string(what) + ": bad record id '" + std::string(s) + "'");
  return v;
}

inline bool parse_bool(std::string_view s, std::string_view what) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw DataError(std::string(what) + ": expected true or false, got '" + std::string(s) + "'");
}

}  // namespace detail

class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, RunOptions opts) : cfg_(std::move(cfg)), opts_(std::move(opts)) {}

  RunManifest run() {
    cfg_.validate();
    out_ = cfg_.output_dir;
    std::error_code ec;
    std::filesystem::create_directories(out_, ec);
    if (ec || !std::filesystem::is_directory(out_))
      throw ConfigError("output directory is not writable: " + out_.string());
    check_model_files();
    stopwords_ = cfg_.stopwords ? StopwordList::from_file(*cfg_.stopwords)
                                : StopwordList::english();

    manifest_.config_hash = cfg_.hash();
    manifest_.started_at = detail::utc_now();
    manifest_.metric_configs = metric_configs();
    for (Stage s : kStages) manifest_.stages.push_back(StageRecord{s});

    try {
      for (Stage s : kStages) {
        run_stage(s);
        if (s == opts_.until) break;
      }
      manifest_.status = opts_.until == Stage::report ? "complete" : "partial";
    } catch (const std::exception& e) {
      manifest_.status = "failed";
      manifest_.error = e.what();
      finish_manifest();
      throw;
    }
    finish_manifest();
    return manifest_;
  }

 private:
  struct StageResult {
    std::size_t records = 0;
    std::vector<std::string> warnings;
  };

  // -- bookkeeping ---------------------------------------------------------

  void log(const std::string& msg) const {
    if (opts_.log) opts_.log(msg);
  }

  StageRecord& record(Stage s) {
    for (auto& r : manifest_.stages)
      if (r.stage == s) return r;
    throw std::logic_error("unknown stage");
  }

  void finish_manifest() {
    manifest_.finished_at = detail::utc_now();
    detail::write_file(out_ / pipeline_files::manifest, manifest_.to_json().dump(2) + "\n");
  }

  std::string file_digest(const std::filesystem::path& p) const {
    return sha256_hex(detail::read_file(p));
  }

  std::filesystem::path stamp_path(Stage s) const {
    return out_ / pipeline_files::stamps / (std::string(stage_name(s)) + ".json");
  }

  /// Runs `work` unless the stage can be reused.
  template <typename Work>
  void execute(Stage s, const std::string& key, std::vector<std::string> outputs, Work&& work) {
    StageRecord& rec = record(s);
    rec.outputs = std::move(outputs);
    rec.started_at = detail::utc_now();

    std::optional<nlohmann::json> stamp;
    if (!upstream_ran_ && std::filesystem::exists(stamp_path(s))) {
      auto j = nlohmann::json::parse(detail::read_file(stamp_path(s)), nullptr, false);
      if (!j.is_discarded() && j.value("key", "") == key) stamp = std::move(j);
    }
    const bool outputs_present = std::all_of(rec.outputs.begin(), rec.outputs.end(),
                                             [&](const std::string& o) {
                                               return std::filesystem::exists(out_ / o);
                                             });

    StageResult result;
    if (stamp && outputs_present) {
      result.records = stamp->value("records", std::size_t{0});
      result.warnings = stamp->value("warnings", std::vector<std::string>{});
      rec.status = StageStatus::reused;
      log(std::string(stage_name(s)) + ": reused");
    } else {
      log(std::string(stage_name(s)) + ": running");
      try {
        result = work();
      } catch (const std::exception& e) {
        rec.status = StageStatus::failed;
        rec.error = e.what();
        rec.finished_at = detail::utc_now();
        throw;
      }
      nlohmann::json j = {{"stage", stage_name(s)},
                          {"key", key},
                          {"records", result.records},
                          {"warnings", result.warnings}};
      detail::write_file(stamp_path(s), j.dump(2) + "\n");
      rec.status = StageStatus::ran;
      upstream_ran_ = true;
    }
    rec.records = result.records;
    rec.warning_count = result.warnings.size();
    for (const auto& w : result.warnings)
      manifest_.warnings.push_back(std::string(stage_name(s)) + ": " + w);
    rec.finished_at = detail::utc_now();
  }

  /// Hash of a stage's settings plus the content of its input files.
  std::string stage_key(Stage s, const std::string& settings,
                        const std::vector<std::filesystem::path>& inputs) const {
    std::string material = std::string(stage_name(s)) + "\n" + settings + "\n";
    for (const auto& p : inputs) material += p.filename().string() + "=" + file_digest(p) + "\n";
    return sha256_hex(material);
  }

  void run_stage(Stage s) {
    switch (s) {
      case Stage::ingest: return ingest();
      case Stage::roundtrip: return roundtrip();
      case Stage::embed: return embed();
      case Stage::score: return score();
      case Stage::correlate: return correlate_stage();
      case Stage::report: return report();
    }
  }

  std::vector<std::string> embed_models() const {
    std::vector<std::string> models;
    for (const auto& m : cfg_.metrics)
      if (m.rfind(kEmbedCosinePrefix, 0) == 0) models.push_back(m.substr(kEmbedCosinePrefix.size()));
    return models;
  }

  std::string embedding_file(const std::string& model) const {
    return "embeddings/" + detail::model_file_stem(model) + ".jsonl";
  }

  void check_model_files() const {
    std::set<std::string> files;
    for (const auto& m : embed_models())
      if (!files.insert(embedding_file(m)).second)
        throw ConfigError("embedding models map to the same file: " + embedding_file(m));
  }

  std::string stopwords_identity() const {
    return cfg_.stopwords ? "file:" + file_digest(*cfg_.stopwords) : "builtin:en";
  }

  nlohmann::ordered_json metric_configs() const {
    nlohmann::ordered_json j = nlohmann::ordered_json::object();
    for (const auto& m : cfg_.metrics) {
      std::string canonical;
      if (m == "bleu") canonical = cfg_.bleu.canonical();
      else if (m == "chrf") canonical = cfg_.chrf.canonical();
      else if (m == "ter") canonical = "ter;tokenize=simple;shifts=greedy";
      else if (m == "tf_cosine") canonical = "tf_cosine;tokenize=simple;stopwords=" + stopwords_identity();
      else canonical = "embed_cosine;model=" + m.substr(kEmbedCosinePrefix.size());
      j[m] = {{"canonical", canonical}, {"hash", config_token(canonical)}};
    }
    return j;
  }

  // -- artifact loading ------------------------------------------------------

  const QEDataset& dataset() {
    if (!dataset_)
      dataset_ = parse_qe_tsv(detail::read_file(out_ / pipeline_files::dataset),
                              cfg_.dataset.pair, ParseMode::strict)
                     .dataset;
    return *dataset_;
  }

  const std::vector<std::string>& back_translations() {
    if (!back_) {
      const auto& ds = dataset();
      const std::string text = detail::read_file(out_ / pipeline_files::roundtrips);
      std::vector<std::string> back(ds.size());
      std::vector<bool> seen(ds.size(), false);
      for (const auto& row : detail::tsv_rows(text, 3, pipeline_files::roundtrips)) {
        const std::size_t id = detail::parse_index(row[0], ds.size(), pipeline_files::roundtrips);
        back[id] = unescape_tsv(row[1]);
        seen[id] = true;
      }
      if (std::find(seen.begin(), seen.end(), false) != seen.end())
        throw DataError("roundtrips.tsv does not cover every record");
      back_ = std::move(back);
    }
    return *back_;
  }

  // -- stages ----------------------------------------------------------------

  void ingest() {
    const auto& d = cfg_.dataset;
    const std::string settings = d.pair.source + "-" + d.pair.target + ";mode=" +
                                 (d.mode == ParseMode::strict ? "strict" : "lenient");
    execute(Stage::ingest, stage_key(Stage::ingest, settings, {d.path}),
            {pipeline_files::dataset, pipeline_files::validation}, [&] {
              auto parsed = load_qe_file(d.path, d.pair, d.mode);
              if (parsed.dataset.empty())
                throw DataError("no records accepted from " + d.path.string());
              StageResult r;
              r.records = parsed.dataset.size();
              for (const auto& e : parsed.report.row_errors)
                r.warnings.push_back("row " + std::to_string(e.row) + " rejected: " +
                                     std::string(kind_name(e.kind)) + ": " + e.message);
              detail::write_file(out_ / pipeline_files::dataset, to_qe_tsv(parsed.dataset));
              detail::write_file(out_ / pipeline_files::validation,
                                 parsed.report.to_json().dump(2) + "\n");
              dataset_ = std::move(parsed.dataset);
              return r;
            });
  }

  void roundtrip() {
    const auto& mt = cfg_.mt;
    std::string settings;
    switch (mt.kind) {
      case MTClientKind::identity: settings = "identity"; break;
      case MTClientKind::file: settings = "file:" + file_digest(mt.locator); break;
      case MTClientKind::http: settings = "http:" + mt.locator; break;
    }
    execute(Stage::roundtrip,
            stage_key(Stage::roundtrip, settings, {out_ / pipeline_files::dataset}),
            {pipeline_files::roundtrips}, [&] {
              const auto& ds = dataset();
              auto client = make_mt_client(mt);
              const auto cache_path = cfg_.mt_cache_path();
              std::filesystem::create_directories(cache_path.parent_path());
              auto cache = TranslationCache::open(cache_path);
              auto results = round_trip(*client, ds, cache);
              cache.save();

              StageResult r;
              r.records = results.size();
              std::string out = "record_id\tback_translation\tsource\n";
              std::vector<std::string> back;
              back.reserve(results.size());
              for (const auto& res : results) {
                if (res.empty)
                  r.warnings.push_back("record " + std::to_string(res.record_id) +
                                       ": empty back-translation");
                out += std::to_string(res.record_id) + '\t' + escape_tsv(res.back_translation) +
                       '\t' + std::string(source_name(res.source)) + '\n';
                back.push_back(res.back_translation);
              }
              detail::write_file(out_ / pipeline_files::roundtrips, out);
              back_ = std::move(back);
              return r;
            });
  }

  void embed() {
    const auto models = embed_models();
    if (models.empty()) {
      record(Stage::embed).status = StageStatus::skipped;
      return;
    }
    std::string settings;
    std::vector<std::string> outputs;
    for (const auto& m : models) {
      const auto* b = cfg_.embedding(m);
      settings += m + ";" + (b->kind == BackendKind::file ? "file:" + file_digest(b->locator)
                                                            : "http:" + b->locator) +
                  "\n";
      outputs.push_back(embedding_file(m));
    }
    execute(Stage::embed,
            stage_key(Stage::embed, settings,
                      {out_ / pipeline_files::dataset, out_ / pipeline_files::roundtrips}),
            outputs, [&] {
              const auto& ds = dataset();
              const auto& back = back_translations();
              std::vector<std::string> sentences;
              std::set<std::string> keys;
              auto add = [&](const std::string& s) {
                if (!s.empty() && keys.insert(sentence_key(s)).second) sentences.push_back(s);
              };
              for (std::size_t i = 0; i < ds.size(); ++i) {
                add(ds[i].original);
                add(back[i]);
              }
              StageResult r;
              r.records = sentences.size();
              for (const auto& m : models) {
                auto backend = make_embedding_backend(*cfg_.embedding(m));
                EmbeddingStore store;
                if (!sentences.empty()) {
                  auto vectors = embed_batch(*backend, sentences);
                  for (std::size_t i = 0; i < sentences.size(); ++i)
                    store.put_sentence(sentences[i], std::move(vectors[i]));
                }
                std::ostringstream os;
                store.write_jsonl(os);
                detail::write_file(out_ / embedding_file(m), os.str());
              }
              return r;
            });
  }

  void score() {
    std::string settings;
    for (const auto& [id, c] : manifest_.metric_configs.items())
      settings += id + "=" + c["canonical"].get<std::string>() + "\n";
    std::vector<std::filesystem::path> inputs = {out_ / pipeline_files::dataset,
                                                 out_ / pipeline_files::roundtrips};
    for (const auto& m : embed_models()) inputs.push_back(out_ / embedding_file(m));
    execute(Stage::score, stage_key(Stage::score, settings, inputs),
            {pipeline_files::scores, pipeline_files::flags}, [&] {
              const auto& ds = dataset();
              const auto& back = back_translations();
              std::map<std::string, EmbeddingStore> stores;
              for (const auto& m : embed_models())
                stores.emplace(m, load_embedding_store(out_ / embedding_file(m)));

              StageResult r;
              r.records = ds.size();
              std::string scores = "record_id\tmetric_id\tvalue\n";
              std::string flags = "record_id\tfailed_forward\tcode_switched\n";
              for (std::size_t i = 0; i < ds.size(); ++i) {
                const QERecord& rec = ds[i];
                const std::string id = std::to_string(rec.id);
                const TokenSequence orig_tokens = tokenize(rec.original);
                const TokenSequence back_tokens = tokenize(back[i]);
                for (const auto& m : cfg_.metrics) {
                  MetricScore s;
                  if (m == "bleu") {
                    s = sentence_bleu(back_tokens, orig_tokens, cfg_.bleu);
                  } else if (m == "chrf") {
                    s = chrf(back[i], rec.original, cfg_.chrf);
                  } else if (m == "ter") {
                    s = ter(back_tokens, orig_tokens);
                  } else if (m == "tf_cosine") {
                    s = tf_cosine(rec.original, back[i], stopwords_);
                  } else {
                    s = embed_cosine(m, stores.at(m.substr(kEmbedCosinePrefix.size())),
                                     rec.original, back[i]);
                  }
                  if (s.warning)
                    r.warnings.push_back("record " + id + ": " + m + ": " + s.warning_message);
                  scores += id + '\t' + m + '\t' + format_double(s.value) + '\n';
                }
                const FailureFlags f = flag_record(rec, cfg_.bleu);
                flags += id + '\t' + (f.failed_forward ? "true" : "false") + '\t' +
                         (f.code_switched ? "true" : "false") + '\n';
              }
              detail::write_file(out_ / pipeline_files::scores, scores);
              detail::write_file(out_ / pipeline_files::flags, flags);
              return r;
            });
  }

  /// Cosine of the two sentences' stored embeddings. A zero vector or an
  /// empty back-translation scores 0 with a warning.
  static MetricScore embed_cosine(const std::string& metric, const EmbeddingStore& store,
                                  const std::string& original, const std::string& back) {
    MetricScore s;
    s.metric_id = metric;
    s.scale = Scale::signed_unit;
    s.config_hash = config_token("embed_cosine;model=" + metric.substr(kEmbedCosinePrefix.size()));
    if (original.empty() || back.empty()) {
      s.warning = true;
      s.warning_message = "empty sentence, scored 0";
      return s;
    }
    const auto* a = store.find(sentence_key(original));
    if (!a) throw MissingEmbedding(sentence_key(original));
    const auto* b = store.find(sentence_key(back));
    if (!b) throw MissingEmbedding(sentence_key(back));
    try {
      s.value = cosine_similarity(*a, *b).value;
    } catch (const ZeroVector&) {
      s.warning = true;
      s.warning_message = "zero embedding vector, scored 0";
    }
    return s;
  }

  struct LoadedScores {
    std::vector<MetricColumn> columns;
    std::vector<bool> failed_forward;
    std::vector<bool> code_switched;
  };

  LoadedScores load_scores() {
    const auto& ds = dataset();
    LoadedScores out;
    std::map<std::string, std::size_t> column_of;
    for (const auto& m : cfg_.metrics) {
      column_of[m] = out.columns.size();
      out.columns.push_back(
          {m, std::vector<double>(ds.size(), std::numeric_limits<double>::quiet_NaN())});
    }
    const std::string scores = detail::read_file(out_ / pipeline_files::scores);
    for (const auto& row : detail::tsv_rows(scores, 3, pipeline_files::scores)) {
      const std::size_t id = detail::parse_index(row[0], ds.size(), pipeline_files::scores);
      auto it = column_of.find(std::string(row[1]));
      if (it == column_of.end())
        throw DataError("scores.tsv: unexpected metric '" + std::string(row[1]) + "'");
      auto v = parse_double(row[2]);
      if (!v) throw DataError("scores.tsv: bad value '" + std::string(row[2]) + "'");
      out.columns[it->second].values[id] = *v;
    }
    out.failed_forward.assign(ds.size(), false);
    out.code_switched.assign(ds.size(), false);
    const std::string flags = detail::read_file(out_ / pipeline_files::flags);
    for (const auto& row : detail::tsv_rows(flags, 3, pipeline_files::flags)) {
      const std::size_t id = detail::parse_index(row[0], ds.size(), pipeline_files::flags);
      out.failed_forward[id] = detail::parse_bool(row[1], pipeline_files::flags);
      out.code_switched[id] = detail::parse_bool(row[2], pipeline_files::flags);
    }
    return out;
  }

  void correlate_stage() {
    std::string settings;
    for (const auto& m : cfg_.metrics) settings += m + "\n";
    execute(Stage::correlate,
            stage_key(Stage::correlate, settings,
                      {out_ / pipeline_files::dataset, out_ / pipeline_files::scores,
                       out_ / pipeline_files::flags}),
            {pipeline_files::correlation_json, pipeline_files::correlation_tsv,
             pipeline_files::distribution},
            [&] {
              const auto& ds = dataset();
              const auto loaded = load_scores();
              const auto rep = correlate(ds, loaded.columns);
              std::vector<double> z;
              for (const auto& rec : ds.records()) z.push_back(rec.z_mean);
              const auto dist = group_distribution(z, loaded.failed_forward);

              StageResult r;
              r.records = ds.size();
              for (std::size_t a = 0; a < rep.labels.size(); ++a)
                for (std::size_t b = a + 1; b < rep.labels.size(); ++b)
                  if (!rep.matrix[a][b].r)
                    r.warnings.push_back("r(" + rep.labels[a] + ", " + rep.labels[b] +
                                         ") undefined: " + rep.matrix[a][b].reason);
              detail::write_file(out_ / pipeline_files::correlation_json,
                                 rep.to_json().dump(2) + "\n");
              detail::write_file(out_ / pipeline_files::correlation_tsv, rep.to_tsv());
              detail::write_file(out_ / pipeline_files::distribution, dist.to_csv());
              return r;
            });
  }

  void report() {
    execute(Stage::report,
            stage_key(Stage::report, "outliers=" + std::to_string(cfg_.report_outliers),
                      {out_ / pipeline_files::dataset, out_ / pipeline_files::roundtrips,
                       out_ / pipeline_files::scores, out_ / pipeline_files::flags}),
            {pipeline_files::report}, [&] {
              StageResult r;
              r.records = dataset().size();
              detail::write_file(out_ / pipeline_files::report, render_report());
              return r;
            });
  }

  static std::string summary_row(const std::string& name, const GroupSummary& g) {
    auto cell = [](const std::optional<double>& v) {
      return detail::pad_right(v ? format_fixed(*v, 3) : "NA", 8);
    };
    return "  " + detail::pad_right(name, 11) + detail::pad_right(std::to_string(g.count), 7) +
           cell(g.mean) + cell(g.std) + cell(g.min) + cell(g.q1) + cell(g.median) + cell(g.q3) +
           cell(g.max) + "\n";
  }

  std::string render_report() {
    const auto& ds = dataset();
    const auto& back = back_translations();
    const auto loaded = load_scores();
    const auto corr = correlate(ds, loaded.columns);
    std::vector<double> human;
    for (const auto& rec : ds.records()) human.push_back(rec.z_mean);

    std::ostringstream os;
    os << "rtqe report\n\n";
    os << "dataset   " << cfg_.dataset.path.filename().string() << " ("
       << cfg_.dataset.pair.source << "-" << cfg_.dataset.pair.target << "), " << ds.size()
       << " records\n";
    os << "config    " << manifest_.config_hash << "\n";
    os << "metrics  ";
    for (const auto& m : cfg_.metrics) os << ' ' << m;
    os << "\n\n";

    os << "Pearson r against human z_mean\n";
    std::size_t width = 6;
    for (const auto& m : cfg_.metrics) width = std::max(width, m.size());
    for (std::size_t i = 1; i < corr.labels.size(); ++i) {
      const auto& cell = corr.matrix[0][i];
      os << "  " << detail::pad_right(corr.labels[i], width + 2)
         << detail::pad_right(cell.r ? format_fixed(*cell.r, 4) : "NA", 9)
         << "n=" << cell.n;
      if (!cell.r) os << "  (" << cell.reason << ")";
      os << "\n";
    }
    os << "\nCorrelation matrix\n" << corr.to_tsv() << "\n";

    const auto count = [](const std::vector<bool>& v) {
      return static_cast<std::size_t>(std::count(v.begin(), v.end(), true));
    };
    os << "Failure modes\n";
    os << "  failed forward translation (BLEU > " << format_double(kFailedForwardBleu)
       << "): " << count(loaded.failed_forward) << " of " << ds.size() << "\n";
    os << "  code switching in original: " << count(loaded.code_switched) << " of " << ds.size()
       << "\n\n";

    os << "Human z_mean by failed-forward flag\n";
    os << "  " << detail::pad_right("group", 11) << detail::pad_right("count", 7);
    for (const char* h : {"mean", "std", "min", "q1", "median", "q3", "max"})
      os << detail::pad_right(h, 8);
    os << "\n";
    const auto dist = group_distribution(human, loaded.failed_forward);
    os << summary_row("flagged", dist.flagged) << summary_row("unflagged", dist.unflagged);
    os << "\n";

    os << "Outliers (metric z-score minus human z_mean, top " << cfg_.report_outliers
       << " each way)\n";
    for (const auto& col : loaded.columns) {
      os << "\n[" << col.metric_id << "]\n";
      if (col.metric_id == "ter") os << "  (error rate: higher means less similar)\n";
      std::vector<std::size_t> idx;
      std::vector<double> vals;
      for (std::size_t i = 0; i < col.values.size(); ++i)
        if (std::isfinite(col.values[i])) idx.push_back(i), vals.push_back(col.values[i]);
      if (vals.size() < 2) {
        os << "  too few scores\n";
        continue;
      }
      const ZSeries z = z_normalize(vals);
      if (z.degenerate) {
        os << "  constant scores (" << format_double(z.mean_used) << "), no outliers\n";
        continue;
      }
      std::vector<std::pair<double, std::size_t>> diffs;
      for (std::size_t k = 0; k < idx.size(); ++k)
        diffs.push_back({z.values[k] - human[idx[k]], k});
      auto listing = [&](const char* title, bool high) {
        auto sorted = diffs;
        std::stable_sort(sorted.begin(), sorted.end(), [&](const auto& a, const auto& b) {
          return high ? a.first > b.first : a.first < b.first;
        });
        os << "  " << title << "\n";
        for (std::size_t n = 0; n < std::min(cfg_.report_outliers, sorted.size()); ++n) {
          const std::size_t k = sorted[n].second;
          const std::size_t i = idx[k];
          os << "    #" << ds[i].id << "  human " << format_fixed(human[i], 3) << "  metric "
             << format_fixed(z.values[k], 3) << "  diff " << format_fixed(sorted[n].first, 3);
          if (loaded.failed_forward[i]) os << "  [failed-forward]";
          if (loaded.code_switched[i]) os << "  [code-switch]";
          os << "\n      original: " << detail::truncate_utf8(ds[i].original, 100)
             << "\n      round-trip: " << detail::truncate_utf8(back[i], 100) << "\n";
        }
      };
      listing("metric above human", true);
      listing("metric below human", false);
    }
    return os.str();
  }

  PipelineConfig cfg_;
  RunOptions opts_;
  std::filesystem::path out_;
  RunManifest manifest_;
  StopwordList stopwords_;
  bool upstream_ran_ = false;
  std::optional<QEDataset> dataset_;
  std::optional<std::vector<std::string>> back_;
};

/// Validates `cfg`, then runs stages up to `opts.until`, reusing what it can.
/// Writes manifest.json even when a stage fails; the exception propagates.
inline RunManifest run_pipeline(const PipelineConfig& cfg, const RunOptions& opts = {}) {
  return Pipeline(cfg, opts).run();
}

}  // namespace rtqe

#endif  // RTQE_PIPELINE_HPP
