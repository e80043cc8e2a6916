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

// rtqe: round-trip translation quality estimation from the command line.
//
//   rtqe run --config run.json [--out DIR] [--set key.path=value]...
//   rtqe ingest|roundtrip|embed|score|correlate|report --config run.json
//   rtqe score-pair "text a" "text b" [-m bleu -m tf_cosine ...]
//
// Exit status: 0 ok, 1 usage or config error, 2 data error, 3 transport error.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "rtqe/config.hpp"
#include "rtqe/embedding.hpp"
#include "rtqe/error.hpp"
#include "rtqe/metrics.hpp"
#include "rtqe/pipeline.hpp"
#include "rtqe/text.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitData = 2;
constexpr int kExitTransport = 3;

int exit_code(rtqe::ErrorCategory c) {
  switch (c) {
    case rtqe::ErrorCategory::config: return kExitConfig;
    case rtqe::ErrorCategory::transport: return kExitTransport;
    case rtqe::ErrorCategory::data:
    case rtqe::ErrorCategory::math: return kExitData;
  }
  return kExitData;
}

struct GlobalOptions {
  std::string config;
  std::string out;
  std::vector<std::string> overrides;
  bool verbose = false;
};

int run_stages(const GlobalOptions& g, rtqe::Stage until) {
  if (g.config.empty()) throw rtqe::ConfigError("--config is required");
  auto overrides = g.overrides;
  auto json = rtqe::read_config_json(g.config);
  for (const auto& o : overrides) rtqe::apply_override(json, o);
  auto cfg = rtqe::config_from_json(json, std::filesystem::path(g.config).parent_path());
  if (!g.out.empty()) cfg.output_dir = g.out;
  cfg.validate();

  rtqe::RunOptions opts;
  opts.until = until;
  if (g.verbose) opts.log = [](const std::string& msg) { std::cerr << "rtqe: " << msg << '\n'; };
  const auto manifest = rtqe::run_pipeline(cfg, opts);

  for (const auto& st : manifest.stages) {
    if (st.status == rtqe::StageStatus::not_run) continue;
    std::cout << rtqe::stage_name(st.stage) << '\t' << rtqe::status_name(st.status) << '\t'
              << st.records << " records";
    if (st.warning_count) std::cout << ", " << st.warning_count << " warnings";
    std::cout << '\n';
  }
  if (g.verbose)
    for (const auto& w : manifest.warnings) std::cerr << "rtqe: warning: " << w << '\n';
  std::cout << "output\t" << cfg.output_dir.string() << '\n';
  return kExitOk;
}

struct PairOptions {
  std::string a;
  std::string b;
  std::vector<std::string> metrics;
  std::string embed_backend;  // path to a store, or an http:// URL
  std::string embed_model;
};

int score_pair(const PairOptions& p) {
  std::vector<std::string> metrics = p.metrics;
  if (metrics.empty()) metrics = rtqe::lexical_metric_names();

  std::unique_ptr<rtqe::EmbeddingBackend> backend;
  const std::string embed_id = std::string(rtqe::kEmbedCosinePrefix) + p.embed_model;
  for (const auto& m : metrics) {
    const auto& lex = rtqe::lexical_metric_names();
    if (std::find(lex.begin(), lex.end(), m) != lex.end()) continue;
    if (!p.embed_backend.empty() && m == embed_id) continue;
    std::string valid = "bleu, chrf, ter, tf_cosine";
    if (!p.embed_backend.empty()) valid += ", " + embed_id;
    throw rtqe::ConfigError("unknown metric '" + m + "'; valid metrics: " + valid +
                            (p.embed_backend.empty()
                                 ? " (embed_cosine:<model> needs --embed-backend and --embed-model)"
                                 : ""));
  }
  if (!p.embed_backend.empty()) {
    rtqe::EmbeddingBackendConfig cfg;
    cfg.model_id = p.embed_model;
    cfg.locator = p.embed_backend;
    cfg.kind = p.embed_backend.rfind("http://", 0) == 0 ? rtqe::BackendKind::http
                                                        : rtqe::BackendKind::file;
    backend = rtqe::make_embedding_backend(cfg);
  }

  for (const auto& m : metrics) {
    double value = 0.0;
    if (m == "bleu") {
      value = rtqe::sentence_bleu(rtqe::tokenize(p.a), rtqe::tokenize(p.b)).value;
    } else if (m == "chrf") {
      value = rtqe::chrf(p.a, p.b).value;
    } else if (m == "ter") {
      value = rtqe::ter(rtqe::tokenize(p.a), rtqe::tokenize(p.b)).value;
    } else if (m == "tf_cosine") {
      value = rtqe::tf_cosine(p.a, p.b).value;
    } else {
      auto v = rtqe::embed_batch(*backend, {p.a, p.b});
      value = rtqe::cosine_similarity(v[0], v[1]).value;
    }
    std::cout << m << '\t' << rtqe::format_fixed(value, 3) << '\n';
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Round-trip translation quality estimation"};
  app.require_subcommand(1);

  GlobalOptions g;
  app.add_option("--config", g.config, "Pipeline configuration (JSON)");
  app.add_option("--out", g.out, "Output directory (overrides output_dir)");
  app.add_option("--set", g.overrides, "Override a config key, e.g. mt_client.batch_size=8");
  app.add_flag("-v,--verbose", g.verbose, "Log stage progress and warnings to stderr");

  struct StageCommand {
    const char* name;
    const char* help;
    rtqe::Stage until;
  };
  const StageCommand stage_commands[] = {
      {"ingest", "Parse and validate the dataset", rtqe::Stage::ingest},
      {"roundtrip", "Back-translate (runs earlier stages as needed)", rtqe::Stage::roundtrip},
      {"embed", "Embed originals and back-translations", rtqe::Stage::embed},
      {"score", "Score every record and flag failure modes", rtqe::Stage::score},
      {"correlate", "Correlate metrics with human scores", rtqe::Stage::correlate},
      {"report", "Write the text report", rtqe::Stage::report},
      {"run", "Run every stage", rtqe::Stage::report},
  };
  std::vector<std::pair<CLI::App*, rtqe::Stage>> stage_apps;
  for (const auto& c : stage_commands) {
    auto* sub = app.add_subcommand(c.name, c.help);
    sub->fallthrough();
    stage_apps.push_back({sub, c.until});
  }

  PairOptions pair;
  auto* sp = app.add_subcommand("score-pair", "Score one sentence pair and print metric values");
  sp->add_option("a", pair.a, "First text (hypothesis)")->required();
  sp->add_option("b", pair.b, "Second text (reference)")->required();
  sp->add_option("-m,--metric", pair.metrics, "Metric to print; repeatable (default: all lexical)");
  sp->add_option("--embed-backend", pair.embed_backend, "Embedding store path or http:// URL");
  sp->add_option("--embed-model", pair.embed_model, "Model id for embed_cosine:<model>");
  sp->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (sp->parsed()) {
      if (pair.embed_backend.empty() != pair.embed_model.empty())
        throw rtqe::ConfigError("--embed-backend and --embed-model go together");
      return score_pair(pair);
    }
    for (const auto& [sub, until] : stage_apps)
      if (sub->parsed()) return run_stages(g, until);
  } catch (const rtqe::Error& e) {
    std::cerr << "rtqe: error: " << e.what() << '\n';
    return exit_code(e.category());
  } catch (const std::exception& e) {
    std::cerr << "rtqe: error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitConfig;
}
