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

// Sentence-level BLEU with a single reference.

#ifndef RTQE_METRICS_BLEU_HPP
#define RTQE_METRICS_BLEU_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rtqe/error.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/metrics/score.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

enum class BleuSmoothing {
  none,
  add_one_higher_order,  // +1 to numerator and denominator for n >= 2
};

struct BleuConfig {
  int max_n = 4;
  BleuSmoothing smoothing = BleuSmoothing::add_one_higher_order;

  void validate() const {
    if (max_n < 1 || max_n > 9)
      throw ConfigError("bleu max_n must be in [1, 9], got " + std::to_string(max_n));
  }

  std::string canonical() const {
    return "bleu;max_n=" + std::to_string(max_n) + ";smoothing=" +
           (smoothing == BleuSmoothing::none ? "none" : "add_one_higher_order");
  }
};

/// Clipped n-gram matches and hypothesis n-gram totals, index 0 = unigrams.
struct BleuStatistics {
  std::vector<std::size_t> matches;
  std::vector<std::size_t> totals;
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;
};

template <typename T>
BleuStatistics bleu_statistics(std::span<const T> hyp, std::span<const T> ref,
                               int max_n) {
  BleuStatistics st;
  st.hyp_len = hyp.size();
  st.ref_len = ref.size();
  st.matches.assign(static_cast<std::size_t>(max_n), 0);
  st.totals.assign(static_cast<std::size_t>(max_n), 0);

  for (std::size_t n = 1; n <= static_cast<std::size_t>(max_n); ++n) {
    if (hyp.size() < n) break;
    std::map<std::vector<T>, std::size_t> ref_counts;
    for (std::size_t i = 0; i + n <= ref.size(); ++i)
      ++ref_counts[std::vector<T>(ref.begin() + i, ref.begin() + i + n)];
    std::map<std::vector<T>, std::size_t> hyp_counts;
    for (std::size_t i = 0; i + n <= hyp.size(); ++i)
      ++hyp_counts[std::vector<T>(hyp.begin() + i, hyp.begin() + i + n)];

    std::size_t matched = 0;
    for (const auto& [gram, count] : hyp_counts) {
      auto it = ref_counts.find(gram);
      if (it != ref_counts.end()) matched += std::min(count, it->second);
    }
    st.matches[n - 1] = matched;
    st.totals[n - 1] = hyp.size() - n + 1;
  }
  return st;
}

/// BLEU on [0, 100] from precomputed statistics. Returns 0 when either side is
/// empty or (without smoothing) when any precision is zero.
inline double bleu_from_statistics(const BleuStatistics& st, const BleuConfig& cfg) {
  if (st.hyp_len == 0 || st.ref_len == 0) return 0.0;
  double log_sum = 0.0;
  for (int n = 1; n <= cfg.max_n; ++n) {
    double m = static_cast<double>(st.matches[n - 1]);
    double t = static_cast<double>(st.totals[n - 1]);
    if (cfg.smoothing == BleuSmoothing::add_one_higher_order && n >= 2) {
      m += 1.0;
      t += 1.0;
    }
    if (m == 0.0 || t == 0.0) return 0.0;
    log_sum += std::log(m / t);
  }
  const double ratio = static_cast<double>(st.ref_len) / static_cast<double>(st.hyp_len);
  const double bp = std::min(1.0, std::exp(1.0 - ratio));
  return detail::clamp_to(100.0 * bp * std::exp(log_sum / cfg.max_n), 0.0, 100.0);
}

template <typename T>
double bleu(std::span<const T> hyp, std::span<const T> ref, const BleuConfig& cfg = {}) {
  return bleu_from_statistics(bleu_statistics(hyp, ref, cfg.max_n), cfg);
}

/// Inputs are expected to be `simple`-tokenized without stopword removal.
inline MetricScore sentence_bleu(const TokenSequence& hyp, const TokenSequence& ref,
                                 const BleuConfig& cfg = {}) {
  cfg.validate();
  auto score = detail::make_score(
      "bleu",
      bleu(std::span<const std::string>(hyp.tokens),
           std::span<const std::string>(ref.tokens), cfg),
      Scale::percent, config_token(cfg.canonical()));
  if (hyp.empty() || ref.empty()) {
    score.warning = true;
    score.warning_message = hyp.empty() ? "empty hypothesis" : "empty reference";
  }
  return score;
}

}  // namespace rtqe

#endif  // RTQE_METRICS_BLEU_HPP
