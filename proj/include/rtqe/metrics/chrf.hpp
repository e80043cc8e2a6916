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

#ifndef RTQE_METRICS_CHRF_HPP
#define RTQE_METRICS_CHRF_HPP

#include <algorithm>
#include <cstddef>
#include <sstream>
#include <string>
#include <string_view>

#include "rtqe/error.hpp"
#include "rtqe/hash.hpp"
#include "rtqe/metrics/score.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

struct ChrfConfig {
  int max_n = 6;
  double beta = 2.0;

  void validate() const {
    if (max_n < 1) throw ConfigError("chrf max_n must be >= 1");
    if (!(beta > 0.0)) throw ConfigError("chrf beta must be > 0");
  }

  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "chrf;max_n=" << max_n << ";beta=" << beta;
    return os.str();
  }
};

/// Character n-gram F-score on [0, 100].
///
/// Precision and recall are averaged over orders 1..max_n, skipping orders
/// where neither side has any n-gram, and then combined as
/// F = (1 + b^2) P R / (b^2 P + R). Whitespace is ignored; case is kept.
inline MetricScore chrf(std::string_view hyp_text, std::string_view ref_text,
                        const ChrfConfig& cfg = {}) {
  cfg.validate();
  const std::u32string hyp = strip_whitespace(hyp_text);
  const std::u32string ref = strip_whitespace(ref_text);

  double precision_sum = 0.0;
  double recall_sum = 0.0;
  int orders = 0;
  for (int n = 1; n <= cfg.max_n; ++n) {
    const auto order = static_cast<std::size_t>(n);
    const NgramCounts h = char_ngrams(std::u32string_view(hyp), order);
    const NgramCounts r = char_ngrams(std::u32string_view(ref), order);
    if (h.empty() && r.empty()) continue;

    std::size_t matched = 0;
    for (const auto& [gram, count] : h) {
      auto it = r.find(gram);
      if (it != r.end()) matched += std::min(count, it->second);
    }
    const std::size_t hyp_total = hyp.size() >= order ? hyp.size() - order + 1 : 0;
    const std::size_t ref_total = ref.size() >= order ? ref.size() - order + 1 : 0;
    precision_sum += hyp_total ? static_cast<double>(matched) / hyp_total : 0.0;
    recall_sum += ref_total ? static_cast<double>(matched) / ref_total : 0.0;
    ++orders;
  }

  auto score = detail::make_score("chrf", 0.0, Scale::percent,
                                  config_token(cfg.canonical()));
  if (orders == 0) {
    score.value = 100.0;
    score.warning = true;
    score.warning_message = "both texts empty";
    return score;
  }
  const double p = precision_sum / orders;
  const double r = recall_sum / orders;
  if (p + r == 0.0) return score;
  const double b2 = cfg.beta * cfg.beta;
  score.value = detail::clamp_to(100.0 * (1.0 + b2) * p * r / (b2 * p + r), 0.0, 100.0);
  if (hyp.empty() || ref.empty()) {
    score.warning = true;
    score.warning_message = hyp.empty() ? "empty hypothesis" : "empty reference";
  }
  return score;
}

}  // namespace rtqe

#endif  // RTQE_METRICS_CHRF_HPP
