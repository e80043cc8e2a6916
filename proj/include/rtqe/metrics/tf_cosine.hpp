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

#ifndef RTQE_METRICS_TF_COSINE_HPP
#define RTQE_METRICS_TF_COSINE_HPP

#include <cmath>
#include <cstddef>
#include <string_view>

#include "rtqe/hash.hpp"
#include "rtqe/metrics/score.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

/// Cosine of raw count vectors. Integer accumulation keeps the result exactly
/// symmetric and exactly 1 for identical vectors.
inline double count_cosine(const TermVector& tv) {
  unsigned long long dot = 0, norm_a = 0, norm_b = 0;
  for (std::size_t i = 0; i < tv.vocabulary.size(); ++i) {
    dot += tv.counts_a[i] * tv.counts_b[i];
    norm_a += tv.counts_a[i] * tv.counts_a[i];
    norm_b += tv.counts_b[i] * tv.counts_b[i];
  }
  if (norm_a == 0 || norm_b == 0) return 0.0;
  const double denom = std::sqrt(static_cast<double>(norm_a) * static_cast<double>(norm_b));
  return detail::clamp_to(static_cast<double>(dot) / denom, 0.0, 1.0);
}

/// tokenize(simple) -> remove_stopwords -> term_vectors -> cosine.
inline MetricScore tf_cosine(std::string_view a_text, std::string_view b_text,
                             const StopwordList& stopwords = StopwordList::english()) {
  const TokenSequence a = remove_stopwords(tokenize(a_text), stopwords);
  const TokenSequence b = remove_stopwords(tokenize(b_text), stopwords);
  auto score = detail::make_score("tf_cosine", count_cosine(term_vectors(a, b)),
                                  Scale::unit_interval,
                                  config_token("tf_cosine;tokenize=simple;stopwords"));
  if (a.empty() && b.empty()) {
    score.warning = true;
    score.warning_message = "both term vectors empty";
  }
  return score;
}

}  // namespace rtqe

#endif  // RTQE_METRICS_TF_COSINE_HPP
