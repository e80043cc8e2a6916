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

// Translation edit rate: word-level Levenshtein distance after a greedy
// block-shift phase. Each applied shift costs one edit.

#ifndef RTQE_METRICS_TER_HPP
#define RTQE_METRICS_TER_HPP

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "rtqe/hash.hpp"
#include "rtqe/metrics/score.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

/// Uniform-cost insert/delete/substitute distance. `row` is scratch space.
template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b,
                        std::vector<std::size_t>& row) {
  row.resize(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      const std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({sub, up + 1, row[j - 1] + 1});
      diag = up;
    }
  }
  return row[b.size()];
}

template <typename T>
std::size_t levenshtein(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> row;
  return levenshtein(a, b, row);
}

/// Moves hyp[from, from + len) so that it starts at index `to` of the
/// sequence that remains after removing the block.
template <typename T>
void apply_shift(const std::vector<T>& src, std::size_t from, std::size_t len,
                 std::size_t to, std::vector<T>& out) {
  out.clear();
  out.reserve(src.size());
  std::size_t rest_index = 0;
  auto emit_block = [&] {
    out.insert(out.end(), src.begin() + from, src.begin() + from + len);
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (i >= from && i < from + len) continue;
    if (rest_index == to) emit_block();
    out.push_back(src[i]);
    ++rest_index;
  }
  if (rest_index == to) emit_block();
}

struct TerAlignment {
  std::size_t shifts = 0;
  std::size_t edit_distance = 0;  // after shifting
  std::size_t edits() const { return shifts + edit_distance; }
};

/// Greedy shift search. Each round evaluates every (block, destination) pair
/// and applies the one with the largest edit-distance reduction. Ties prefer
/// the longest block, then the leftmost origin, then the leftmost destination.
/// Stops when no shift reduces the distance.
template <typename T>
TerAlignment ter_alignment(std::span<const T> hyp, std::span<const T> ref) {
  std::vector<std::size_t> row;
  std::vector<T> current(hyp.begin(), hyp.end());
  std::vector<T> candidate;
  std::vector<T> best_candidate;

  TerAlignment result;
  result.edit_distance = levenshtein(std::span<const T>(current), ref, row);
  while (result.edit_distance > 0 && current.size() > 1) {
    const std::size_t n = current.size();
    std::size_t best_distance = result.edit_distance;
    for (std::size_t len = n - 1; len >= 1; --len) {
      for (std::size_t from = 0; from + len <= n; ++from) {
        for (std::size_t to = 0; to + len <= n; ++to) {
          if (to == from) continue;
          apply_shift(current, from, len, to, candidate);
          const std::size_t d = levenshtein(std::span<const T>(candidate), ref, row);
          if (d < best_distance) {
            best_distance = d;
            best_candidate.swap(candidate);
          }
        }
      }
    }
    if (best_distance >= result.edit_distance) break;
    current.swap(best_candidate);
    result.edit_distance = best_distance;
    ++result.shifts;
  }
  return result;
}

/// Edits per reference token. An empty reference with a non-empty hypothesis
/// is scored as edits / 1.
template <typename T>
double ter_value(std::span<const T> hyp, std::span<const T> ref) {
  const TerAlignment a = ter_alignment(hyp, ref);
  const std::size_t denom = ref.empty() ? 1 : ref.size();
  return static_cast<double>(a.edits()) / static_cast<double>(denom);
}

/// Inputs are expected to be `simple`-tokenized.
inline MetricScore ter(const TokenSequence& hyp, const TokenSequence& ref) {
  // Intern tokens so the shift search compares integers.
  std::unordered_map<std::string, int> ids;
  auto intern = [&](const TokenSequence& ts) {
    std::vector<int> out;
    out.reserve(ts.size());
    for (const auto& tok : ts.tokens)
      out.push_back(ids.try_emplace(tok, static_cast<int>(ids.size())).first->second);
    return out;
  };
  const std::vector<int> h = intern(hyp);
  const std::vector<int> r = intern(ref);

  auto score = detail::make_score(
      "ter", ter_value(std::span<const int>(h), std::span<const int>(r)),
      Scale::unit_interval, config_token("ter;shifts=greedy;tiebreak=longest,leftmost"));
  score.unbounded_above = true;
  if (ref.empty() && !hyp.empty()) {
    score.warning = true;
    score.warning_message = "empty reference; edits divided by 1";
  }
  return score;
}

}  // namespace rtqe

#endif  // RTQE_METRICS_TER_HPP
