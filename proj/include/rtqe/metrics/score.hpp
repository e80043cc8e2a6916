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

#ifndef RTQE_METRICS_SCORE_HPP
#define RTQE_METRICS_SCORE_HPP

#include <algorithm>
#include <string>
#include <string_view>

namespace rtqe {

enum class Scale {
  unit_interval,  // [0, 1]
  signed_unit,    // [-1, 1]
  percent,        // [0, 100]
};

inline std::string_view scale_name(Scale s) {
  switch (s) {
    case Scale::unit_interval: return "unit_interval";
    case Scale::signed_unit: return "signed_unit";
    case Scale::percent: return "percent";
  }
  return "unknown";
}

/// A named similarity value. `warning` marks a degenerate input (empty
/// hypothesis, empty reference, ...) that was scored by convention.
struct MetricScore {
  std::string metric_id;
  double value = 0.0;
  Scale scale = Scale::unit_interval;
  std::string config_hash;
  // TER counts edits per reference token and may legitimately exceed 1.
  bool unbounded_above = false;
  bool warning = false;
  std::string warning_message;

  double lower_bound() const { return scale == Scale::signed_unit ? -1.0 : 0.0; }
  double upper_bound() const { return scale == Scale::percent ? 100.0 : 1.0; }

  bool within_bounds() const {
    if (value < lower_bound()) return false;
    return unbounded_above || value <= upper_bound();
  }
};

namespace detail {

inline MetricScore make_score(std::string id, double value, Scale scale,
                              std::string config_hash) {
  MetricScore s;
  s.metric_id = std::move(id);
  s.value = value;
  s.scale = scale;
  s.config_hash = std::move(config_hash);
  return s;
}

inline double clamp_to(double v, double lo, double hi) {
  return std::clamp(v, lo, hi);
}

}  // namespace detail

}  // namespace rtqe

#endif  // RTQE_METRICS_SCORE_HPP
