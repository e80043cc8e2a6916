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

// Statistics over per-record scores: z-normalization, Pearson correlation,
// correlation reports, failure-mode detectors and grouped distributions.

#ifndef RTQE_ANALYSIS_HPP
#define RTQE_ANALYSIS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/dataset.hpp"
#include "rtqe/error.hpp"
#include "rtqe/format.hpp"
#include "rtqe/metrics/bleu.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

// ---------------------------------------------------------------------------
// z-normalization and correlation
// ---------------------------------------------------------------------------

/// Standardized series plus the parameters used. Population std.
struct ZSeries {
  std::vector<double> values;
  double mean_used = 0.0;
  double std_used = 0.0;
  bool degenerate = false;  // constant input; values are all zero
};

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

inline double population_std(std::span<const double> xs, double mu) {
  double ss = 0.0;
  for (double x : xs) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(xs.size()));
}

inline ZSeries z_normalize(std::span<const double> xs) {
  if (xs.size() < 2) throw TooFewValues(xs.size(), 2);
  ZSeries z;
  z.mean_used = mean(xs);
  z.std_used = population_std(xs, z.mean_used);
  z.values.assign(xs.size(), 0.0);
  if (z.std_used == 0.0) {
    z.degenerate = true;
    return z;
  }
  for (std::size_t i = 0; i < xs.size(); ++i) z.values[i] = (xs[i] - z.mean_used) / z.std_used;
  return z;
}

/// Product-moment correlation, clamped to [-1, 1].
inline double pearson_r(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw LengthMismatch(xs.size(), ys.size());
  if (xs.size() < 2) throw TooFewValues(xs.size(), 2);
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConstantSeries();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// ---------------------------------------------------------------------------
// Correlation report
// ---------------------------------------------------------------------------

/// A named per-record score column. NaN marks a missing value.
struct MetricColumn {
  std::string metric_id;
  std::vector<double> values;
};

struct CorrelationCell {
  std::optional<double> r;  // nullopt when undefined
  std::size_t n = 0;        // pairs used after dropping missing values
  std::string reason;       // why r is undefined
};

/// Labels are {"human"} followed by the metrics in the order given. The matrix
/// is symmetric with a unit diagonal.
struct CorrelationReport {
  std::vector<std::string> labels;
  std::vector<std::vector<CorrelationCell>> matrix;
  std::vector<std::size_t> excluded;  // missing values per label
  std::size_t n = 0;                  // record count

  std::optional<double> per_metric(std::string_view metric_id) const {
    for (std::size_t i = 1; i < labels.size(); ++i)
      if (labels[i] == metric_id) return matrix[0][i].r;
    return std::nullopt;
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["n"] = n;
    j["labels"] = labels;
    nlohmann::ordered_json per = nlohmann::ordered_json::object();
    for (std::size_t i = 1; i < labels.size(); ++i)
      per[labels[i]] = matrix[0][i].r ? nlohmann::ordered_json(*matrix[0][i].r) : nlohmann::ordered_json();
    j["per_metric"] = per;
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    nlohmann::ordered_json counts = nlohmann::ordered_json::array();
    nlohmann::ordered_json undefined = nlohmann::ordered_json::array();
    for (std::size_t a = 0; a < labels.size(); ++a) {
      nlohmann::ordered_json row = nlohmann::ordered_json::array();
      nlohmann::ordered_json count_row = nlohmann::ordered_json::array();
      for (std::size_t b = 0; b < labels.size(); ++b) {
        const auto& cell = matrix[a][b];
        row.push_back(cell.r ? nlohmann::ordered_json(*cell.r) : nlohmann::ordered_json());
        count_row.push_back(cell.n);
        if (!cell.r && a < b)
          undefined.push_back({{"a", labels[a]}, {"b", labels[b]}, {"reason", cell.reason}});
      }
      rows.push_back(row);
      counts.push_back(count_row);
    }
    j["matrix"] = rows;
    j["pairwise_n"] = counts;
    nlohmann::ordered_json excl = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < labels.size(); ++i) excl[labels[i]] = excluded[i];
    j["excluded"] = excl;
    j["undefined"] = undefined;
    return j;
  }

  /// Aligned matrix, 4 decimals, "NA" for undefined cells.
  std::string to_tsv() const {
    std::size_t width = 6;
    for (const auto& l : labels) width = std::max(width, l.size());
    auto pad = [&](std::string s) {
      s.resize(std::max(s.size(), width), ' ');
      return s;
    };
    std::string out = pad("metric");
    for (const auto& l : labels) out += '\t' + pad(l);
    out += '\n';
    for (std::size_t a = 0; a < labels.size(); ++a) {
      out += pad(labels[a]);
      for (std::size_t b = 0; b < labels.size(); ++b) {
        const auto& cell = matrix[a][b];
        out += '\t' + pad(cell.r ? format_fixed(*cell.r, 4) : "NA");
      }
      out += '\n';
    }
    return out;
  }
};

/// Correlates each metric column with the records' human z_mean and with each
/// other. Missing (NaN) values are dropped pairwise; cells that cannot be
/// computed are marked undefined instead of failing the report.
inline CorrelationReport correlate(const QEDataset& ds, const std::vector<MetricColumn>& metrics) {
  std::vector<const std::vector<double>*> cols;
  std::vector<double> human;
  human.reserve(ds.size());
  for (const auto& rec : ds.records()) human.push_back(rec.z_mean);

  CorrelationReport report;
  report.n = ds.size();
  report.labels.push_back("human");
  cols.push_back(&human);
  for (const auto& m : metrics) {
    if (m.values.size() != ds.size()) throw LengthMismatch(m.values.size(), ds.size());
    report.labels.push_back(m.metric_id);
    cols.push_back(&m.values);
  }

  const std::size_t k = cols.size();
  report.excluded.assign(k, 0);
  for (std::size_t c = 0; c < k; ++c)
    for (double v : *cols[c])
      if (!std::isfinite(v)) ++report.excluded[c];

  report.matrix.assign(k, std::vector<CorrelationCell>(k));
  std::vector<double> xs, ys;
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = a; b < k; ++b) {
      xs.clear();
      ys.clear();
      for (std::size_t i = 0; i < ds.size(); ++i) {
        const double x = (*cols[a])[i];
        const double y = (*cols[b])[i];
        if (std::isfinite(x) && std::isfinite(y)) {
          xs.push_back(x);
          ys.push_back(y);
        }
      }
      CorrelationCell cell;
      cell.n = xs.size();
      if (a == b) {
        cell.r = 1.0;
      } else {
        try {
          cell.r = pearson_r(xs, ys);
        } catch (const MathError& e) {
          cell.reason = e.what();
        }
      }
      report.matrix[a][b] = cell;
      report.matrix[b][a] = cell;
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Failure-mode detectors
// ---------------------------------------------------------------------------

inline constexpr double kFailedForwardBleu = 95.0;

struct FailedForward {
  bool flag = false;
  double bleu = 0.0;
};

/// A forward translation that copies its source scores BLEU > 95 against it.
/// Both sides use `simple` tokenization and the default BLEU settings.
inline FailedForward detect_failed_forward(std::string_view original,
                                           std::string_view translation,
                                           const BleuConfig& cfg = {}) {
  const double b = sentence_bleu(tokenize(translation), tokenize(original), cfg).value;
  return {b > kFailedForwardBleu, b};
}

struct CodeSwitch {
  bool flag = false;
  std::set<std::string> scripts;
};

inline CodeSwitch detect_code_switch(std::string_view text) {
  ScriptProfile p = detect_scripts(text);
  return {p.mixed, std::move(p.scripts)};
}

struct FailureFlags {
  std::size_t record_id = 0;
  bool failed_forward = false;
  bool code_switched = false;
  double bleu_src_vs_mt = 0.0;
  std::set<std::string> scripts;
};

/// Failed-forward is judged on (original, translation); code switching on the
/// original sentence.
inline FailureFlags flag_record(const QERecord& rec, const BleuConfig& cfg = {}) {
  const auto ff = detect_failed_forward(rec.original, rec.translation, cfg);
  auto cs = detect_code_switch(rec.original);
  return {rec.id, ff.flag, cs.flag, ff.bleu, std::move(cs.scripts)};
}

// ---------------------------------------------------------------------------
// Grouped distributions
// ---------------------------------------------------------------------------

inline constexpr double kHistogramBinWidth = 0.25;

/// Summary of one group. Statistics are nullopt for an empty group.
struct GroupSummary {
  std::size_t count = 0;
  std::optional<double> mean, std, min, q1, median, q3, max;
};

struct HistogramBin {
  double left = 0.0;
  std::size_t count_flagged = 0;
  std::size_t count_unflagged = 0;
};

struct GroupDistribution {
  GroupSummary flagged;
  GroupSummary unflagged;
  std::vector<HistogramBin> bins;

  /// `bin_left,count_flagged,count_unflagged` rows with a header.
  std::string to_csv() const {
    std::string out = "bin_left,count_flagged,count_unflagged\n";
    for (const auto& b : bins)
      out += format_double(b.left) + ',' + std::to_string(b.count_flagged) + ',' +
             std::to_string(b.count_unflagged) + '\n';
    return out;
  }
};

namespace detail {

/// Linear interpolation between closest ranks; `sorted` is non-empty.
inline double quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline GroupSummary summarize(std::vector<double> xs) {
  GroupSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  const double mu = mean(xs);
  s.mean = mu;
  s.std = population_std(xs, mu);
  s.min = xs.front();
  s.max = xs.back();
  s.q1 = quantile(xs, 0.25);
  s.median = quantile(xs, 0.5);
  s.q3 = quantile(xs, 0.75);
  return s;
}

}  // namespace detail

/// Splits z by flag and bins both groups on a shared 0.25-wide grid aligned to
/// multiples of the width. Non-finite values are ignored.
inline GroupDistribution group_distribution(std::span<const double> z,
                                            const std::vector<bool>& flags) {
  if (z.size() != flags.size()) throw LengthMismatch(z.size(), flags.size());
  std::vector<double> in, out;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!std::isfinite(z[i])) continue;
    (flags[i] ? in : out).push_back(z[i]);
  }

  GroupDistribution d;
  d.flagged = detail::summarize(in);
  d.unflagged = detail::summarize(out);
  if (in.empty() && out.empty()) return d;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double v : in) lo = std::min(lo, v), hi = std::max(hi, v);
  for (double v : out) lo = std::min(lo, v), hi = std::max(hi, v);
  const double w = kHistogramBinWidth;
  const double start = std::floor(lo / w) * w;
  const auto bin_of = [&](double v) {
    return static_cast<std::size_t>(std::floor((v - start) / w));
  };
  const std::size_t nbins = bin_of(hi) + 1;
  d.bins.resize(nbins);
  for (std::size_t b = 0; b < nbins; ++b) d.bins[b].left = start + w * static_cast<double>(b);
  for (double v : in) ++d.bins[bin_of(v)].count_flagged;
  for (double v : out) ++d.bins[bin_of(v)].count_unflagged;
  return d;
}

}  // namespace rtqe

#endif  // RTQE_ANALYSIS_HPP
