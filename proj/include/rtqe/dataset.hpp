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

// Sentence-level QE datasets with human direct-assessment scores.
//
// File dialect: UTF-8, one record per line, six tab-separated columns:
//
//   original  translation  [s1, s2, ...]  mean  [z1, z2, ...]  z_mean
//
// An optional header is recognized by a first line whose third column does
// not start with '['. An empty z-score list means "no per-annotator z-scores".

#ifndef RTQE_DATASET_HPP
#define RTQE_DATASET_HPP

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rtqe/error.hpp"
#include "rtqe/format.hpp"
#include "rtqe/text.hpp"

namespace rtqe {

inline constexpr double kMeanTolerance = 1e-6;
inline constexpr std::size_t kQEColumns = 6;

/// Two-letter ISO-639-1 codes.
struct LanguagePair {
  std::string source;
  std::string target;

  static bool valid_code(std::string_view code) {
    return code.size() == 2 && code[0] >= 'a' && code[0] <= 'z' && code[1] >= 'a' &&
           code[1] <= 'z';
  }

  void validate() const {
    if (!valid_code(source) || !valid_code(target))
      throw ConfigError("language codes must be two lowercase letters, got '" + source +
                        "'/'" + target + "'");
  }

  friend bool operator==(const LanguagePair&, const LanguagePair&) = default;
};

struct QERecord {
  std::size_t id = 0;
  std::string original;
  std::string translation;
  std::vector<double> raw_scores;
  double mean_score = 0.0;
  std::vector<double> z_scores;
  double z_mean = 0.0;

  friend bool operator==(const QERecord&, const QERecord&) = default;
};

/// Immutable once built; safe to share between readers.
class QEDataset {
 public:
  QEDataset() = default;
  QEDataset(LanguagePair pair, std::vector<QERecord> records)
      : pair_(std::move(pair)), records_(std::move(records)) {}

  const LanguagePair& language_pair() const noexcept { return pair_; }
  const std::vector<QERecord>& records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  bool empty() const noexcept { return records_.empty(); }
  const QERecord& operator[](std::size_t i) const { return records_[i]; }

  friend bool operator==(const QEDataset&, const QEDataset&) = default;

 private:
  LanguagePair pair_;
  std::vector<QERecord> records_;
};

// ---------------------------------------------------------------------------
// Validation reporting
// ---------------------------------------------------------------------------

enum class RowErrorKind {
  malformed_row,
  encoding,
  empty_input,
  empty_field,
  empty_scores,
  out_of_range,
  mean_mismatch,
  z_mean_mismatch,
  length_mismatch,
  id_not_dense,
};

inline std::string_view kind_name(RowErrorKind k) {
  switch (k) {
    case RowErrorKind::malformed_row: return "MalformedRow";
    case RowErrorKind::encoding: return "EncodingError";
    case RowErrorKind::empty_input: return "EmptyInput";
    case RowErrorKind::empty_field: return "EmptyField";
    case RowErrorKind::empty_scores: return "EmptyScores";
    case RowErrorKind::out_of_range: return "OutOfRange";
    case RowErrorKind::mean_mismatch: return "MeanMismatch";
    case RowErrorKind::z_mean_mismatch: return "ZMeanMismatch";
    case RowErrorKind::length_mismatch: return "LengthMismatch";
    case RowErrorKind::id_not_dense: return "IdNotDense";
  }
  return "Unknown";
}

struct RowError {
  std::size_t row = 0;
  RowErrorKind kind = RowErrorKind::malformed_row;
  std::optional<std::size_t> column;  // 0-based, when one column is at fault
  std::string message;
};

/// Invariant: accepted_count + rejected_count == rows seen.
struct ValidationReport {
  std::vector<RowError> row_errors;
  std::size_t accepted_count = 0;
  std::size_t rejected_count = 0;

  nlohmann::json to_json() const {
    nlohmann::json errors = nlohmann::json::array();
    for (const auto& e : row_errors)
      errors.push_back({{"row", e.row}, {"kind", kind_name(e.kind)}, {"message", e.message}});
    return {{"accepted", accepted_count}, {"rejected", rejected_count}, {"errors", errors}};
  }

  /// One `row<TAB>kind<TAB>message` line per error.
  std::string to_text() const {
    std::string out;
    for (const auto& e : row_errors) {
      out += std::to_string(e.row);
      out += '\t';
      out += kind_name(e.kind);
      out += '\t';
      out += e.message;
      out += '\n';
    }
    return out;
  }
};

/// Thrown by strict parsing. `row` is the 0-based data-row index.
class DatasetError : public DataError {
 public:
  DatasetError(RowErrorKind kind, std::size_t row, std::optional<std::size_t> column,
               const std::string& message)
      : DataError(std::string(kind_name(kind)) + " at row " + std::to_string(row) +
                  (column ? ", column " + std::to_string(*column) : std::string()) +
                  ": " + message),
        kind_(kind),
        row_(row),
        column_(column) {}

  RowErrorKind kind() const noexcept { return kind_; }
  std::size_t row() const noexcept { return row_; }
  std::optional<std::size_t> column() const noexcept { return column_; }

 private:
  RowErrorKind kind_;
  std::size_t row_;
  std::optional<std::size_t> column_;
};

// ---------------------------------------------------------------------------
// Record invariants
// ---------------------------------------------------------------------------

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline bool in_da_range(double v) { return v >= 0.0 && v <= 100.0; }

}  // namespace detail

/// All invariant violations of one record; `row` is copied into each finding.
inline std::vector<RowError> check_record(const QERecord& rec, std::size_t row) {
  std::vector<RowError> out;
  auto add = [&](RowErrorKind kind, std::optional<std::size_t> column, std::string msg) {
    out.push_back({row, kind, column, std::move(msg)});
  };

  if (trim(rec.original).empty()) add(RowErrorKind::empty_field, 0, "original is empty");
  if (trim(rec.translation).empty())
    add(RowErrorKind::empty_field, 1, "translation is empty");

  if (rec.raw_scores.empty()) {
    add(RowErrorKind::empty_scores, 2, "score list is empty");
  } else {
    for (double s : rec.raw_scores) {
      if (!detail::in_da_range(s)) {
        add(RowErrorKind::out_of_range, 2, "score " + format_double(s) + " outside [0, 100]");
        break;
      }
    }
    const double expected = detail::mean_of(rec.raw_scores);
    if (std::abs(expected - rec.mean_score) > kMeanTolerance)
      add(RowErrorKind::mean_mismatch, 3,
          "mean " + format_double(rec.mean_score) + " but scores average " +
              format_double(expected));
  }
  if (!detail::in_da_range(rec.mean_score))
    add(RowErrorKind::out_of_range, 3,
        "mean " + format_double(rec.mean_score) + " outside [0, 100]");

  if (!rec.z_scores.empty()) {
    if (rec.z_scores.size() != rec.raw_scores.size()) {
      add(RowErrorKind::length_mismatch, 4,
          std::to_string(rec.z_scores.size()) + " z-scores for " +
              std::to_string(rec.raw_scores.size()) + " scores");
    }
    const double expected = detail::mean_of(rec.z_scores);
    if (std::abs(expected - rec.z_mean) > kMeanTolerance)
      add(RowErrorKind::z_mean_mismatch, 5,
          "z_mean " + format_double(rec.z_mean) + " but z-scores average " +
              format_double(expected));
  }
  return out;
}

/// Re-checks every record invariant plus id density. Idempotent; findings are
/// reported, never thrown.
inline ValidationReport validate_dataset(const QEDataset& ds) {
  ValidationReport report;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const QERecord& rec = ds[i];
    auto findings = check_record(rec, i);
    if (rec.id != i)
      findings.push_back({i, RowErrorKind::id_not_dense, std::nullopt,
                          "record id " + std::to_string(rec.id) + " at position " +
                              std::to_string(i)});
    if (findings.empty()) {
      ++report.accepted_count;
    } else {
      ++report.rejected_count;
      for (auto& f : findings) report.row_errors.push_back(std::move(f));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

enum class ParseMode { strict, lenient };

struct ParseResult {
  QEDataset dataset;
  ValidationReport report;
};

namespace detail {

/// "[70, 85, 90]" -> {70, 85, 90}; "[]" -> {}.
inline std::optional<std::vector<double>> parse_score_list(std::string_view field) {
  field = trim(field);
  if (field.size() < 2 || field.front() != '[' || field.back() != ']') return std::nullopt;
  std::string_view inner = trim(field.substr(1, field.size() - 2));
  std::vector<double> out;
  if (inner.empty()) return out;
  for (auto part : split(inner, ',')) {
    auto v = parse_double(part);
    if (!v) return std::nullopt;
    out.push_back(*v);
  }
  return out;
}

inline bool looks_like_header(std::string_view line) {
  auto cols = split(line, '\t');
  return cols.size() >= 3 && !trim(cols[2]).starts_with('[');
}

/// Parses one data line. Structural problems yield a single error.
inline std::optional<RowError> parse_row(std::string_view line, std::size_t row,
                                         QERecord& rec) {
  if (!is_valid_utf8(line))
    return RowError{row, RowErrorKind::encoding, std::nullopt, "invalid UTF-8"};
  auto cols = split(line, '\t');
  if (cols.size() != kQEColumns)
    return RowError{row, RowErrorKind::malformed_row, std::nullopt,
                    "expected 6 columns, found " + std::to_string(cols.size())};

  rec.original = std::string(cols[0]);
  rec.translation = std::string(cols[1]);
  auto scores = parse_score_list(cols[2]);
  if (!scores)
    return RowError{row, RowErrorKind::malformed_row, 2, "unparseable score list"};
  auto mean = parse_double(cols[3]);
  if (!mean) return RowError{row, RowErrorKind::malformed_row, 3, "unparseable mean"};
  auto zs = parse_score_list(cols[4]);
  if (!zs) return RowError{row, RowErrorKind::malformed_row, 4, "unparseable z-score list"};
  auto z_mean = parse_double(cols[5]);
  if (!z_mean) return RowError{row, RowErrorKind::malformed_row, 5, "unparseable z_mean"};
  rec.raw_scores = std::move(*scores);
  rec.mean_score = *mean;
  rec.z_scores = std::move(*zs);
  rec.z_mean = *z_mean;
  return std::nullopt;
}

}  // namespace detail

/// Strict mode throws DatasetError on the first bad row (and EmptyInput when no
/// data rows exist). Lenient mode skips bad rows and reports them. Accepted
/// records get dense ids in input order.
inline ParseResult parse_qe_tsv(std::istream& in, const LanguagePair& pair,
                                ParseMode mode = ParseMode::strict) {
  pair.validate();
  std::vector<QERecord> records;
  ValidationReport report;
  std::string line;
  std::size_t row = 0;
  bool first_line = true;

  auto reject = [&](RowError err) {
    if (mode == ParseMode::strict)
      throw DatasetError(err.kind, err.row, err.column, err.message);
    ++report.rejected_count;
    report.row_errors.push_back(std::move(err));
  };

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (first_line) {
      first_line = false;
      if (line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
      if (is_valid_utf8(line) && detail::looks_like_header(line)) continue;
    }
    const std::size_t this_row = row++;
    QERecord rec;
    if (auto err = detail::parse_row(line, this_row, rec)) {
      reject(std::move(*err));
      continue;
    }
    auto findings = check_record(rec, this_row);
    if (!findings.empty()) {
      if (mode == ParseMode::strict) reject(std::move(findings.front()));
      ++report.rejected_count;
      for (auto& f : findings) report.row_errors.push_back(std::move(f));
      continue;
    }
    rec.id = records.size();
    records.push_back(std::move(rec));
    ++report.accepted_count;
  }

  if (row == 0 && mode == ParseMode::strict)
    throw DatasetError(RowErrorKind::empty_input, 0, std::nullopt, "no data rows");
  return {QEDataset(pair, std::move(records)), std::move(report)};
}

inline ParseResult parse_qe_tsv(std::string_view text, const LanguagePair& pair,
                                ParseMode mode = ParseMode::strict) {
  std::istringstream in{std::string(text)};
  return parse_qe_tsv(in, pair, mode);
}

inline ParseResult load_qe_file(const std::filesystem::path& path, const LanguagePair& pair,
                                ParseMode mode = ParseMode::strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset: " + path.string());
  return parse_qe_tsv(in, pair, mode);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_score_list(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += format_double(xs[i]);
  }
  out += ']';
  return out;
}

}  // namespace detail

/// Writes the dataset in the input dialect, without a header. Numbers use the
/// shortest round-trip representation, so re-parsing is lossless.
inline void write_qe_tsv(std::ostream& out, const QEDataset& ds) {
  for (const auto& rec : ds.records()) {
    if (rec.original.find_first_of("\t\n") != std::string::npos ||
        rec.translation.find_first_of("\t\n") != std::string::npos)
      throw DataError("record " + std::to_string(rec.id) +
                      " contains a tab or newline and cannot be written as TSV");
    out << rec.original << '\t' << rec.translation << '\t'
        << detail::format_score_list(rec.raw_scores) << '\t' << format_double(rec.mean_score)
        << '\t' << detail::format_score_list(rec.z_scores) << '\t'
        << format_double(rec.z_mean) << '\n';
  }
}

inline std::string to_qe_tsv(const QEDataset& ds) {
  std::ostringstream os;
  write_qe_tsv(os, ds);
  return os.str();
}

}  // namespace rtqe

#endif  // RTQE_DATASET_HPP
