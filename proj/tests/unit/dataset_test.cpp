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

#include "rtqe/dataset.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

namespace rtqe {
namespace {

const LanguagePair kEnDe{"en", "de"};

TEST(ParseQeTsv, SingleRow) {
  auto r = parse_qe_tsv("Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\t0.6\n", kEnDe);
  ASSERT_EQ(r.dataset.size(), 1u);
  const auto& rec = r.dataset[0];
  EXPECT_EQ(rec.id, 0u);
  EXPECT_EQ(rec.original, "Hello");
  EXPECT_EQ(rec.translation, "Hallo");
  EXPECT_EQ(rec.raw_scores, (std::vector<double>{80, 90}));
  EXPECT_EQ(rec.mean_score, 85.0);
  EXPECT_EQ(rec.z_scores, (std::vector<double>{0.5, 0.7}));
  EXPECT_EQ(rec.z_mean, 0.6);
  EXPECT_EQ(r.report.accepted_count, 1u);
  EXPECT_EQ(r.report.rejected_count, 0u);
  EXPECT_EQ(r.dataset.language_pair(), kEnDe);
}

TEST(ParseQeTsv, WrongColumnCountStrict) {
  try {
    parse_qe_tsv("Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\n", kEnDe);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), RowErrorKind::malformed_row);
    EXPECT_EQ(e.row(), 0u);
  }
}

TEST(ParseQeTsv, UnparseableNumberReportsColumn) {
  try {
    parse_qe_tsv("a\tb\t[80, x]\t85\t[]\t0\n", kEnDe);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), RowErrorKind::malformed_row);
    EXPECT_EQ(e.column(), 2u);
  }
  try {
    parse_qe_tsv("a\tb\t[80]\t80\t[]\tabc\n", kEnDe);
    FAIL() << "expected DatasetError";
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.column(), 5u);
  }
}

TEST(ParseQeTsv, MeanMismatchLenient) {
  auto r = parse_qe_tsv(
      "ok\tgut\t[80, 90]\t85\t[]\t0\n"
      "bad\tschlecht\t[80, 90]\t50\t[]\t0\n",
      kEnDe, ParseMode::lenient);
  ASSERT_EQ(r.dataset.size(), 1u);
  EXPECT_EQ(r.report.accepted_count, 1u);
  EXPECT_EQ(r.report.rejected_count, 1u);
  ASSERT_EQ(r.report.row_errors.size(), 1u);
  EXPECT_EQ(r.report.row_errors[0].kind, RowErrorKind::mean_mismatch);
  EXPECT_EQ(r.report.row_errors[0].row, 1u);
}

TEST(ParseQeTsv, MeanWithinToleranceAccepted) {
  auto r = parse_qe_tsv("a\tb\t[1, 2]\t1.5000005\t[]\t0\n", kEnDe);
  EXPECT_EQ(r.dataset.size(), 1u);
  EXPECT_THROW(parse_qe_tsv("a\tb\t[1, 2]\t1.500002\t[]\t0\n", kEnDe), DatasetError);
}

TEST(ParseQeTsv, HeaderSkipped) {
  auto r = parse_qe_tsv(
      "original\ttranslation\tscores\tmean\tz_scores\tz_mean\n"
      "Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\t0.6\n",
      kEnDe);
  ASSERT_EQ(r.dataset.size(), 1u);
  EXPECT_EQ(r.dataset[0].original, "Hello");
}

TEST(ParseQeTsv, CrlfAndBom) {
  auto r = parse_qe_tsv("\xEF\xBB\xBFHello\tHallo\t[80]\t80\t[0.1]\t0.1\r\n", kEnDe);
  ASSERT_EQ(r.dataset.size(), 1u);
  EXPECT_EQ(r.dataset[0].original, "Hello");
  EXPECT_EQ(r.dataset[0].z_mean, 0.1);
}

TEST(ParseQeTsv, EmptyInput) {
  try {
    parse_qe_tsv("", kEnDe);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), RowErrorKind::empty_input);
  }
  EXPECT_THROW(parse_qe_tsv("original\ttranslation\tscores\tmean\tz\tzm\n", kEnDe), DatasetError);
  EXPECT_TRUE(parse_qe_tsv("", kEnDe, ParseMode::lenient).dataset.empty());
}

TEST(ParseQeTsv, InvalidUtf8) {
  try {
    parse_qe_tsv("ok\tgut\t[80]\t80\t[]\t0\nbad\xff\tx\t[80]\t80\t[]\t0\n", kEnDe);
    FAIL();
  } catch (const DatasetError& e) {
    EXPECT_EQ(e.kind(), RowErrorKind::encoding);
    EXPECT_EQ(e.row(), 1u);
  }
  auto r = parse_qe_tsv("bad\xff\tx\t[80]\t80\t[]\t0\n", kEnDe, ParseMode::lenient);
  EXPECT_EQ(r.report.rejected_count, 1u);
  EXPECT_EQ(r.report.row_errors[0].kind, RowErrorKind::encoding);
}

TEST(ParseQeTsv, InvariantViolations) {
  auto r = parse_qe_tsv(
      " \tx\t[80]\t80\t[]\t0\n"           // empty original
      "a\tb\t[]\t0\t[]\t0\n"              // no scores
      "a\tb\t[120]\t120\t[]\t0\n"         // out of range
      "a\tb\t[80, 90]\t85\t[0.1]\t0.1\n"  // z length mismatch
      "a\tb\t[80]\t80\t[0.1]\t0.5\n",     // z mean mismatch
      kEnDe, ParseMode::lenient);
  EXPECT_TRUE(r.dataset.empty());
  EXPECT_EQ(r.report.rejected_count, 5u);
  std::vector<RowErrorKind> kinds;
  for (const auto& e : r.report.row_errors) kinds.push_back(e.kind);
  EXPECT_EQ(kinds, (std::vector<RowErrorKind>{
                       RowErrorKind::empty_field, RowErrorKind::empty_scores,
                       RowErrorKind::out_of_range, RowErrorKind::out_of_range,
                       RowErrorKind::length_mismatch, RowErrorKind::z_mean_mismatch}));
}

TEST(ParseQeTsv, BadLanguageCode) {
  EXPECT_THROW(parse_qe_tsv("", LanguagePair{"eng", "de"}, ParseMode::lenient), ConfigError);
}

TEST(ParseQeTsv, StrictPreservesOrderAndIds) {
  auto r = parse_qe_tsv(
      "one\teins\t[10]\t10\t[]\t0\n"
      "two\tzwei\t[20]\t20\t[]\t0\n"
      "three\tdrei\t[30]\t30\t[]\t0\n",
      kEnDe);
  ASSERT_EQ(r.dataset.size(), 3u);
  const char* expected[] = {"one", "two", "three"};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(r.dataset[i].id, i);
    EXPECT_EQ(r.dataset[i].original, expected[i]);
  }
}

// Random datasets, some rows deliberately malformed.
struct Generated {
  std::string all_rows;
  std::string good_rows;
};

Generated generate(std::mt19937& rng, int rows) {
  Generated g;
  const char* words[] = {"Hallo", "Welt", "José", "猿狖", "the", "cat", "Gasset"};
  for (int i = 0; i < rows; ++i) {
    std::string orig = words[rng() % 7], trans = words[rng() % 7];
    std::vector<double> scores;
    for (unsigned k = rng() % 4 + 1; k > 0; --k) scores.push_back(static_cast<double>(rng() % 101));
    double mean = 0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    std::string list = "[";
    for (std::size_t k = 0; k < scores.size(); ++k)
      list += (k ? ", " : "") + format_double(scores[k]);
    list += "]";
    std::string line;
    const bool bad = rng() % 4 == 0;
    switch (bad ? rng() % 3 : 99) {
      case 0: line = orig + "\t" + trans + "\t" + list + "\n"; break;
      case 1: line = orig + "\t" + trans + "\t" + list + "\t" + format_double(mean + 7) + "\t[]\t0\n"; break;
      case 2: line = orig + "\t" + trans + "\t" + list + "\tNaNx\t[]\t0\n"; break;
      default:
        line = orig + "\t" + trans + "\t" + list + "\t" + format_double(mean) + "\t[]\t" +
               format_double(static_cast<double>(rng() % 200) / 100.0 - 1.0) + "\n";
        g.good_rows += line;
    }
    g.all_rows += line;
  }
  return g;
}

TEST(ParseQeTsvProperty, LenientEqualsStrictOnCleanedInput) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = generate(rng, 1 + static_cast<int>(rng() % 12));
    auto lenient = parse_qe_tsv(g.all_rows, kEnDe, ParseMode::lenient);
    if (g.good_rows.empty()) {
      EXPECT_TRUE(lenient.dataset.empty());
      continue;
    }
    auto strict = parse_qe_tsv(g.good_rows, kEnDe, ParseMode::strict);
    EXPECT_EQ(lenient.dataset, strict.dataset);
    EXPECT_EQ(lenient.report.accepted_count + lenient.report.rejected_count,
              static_cast<std::size_t>(std::count(g.all_rows.begin(), g.all_rows.end(), '\n')));
  }
}

TEST(ParseQeTsvProperty, SerializeReparseRoundTrip) {
  std::mt19937 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = generate(rng, 1 + static_cast<int>(rng() % 12));
    if (g.good_rows.empty()) continue;
    auto first = parse_qe_tsv(g.good_rows, kEnDe);
    auto again = parse_qe_tsv(to_qe_tsv(first.dataset), kEnDe);
    EXPECT_EQ(first.dataset, again.dataset);
    EXPECT_EQ(to_qe_tsv(first.dataset), to_qe_tsv(again.dataset));
  }
}

TEST(WriteQeTsv, RejectsEmbeddedTabs) {
  QEDataset ds(kEnDe, {QERecord{0, "a\tb", "c", {1}, 1, {}, 0}});
  EXPECT_THROW(to_qe_tsv(ds), DataError);
}

TEST(ValidateDataset, CleanDataset) {
  auto r = parse_qe_tsv("Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\t0.6\n", kEnDe);
  auto report = validate_dataset(r.dataset);
  EXPECT_EQ(report.accepted_count, r.dataset.size());
  EXPECT_TRUE(report.row_errors.empty());
  // Idempotent.
  EXPECT_EQ(validate_dataset(r.dataset).to_json(), report.to_json());
}

TEST(ValidateDataset, EmptyTranslation) {
  auto rec = parse_qe_tsv("Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\t0.6\n", kEnDe).dataset[0];
  rec.translation = "  ";
  auto report = validate_dataset(QEDataset(kEnDe, {rec}));
  ASSERT_EQ(report.row_errors.size(), 1u);
  EXPECT_EQ(report.row_errors[0].kind, RowErrorKind::empty_field);
  EXPECT_EQ(report.rejected_count, 1u);
}

TEST(ValidateDataset, ShortZScores) {
  auto rec = parse_qe_tsv("Hello\tHallo\t[80, 90]\t85\t[0.5, 0.7]\t0.6\n", kEnDe).dataset[0];
  rec.z_scores = {0.6};
  auto report = validate_dataset(QEDataset(kEnDe, {rec}));
  ASSERT_EQ(report.row_errors.size(), 1u);
  EXPECT_EQ(report.row_errors[0].kind, RowErrorKind::length_mismatch);
}

TEST(ValidateDataset, IdsMustBeDense) {
  auto rec = parse_qe_tsv("Hello\tHallo\t[80]\t80\t[]\t0\n", kEnDe).dataset[0];
  rec.id = 4;
  auto report = validate_dataset(QEDataset(kEnDe, {rec}));
  ASSERT_EQ(report.row_errors.size(), 1u);
  EXPECT_EQ(report.row_errors[0].kind, RowErrorKind::id_not_dense);
}

TEST(ValidationReport, Serialization) {
  auto r = parse_qe_tsv("bad\tschlecht\t[80, 90]\t50\t[]\t0\n", kEnDe, ParseMode::lenient);
  auto j = r.report.to_json();
  EXPECT_EQ(j["accepted"], 0);
  EXPECT_EQ(j["rejected"], 1);
  EXPECT_EQ(j["errors"][0]["kind"], "MeanMismatch");
  EXPECT_EQ(j["errors"][0]["row"], 0);
  EXPECT_EQ(r.report.to_text().rfind("0\tMeanMismatch\t", 0), 0u);
}

}  // namespace
}  // namespace rtqe
