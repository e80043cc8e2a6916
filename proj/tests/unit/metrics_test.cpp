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

#include "rtqe/metrics.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"

namespace rtqe {
namespace {

using Tokens = std::vector<std::string>;

TokenSequence seq(Tokens t) { return {std::move(t), TokenScheme::simple}; }

BleuConfig no_smoothing(int max_n) { return {max_n, BleuSmoothing::none}; }

// --- BLEU ------------------------------------------------------------------

TEST(SentenceBleu, IdentityIsHundred) {
  auto s = sentence_bleu(seq({"the", "cat", "sat"}), seq({"the", "cat", "sat"}));
  EXPECT_EQ(s.value, 100.0);
  EXPECT_EQ(s.scale, Scale::percent);
  EXPECT_FALSE(s.warning);
}

TEST(SentenceBleu, DisjointWithoutSmoothingIsZero) {
  EXPECT_EQ(sentence_bleu(seq({"a", "b"}), seq({"c", "d"}), no_smoothing(4)).value, 0.0);
}

TEST(SentenceBleu, BrevityPenalty) {
  // p1 = 2/2, p2 = 1/1, BP = exp(1 - 3/2); value from tests/oracles/derived_values.py.
  auto s = sentence_bleu(seq({"the", "cat"}), seq({"the", "cat", "sat"}), no_smoothing(2));
  EXPECT_NEAR(s.value, 60.653065971263345, 1e-12);
}

TEST(SentenceBleu, SmoothedNearCopy) {
  // p = 4/5, 4/5, 3/4, 2/3; value from tests/oracles/derived_values.py.
  auto s = sentence_bleu(tokenize("A B C D F"), tokenize("A B C D E"));
  EXPECT_NEAR(s.value, 75.21206186172788, 1e-10);
}

TEST(SentenceBleu, EmptySidesScoreZeroWithWarning) {
  auto h = sentence_bleu(seq({}), seq({"a"}));
  EXPECT_EQ(h.value, 0.0);
  EXPECT_TRUE(h.warning);
  auto r = sentence_bleu(seq({"a"}), seq({}));
  EXPECT_EQ(r.value, 0.0);
  EXPECT_TRUE(r.warning);
}

TEST(SentenceBleu, ConfigValidation) {
  EXPECT_THROW(sentence_bleu(seq({"a"}), seq({"a"}), {0, BleuSmoothing::none}), ConfigError);
  EXPECT_THROW(sentence_bleu(seq({"a"}), seq({"a"}), {10, BleuSmoothing::none}), ConfigError);
  EXPECT_NE(BleuConfig{}.canonical(), no_smoothing(4).canonical());
}

TEST(SentenceBleu, MatchesBruteForceOracleOnRandomInstances) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 2000; ++trial) {
    oracle::Seq h, r;
    for (unsigned i = rng() % 9; i > 0; --i) h.push_back(static_cast<int>(rng() % 3));
    for (unsigned i = rng() % 9; i > 0; --i) r.push_back(static_cast<int>(rng() % 3));
    for (int max_n : {1, 2, 4}) {
      const auto got = bleu_statistics(std::span<const int>(h), std::span<const int>(r), max_n);
      const auto want = oracle::bleu_counts(h, r, max_n);
      ASSERT_EQ(got.matches, want.matches);
      ASSERT_EQ(got.totals, want.totals);
      for (bool smooth : {false, true}) {
        BleuConfig cfg{max_n, smooth ? BleuSmoothing::add_one_higher_order : BleuSmoothing::none};
        EXPECT_NEAR(bleu(std::span<const int>(h), std::span<const int>(r), cfg),
                    oracle::bleu_score(h, r, max_n, smooth), 1e-9);
      }
    }
  }
}

// --- chrF ------------------------------------------------------------------

TEST(Chrf, IdenticalIsHundred) {
  EXPECT_EQ(chrf("the cat sat on the mat", "the cat sat on the mat").value, 100.0);
  EXPECT_EQ(chrf("ab", "ab").value, 100.0);
}

TEST(Chrf, NoOverlapIsZero) { EXPECT_EQ(chrf("abcd", "wxyz").value, 0.0); }

TEST(Chrf, PartialOverlapGolden) {
  // Order 1: P 2/3, R 1; order 2: P 1/2, R 1 -> F2 = 35/40. Exact value 175/2
  // from tests/oracles/derived_values.py.
  EXPECT_NEAR(chrf("abc", "ab", {2, 2.0}).value, 87.5, 1e-12);
}

TEST(Chrf, BothEmptyIsVacuousMatch) {
  auto s = chrf("", "  ");
  EXPECT_EQ(s.value, 100.0);
  EXPECT_TRUE(s.warning);
}

TEST(Chrf, OneSideEmptyIsZero) {
  EXPECT_EQ(chrf("", "abc").value, 0.0);
  EXPECT_EQ(chrf("abc", "").value, 0.0);
}

TEST(Chrf, IgnoresWhitespace) {
  EXPECT_EQ(chrf("a b c", "abc").value, 100.0);
}

TEST(Chrf, RecallWeighting) {
  // Higher beta weights recall; "abc" vs "ab" has perfect recall.
  EXPECT_GT(chrf("abc", "ab", {2, 3.0}).value, chrf("abc", "ab", {2, 1.0}).value);
  EXPECT_THROW(chrf("a", "a", {2, 0.0}), ConfigError);
  EXPECT_THROW(chrf("a", "a", {0, 2.0}), ConfigError);
}

// --- TER -------------------------------------------------------------------

TEST(Ter, IdentityIsZero) {
  EXPECT_EQ(ter(seq({"a", "b"}), seq({"a", "b"})).value, 0.0);
}

TEST(Ter, EmptyHypothesisIsAllInsertions) {
  EXPECT_EQ(ter(seq({}), seq({"a", "b", "c"})).value, 1.0);
}

TEST(Ter, SingleShift) {
  auto s = ter(seq({"c", "a", "b"}), seq({"a", "b", "c"}));
  EXPECT_NEAR(s.value, 1.0 / 3.0, 1e-15);
  const std::vector<int> h{2, 0, 1}, r{0, 1, 2};
  const auto a = ter_alignment(std::span<const int>(h), std::span<const int>(r));
  EXPECT_EQ(a.shifts, 1u);
  EXPECT_EQ(a.edit_distance, 0u);
}

TEST(Ter, EmptyReferenceDividesByOne) {
  auto s = ter(seq({"a", "b"}), seq({}));
  EXPECT_EQ(s.value, 2.0);
  EXPECT_TRUE(s.warning);
  EXPECT_TRUE(s.within_bounds());
  EXPECT_EQ(ter(seq({}), seq({})).value, 0.0);
}

TEST(Ter, ShiftTieBreakPrefersLongestBlock) {
  // Moving [d e] to the front fixes everything; moving single tokens cannot.
  const std::vector<int> h{1, 2, 3, 4, 5}, r{4, 5, 1, 2, 3};
  const auto a = ter_alignment(std::span<const int>(h), std::span<const int>(r));
  EXPECT_EQ(a.shifts, 1u);
  EXPECT_EQ(a.edit_distance, 0u);
}

TEST(Ter, ApplyShift) {
  const std::vector<int> src{0, 1, 2, 3};
  std::vector<int> out;
  apply_shift(src, 0, 1, 3, out);
  EXPECT_EQ(out, (std::vector<int>{1, 2, 3, 0}));
  apply_shift(src, 2, 2, 0, out);
  EXPECT_EQ(out, (std::vector<int>{2, 3, 0, 1}));
  apply_shift(src, 1, 2, 2, out);
  EXPECT_EQ(out, (std::vector<int>{0, 3, 1, 2}));
}

TEST(Ter, LevenshteinMatchesOracle) {
  std::mt19937 rng(9);
  for (int trial = 0; trial < 2000; ++trial) {
    oracle::Seq a, b;
    for (unsigned i = rng() % 8; i > 0; --i) a.push_back(static_cast<int>(rng() % 3));
    for (unsigned i = rng() % 8; i > 0; --i) b.push_back(static_cast<int>(rng() % 3));
    EXPECT_EQ(levenshtein(std::span<const int>(a), std::span<const int>(b)),
              oracle::levenshtein(a, b));
  }
}

TEST(Ter, BoundedByOptimumAndPlainLevenshtein) {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 400; ++trial) {
    oracle::Seq h, r;
    for (unsigned i = rng() % 6 + 1; i > 0; --i) h.push_back(static_cast<int>(rng() % 3));
    for (unsigned i = rng() % 6 + 1; i > 0; --i) r.push_back(static_cast<int>(rng() % 3));
    const auto a = ter_alignment(std::span<const int>(h), std::span<const int>(r));
    EXPECT_LE(a.edits(), oracle::levenshtein(h, r));
    EXPECT_GE(a.edits(), oracle::ter_optimal_edits(oracle::shift_closure(h), r));
  }
}

TEST(Ter, LongSentenceTerminates) {
  const Tokens words = tokenize(
                           "once north pacific salmon die off after spawning usually local bald "
                           "eagles eat salmon carcasses almost exclusively")
                           .tokens;
  Tokens shuffled = words;
  std::mt19937 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  auto s = ter(seq(shuffled), seq(words));
  EXPECT_GT(s.value, 0.0);
  EXPECT_LE(s.value, 1.0);
}

// --- tf_cosine -------------------------------------------------------------

TEST(TfCosine, StandardisedCosineColumn) {
  EXPECT_NEAR(tf_cosine("the boys love football", "the guys love sport").value, 0.333, 1e-3);
  EXPECT_NEAR(tf_cosine("the phone is broken", "this iphone is smashed").value, 0.0, 1e-3);
  EXPECT_NEAR(tf_cosine("it took too long to arrive", "the delivery was late").value, 0.0, 1e-3);
}

TEST(TfCosine, ExactThird) {
  EXPECT_DOUBLE_EQ(tf_cosine("the boys love football", "the guys love sport").value, 1.0 / 3.0);
}

TEST(TfCosine, EmptyCases) {
  auto both = tf_cosine("the is", "a this");
  EXPECT_EQ(both.value, 0.0);
  EXPECT_TRUE(both.warning);
  auto one = tf_cosine("phone", "the");
  EXPECT_EQ(one.value, 0.0);
  EXPECT_FALSE(one.warning);
}

TEST(TfCosine, SymmetricAndBounded) {
  std::mt19937 rng(21);
  const Tokens vocab = {"phone", "broken", "the", "iphone", "is", "smashed", "love", "a"};
  for (int trial = 0; trial < 500; ++trial) {
    std::string a, b;
    for (unsigned i = rng() % 7; i > 0; --i) a += vocab[rng() % vocab.size()] + " ";
    for (unsigned i = rng() % 7; i > 0; --i) b += vocab[rng() % vocab.size()] + " ";
    const double ab = tf_cosine(a, b).value;
    EXPECT_EQ(ab, tf_cosine(b, a).value);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
  }
}

// --- shared properties -----------------------------------------------------

TEST(MetricScores, IdentityMaximaAndBounds) {
  const char* sentences[] = {"José Ortega y Gasset visited Husserl at Freiburg in 1934.",
                             "However, a disappointing ninth in China meant that he dropped back.",
                             "Monkeys in chorus cry; Tigers and leopards roar 猿狖群嘯兮虎豹原",
                             "x"};
  for (const char* s : sentences) {
    const auto t = tokenize(s);
    EXPECT_EQ(sentence_bleu(t, t).value, 100.0) << s;
    EXPECT_EQ(chrf(s, s).value, 100.0) << s;
    EXPECT_EQ(ter(t, t).value, 0.0) << s;
    EXPECT_EQ(tf_cosine(s, s).value, 1.0) << s;
  }
  const auto a = tokenize(sentences[0]);
  const auto b = tokenize(sentences[1]);
  for (const auto& score : {sentence_bleu(a, b), chrf(sentences[0], sentences[1]), ter(a, b),
                            tf_cosine(sentences[0], sentences[1])})
    EXPECT_TRUE(score.within_bounds()) << score.metric_id << " " << score.value;
}

}  // namespace
}  // namespace rtqe
