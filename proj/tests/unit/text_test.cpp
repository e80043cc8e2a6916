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

#include "rtqe/text.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace rtqe {
namespace {

using Tokens = std::vector<std::string>;

TokenSequence seq(Tokens t) { return {std::move(t), TokenScheme::simple}; }

TEST(Tokenize, SimpleLowercasesAndSplits) {
  EXPECT_EQ(tokenize("The boys love football").tokens,
            (Tokens{"the", "boys", "love", "football"}));
}

TEST(Tokenize, SimpleStripsPunctuation) {
  EXPECT_EQ(tokenize("Hello, world!").tokens, (Tokens{"hello", "world"}));
  // Only category P* is stripped; '|' is a math symbol and survives.
  EXPECT_EQ(tokenize("[[Wakan Tanka | Wakan Tanka]].").tokens,
            (Tokens{"wakan", "tanka", "|", "wakan", "tanka"}));
}

TEST(Tokenize, CharSchemeDropsWhitespace) {
  auto ts = tokenize("ab c", TokenScheme::chars);
  EXPECT_EQ(ts.tokens, (Tokens{"a", "b", "c"}));
  EXPECT_EQ(ts.scheme, TokenScheme::chars);
}

TEST(Tokenize, EmptyTextYieldsEmptySequence) {
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize("   \t ").empty());
  EXPECT_TRUE(tokenize("", TokenScheme::chars).empty());
}

TEST(Tokenize, NonAsciiLowercaseAndNfc) {
  // "Universität" with a decomposed umlaut normalizes to the composed form.
  EXPECT_EQ(tokenize("Universita\xCC\x88t").tokens, (Tokens{"universit\xC3\xA4t"}));
  EXPECT_EQ(tokenize("JOSÉ Ortega").tokens, (Tokens{"josé", "ortega"}));
}

TEST(Tokenize, NoTokenIsEmptyOrContainsWhitespace) {
  for (const char* text : {"  a  b ", "!!! ...", "x y", "猿狖 群嘯 , !"}) {
    for (const auto& tok : tokenize(text).tokens) {
      EXPECT_FALSE(tok.empty());
      EXPECT_EQ(tok.find_first_of(" \t\n"), std::string::npos);
    }
  }
}

TEST(Tokenize, IdempotentUnderRejoin) {
  std::mt19937 rng(7);
  const std::vector<std::string> pieces = {"The", "cat,", "SAT", "on", "Müller's", "mat.",
                                           "--", "Ünïcödé", "a", "(b)", "猿狖", "!"};
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) text += pieces[rng() % pieces.size()] + (rng() % 2 ? " " : "  ");
    const auto once = tokenize(text);
    std::string joined;
    for (std::size_t i = 0; i < once.tokens.size(); ++i) joined += (i ? " " : "") + once.tokens[i];
    EXPECT_EQ(tokenize(joined), once) << text;
  }
}

TEST(Stopwords, ExamplePairs) {
  EXPECT_EQ(remove_stopwords(seq({"the", "phone", "is", "broken"})).tokens,
            (Tokens{"phone", "broken"}));
  EXPECT_EQ(remove_stopwords(seq({"this", "iphone", "is", "smashed"})).tokens,
            (Tokens{"iphone", "smashed"}));
  EXPECT_TRUE(remove_stopwords(seq({})).empty());
}

TEST(Stopwords, PinnedListContainsRequiredWords) {
  const auto& list = StopwordList::english();
  for (const char* w : {"the", "this", "that", "is", "it", "to", "too", "a", "was", "of", "and"})
    EXPECT_TRUE(list.contains(w)) << w;
  for (const char* w : {"love", "phone", "broken", "iphone", "smashed", "delivery", "late"})
    EXPECT_FALSE(list.contains(w)) << w;
}

TEST(Stopwords, DataFileMatchesBuiltIn) {
  const auto from_file =
      StopwordList::from_file(std::string(RTQE_SOURCE_DIR) + "/data/stopwords_en.txt");
  EXPECT_EQ(from_file.size(), StopwordList::english().size());
  for (const char* w : detail::kEnglishStopwords) EXPECT_TRUE(from_file.contains(w)) << w;
}

TEST(Stopwords, Idempotent) {
  auto once = remove_stopwords(tokenize("It took too long to arrive and this was late"));
  EXPECT_EQ(remove_stopwords(once), once);
  EXPECT_EQ(once.tokens, (Tokens{"took", "long", "arrive", "late"}));
}

TEST(Stopwords, CustomListIsTokenized) {
  StopwordList custom(std::vector<std::string>{"Don't", "BROKEN"});
  EXPECT_TRUE(custom.contains("dont"));
  EXPECT_TRUE(custom.contains("broken"));
  EXPECT_EQ(remove_stopwords(seq({"the", "broken"}), custom).tokens, (Tokens{"the"}));
}

TEST(TermVectors, WorkedExample) {
  auto tv = term_vectors(seq({"phone", "broken"}), seq({"iphone", "smashed"}));
  EXPECT_EQ(tv.vocabulary, (Tokens{"phone", "broken", "iphone", "smashed"}));
  EXPECT_EQ(tv.counts_a, (std::vector<std::size_t>{1, 1, 0, 0}));
  EXPECT_EQ(tv.counts_b, (std::vector<std::size_t>{0, 0, 1, 1}));
}

TEST(TermVectors, SharedTerm) {
  auto tv = term_vectors(seq({"boys", "love", "football"}), seq({"guys", "love", "sport"}));
  EXPECT_EQ(tv.vocabulary, (Tokens{"boys", "love", "football", "guys", "sport"}));
  EXPECT_EQ(tv.counts_a, (std::vector<std::size_t>{1, 1, 1, 0, 0}));
  EXPECT_EQ(tv.counts_b, (std::vector<std::size_t>{0, 1, 0, 1, 1}));
}

TEST(TermVectors, RepeatedTermAndEmpty) {
  auto tv = term_vectors(seq({"a", "a"}), seq({"a"}));
  EXPECT_EQ(tv.vocabulary, (Tokens{"a"}));
  EXPECT_EQ(tv.counts_a, (std::vector<std::size_t>{2}));
  EXPECT_EQ(tv.counts_b, (std::vector<std::size_t>{1}));
  EXPECT_TRUE(term_vectors(seq({}), seq({})).vocabulary.empty());
}

TEST(TermVectors, InvariantsAndExchangeability) {
  std::mt19937 rng(11);
  const Tokens alphabet = {"w", "x", "y", "z"};
  for (int trial = 0; trial < 300; ++trial) {
    Tokens a, b;
    for (unsigned i = rng() % 6; i > 0; --i) a.push_back(alphabet[rng() % 4]);
    for (unsigned i = rng() % 6; i > 0; --i) b.push_back(alphabet[rng() % 4]);
    auto ab = term_vectors(seq(a), seq(b));
    ASSERT_EQ(ab.counts_a.size(), ab.vocabulary.size());
    ASSERT_EQ(ab.counts_b.size(), ab.vocabulary.size());
    EXPECT_EQ(std::accumulate(ab.counts_a.begin(), ab.counts_a.end(), std::size_t{0}), a.size());
    EXPECT_EQ(std::accumulate(ab.counts_b.begin(), ab.counts_b.end(), std::size_t{0}), b.size());
    for (std::size_t i = 0; i < ab.vocabulary.size(); ++i)
      EXPECT_GT(ab.counts_a[i] + ab.counts_b[i], 0u);

    // Swapping the arguments permutes the vocabulary and swaps the vectors.
    auto ba = term_vectors(seq(b), seq(a));
    ASSERT_EQ(ba.vocabulary.size(), ab.vocabulary.size());
    for (std::size_t i = 0; i < ab.vocabulary.size(); ++i) {
      auto it = std::find(ba.vocabulary.begin(), ba.vocabulary.end(), ab.vocabulary[i]);
      ASSERT_NE(it, ba.vocabulary.end());
      const auto j = static_cast<std::size_t>(it - ba.vocabulary.begin());
      EXPECT_EQ(ab.counts_a[i], ba.counts_b[j]);
      EXPECT_EQ(ab.counts_b[i], ba.counts_a[j]);
    }
  }
}

TEST(CharNgrams, Examples) {
  EXPECT_EQ(char_ngrams("abc", 2), (NgramCounts{{"ab", 1}, {"bc", 1}}));
  EXPECT_EQ(char_ngrams("aaa", 2), (NgramCounts{{"aa", 2}}));
  EXPECT_EQ(char_ngrams("a b", 2), (NgramCounts{{"ab", 1}}));
  EXPECT_TRUE(char_ngrams("a", 2).empty());
  EXPECT_EQ(char_ngrams("猿狖群", 2), (NgramCounts{{"猿狖", 1}, {"狖群", 1}}));
}

TEST(CharNgrams, MultiplicityTotal) {
  std::mt19937 rng(3);
  const std::string alphabet[] = {"a", "b", " ", "é", "狖"};
  for (int trial = 0; trial < 300; ++trial) {
    std::string text;
    for (unsigned i = rng() % 10; i > 0; --i) text += alphabet[rng() % 5];
    const std::size_t stripped = strip_whitespace(text).size();
    for (std::size_t n = 1; n <= 4; ++n) {
      std::size_t total = 0;
      for (const auto& [gram, count] : char_ngrams(text, n)) total += count;
      EXPECT_EQ(total, stripped >= n ? stripped - n + 1 : 0) << text << " n=" << n;
    }
  }
}

TEST(DetectScripts, MixedLatinHan) {
  auto p = detect_scripts("Tigers and leopards roar 猿狖群嘯兮虎豹原");
  EXPECT_EQ(p.scripts, (std::set<std::string>{"Latin", "Han"}));
  EXPECT_TRUE(p.mixed);
  EXPECT_EQ(p.dominant, "Latin");
}

TEST(DetectScripts, SingleScriptAndCommonOnly) {
  auto latin = detect_scripts("plain english text");
  EXPECT_EQ(latin.scripts, (std::set<std::string>{"Latin"}));
  EXPECT_FALSE(latin.mixed);

  auto common = detect_scripts("1234 !!");
  EXPECT_TRUE(common.scripts.empty());
  EXPECT_FALSE(common.mixed);
  EXPECT_TRUE(common.dominant.empty());
}

TEST(DetectScripts, GermanIsLatinOnly) {
  auto p = detect_scripts("Nach seiner Rückkehr zum WWF verließ er im April 2002 den Titel.");
  EXPECT_EQ(p.scripts, (std::set<std::string>{"Latin"}));
  EXPECT_FALSE(p.mixed);
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(is_valid_utf8("plain"));
  EXPECT_TRUE(is_valid_utf8("猿狖"));
  EXPECT_FALSE(is_valid_utf8("\xff\xfe"));
  EXPECT_FALSE(is_valid_utf8("ab\xc3"));
  EXPECT_FALSE(is_valid_utf8("\xed\xa0\x80"));  // encoded surrogate
}

}  // namespace
}  // namespace rtqe
