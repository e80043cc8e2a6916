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

// Text normalization shared by every metric: NFC, tokenization, stopword
// filtering, term-frequency vectors, character n-grams and script detection.
// All functions are pure and safe to call concurrently.

#ifndef RTQE_TEXT_HPP
#define RTQE_TEXT_HPP

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "rtqe/error.hpp"
#include "rtqe/stopwords_en.hpp"

namespace rtqe {

// ---------------------------------------------------------------------------
// UTF-8 helpers
// ---------------------------------------------------------------------------

inline bool is_valid_utf8(std::string_view bytes) {
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  const auto length = static_cast<int32_t>(bytes.size());
  int32_t i = 0;
  while (i < length) {
    UChar32 c;
    U8_NEXT(s, i, length, c);
    if (c < 0) return false;
  }
  return true;
}

inline void append_utf8(std::string& out, UChar32 c) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  UBool error = false;
  U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
  if (!error) out.append(buf, static_cast<std::size_t>(len));
}

namespace detail {

inline icu::UnicodeString to_icu(std::string_view text) {
  return icu::UnicodeString::fromUTF8(
      icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
}

inline std::string from_icu(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

inline icu::UnicodeString nfc_icu(std::string_view text) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC instance unavailable");
  icu::UnicodeString out = nfc->normalize(to_icu(text), status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFC normalization failed");
  return out;
}

template <typename Fn>
void for_each_code_point(const icu::UnicodeString& u, Fn&& fn) {
  for (int32_t i = 0; i < u.length();) {
    UChar32 c = u.char32At(i);
    fn(c);
    i += U16_LENGTH(c);
  }
}

inline bool is_punctuation(UChar32 c) {
  switch (u_charType(c)) {
    case U_CONNECTOR_PUNCTUATION:
    case U_DASH_PUNCTUATION:
    case U_START_PUNCTUATION:
    case U_END_PUNCTUATION:
    case U_INITIAL_PUNCTUATION:
    case U_FINAL_PUNCTUATION:
    case U_OTHER_PUNCTUATION:
      return true;
    default:
      return false;
  }
}

}  // namespace detail

/// NFC-normalized copy of UTF-8 text. Invalid sequences become U+FFFD.
inline std::string nfc(std::string_view text) {
  return detail::from_icu(detail::nfc_icu(text));
}

/// NFC code points with all whitespace removed.
inline std::u32string strip_whitespace(std::string_view text) {
  std::u32string out;
  detail::for_each_code_point(detail::nfc_icu(text), [&](UChar32 c) {
    if (!u_isUWhiteSpace(c)) out.push_back(static_cast<char32_t>(c));
  });
  return out;
}

inline std::string to_utf8(std::u32string_view cps) {
  std::string out;
  for (char32_t c : cps) append_utf8(out, static_cast<UChar32>(c));
  return out;
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

enum class TokenScheme {
  simple,  // lowercase, strip punctuation (P*), split on whitespace
  chars,   // one token per non-whitespace code point
};

inline std::string_view scheme_name(TokenScheme scheme) {
  return scheme == TokenScheme::simple ? "simple" : "char";
}

/// Invariant: no token is empty and none contains whitespace.
struct TokenSequence {
  std::vector<std::string> tokens;
  TokenScheme scheme = TokenScheme::simple;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  friend bool operator==(const TokenSequence&, const TokenSequence&) = default;
};

inline TokenSequence tokenize(std::string_view text,
                              TokenScheme scheme = TokenScheme::simple) {
  TokenSequence out;
  out.scheme = scheme;
  icu::UnicodeString u = detail::nfc_icu(text);
  if (scheme == TokenScheme::chars) {
    detail::for_each_code_point(u, [&](UChar32 c) {
      if (u_isUWhiteSpace(c)) return;
      std::string tok;
      append_utf8(tok, c);
      out.tokens.push_back(std::move(tok));
    });
    return out;
  }

  u.toLower(icu::Locale::getRoot());
  std::string current;
  detail::for_each_code_point(u, [&](UChar32 c) {
    if (u_isUWhiteSpace(c)) {
      if (!current.empty()) out.tokens.push_back(std::move(current));
      current.clear();
    } else if (!detail::is_punctuation(c)) {
      append_utf8(current, c);
    }
  });
  if (!current.empty()) out.tokens.push_back(std::move(current));
  return out;
}

// ---------------------------------------------------------------------------
// Stopwords
// ---------------------------------------------------------------------------

/// A set of tokens in `simple`-scheme form.
class StopwordList {
 public:
  StopwordList() = default;

  template <typename Range>
  explicit StopwordList(const Range& words) {
    for (const auto& w : words) add(w);
  }

  /// The pinned English list (same content as data/stopwords_en.txt).
  static const StopwordList& english() {
    static const StopwordList list(detail::kEnglishStopwords);
    return list;
  }

  /// One token per line, UTF-8. Blank lines and lines starting with '#' are
  /// ignored. Entries are passed through the `simple` tokenizer.
  static StopwordList from_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open stopword file: " + path.string());
    StopwordList list;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      if (!is_valid_utf8(line))
        throw DataError("stopword file is not valid UTF-8: " + path.string());
      list.add(line);
    }
    return list;
  }

  bool contains(std::string_view token) const {
    return words_.find(std::string(token)) != words_.end();
  }

  std::size_t size() const noexcept { return words_.size(); }

 private:
  void add(std::string_view word) {
    for (auto& tok : tokenize(word, TokenScheme::simple).tokens)
      words_.insert(std::move(tok));
  }

  std::unordered_set<std::string> words_;
};

inline TokenSequence remove_stopwords(
    const TokenSequence& ts,
    const StopwordList& stopwords = StopwordList::english()) {
  TokenSequence out;
  out.scheme = ts.scheme;
  for (const auto& tok : ts.tokens)
    if (!stopwords.contains(tok)) out.tokens.push_back(tok);
  return out;
}

// ---------------------------------------------------------------------------
// Term-frequency vectors
// ---------------------------------------------------------------------------

/// Joint-vocabulary count vectors for a sentence pair.
/// Vocabulary is ordered by first appearance in `a`, then in `b`.
struct TermVector {
  std::vector<std::string> vocabulary;
  std::vector<std::size_t> counts_a;
  std::vector<std::size_t> counts_b;
};

inline TermVector term_vectors(const TokenSequence& a, const TokenSequence& b) {
  TermVector tv;
  std::unordered_map<std::string, std::size_t> index;
  auto slot = [&](const std::string& tok) {
    auto [it, inserted] = index.try_emplace(tok, tv.vocabulary.size());
    if (inserted) {
      tv.vocabulary.push_back(tok);
      tv.counts_a.push_back(0);
      tv.counts_b.push_back(0);
    }
    return it->second;
  };
  for (const auto& tok : a.tokens) ++tv.counts_a[slot(tok)];
  for (const auto& tok : b.tokens) ++tv.counts_b[slot(tok)];
  return tv;
}

// ---------------------------------------------------------------------------
// Character n-grams
// ---------------------------------------------------------------------------

/// n-gram (UTF-8) -> multiplicity.
using NgramCounts = std::map<std::string, std::size_t>;

inline NgramCounts char_ngrams(std::u32string_view stripped, std::size_t n) {
  NgramCounts out;
  if (n == 0 || stripped.size() < n) return out;
  for (std::size_t i = 0; i + n <= stripped.size(); ++i)
    ++out[to_utf8(stripped.substr(i, n))];
  return out;
}

/// Windows of length `n` over the text with whitespace removed.
inline NgramCounts char_ngrams(std::string_view text, std::size_t n) {
  return char_ngrams(std::u32string_view(strip_whitespace(text)), n);
}

// ---------------------------------------------------------------------------
// Script detection
// ---------------------------------------------------------------------------

/// Invariant: mixed == (scripts.size() >= 2).
struct ScriptProfile {
  std::set<std::string> scripts;
  std::string dominant;  // empty when no script qualified
  bool mixed = false;
};

/// Counts alphabetic characters per Unicode script, ignoring
/// Common/Inherited/Unknown. Ties for `dominant` go to the name that sorts
/// first.
inline ScriptProfile detect_scripts(std::string_view text) {
  std::map<std::string, std::size_t> counts;
  detail::for_each_code_point(detail::nfc_icu(text), [&](UChar32 c) {
    if (!u_isUAlphabetic(c)) return;
    UErrorCode status = U_ZERO_ERROR;
    UScriptCode code = uscript_getScript(c, &status);
    if (U_FAILURE(status) || code == USCRIPT_COMMON ||
        code == USCRIPT_INHERITED || code == USCRIPT_UNKNOWN)
      return;
    ++counts[uscript_getName(code)];
  });

  ScriptProfile profile;
  std::size_t best = 0;
  for (const auto& [name, count] : counts) {
    profile.scripts.insert(name);
    if (count > best) {
      best = count;
      profile.dominant = name;
    }
  }
  profile.mixed = profile.scripts.size() >= 2;
  return profile;
}

}  // namespace rtqe

#endif  // RTQE_TEXT_HPP
