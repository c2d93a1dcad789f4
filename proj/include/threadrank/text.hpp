/**
 * Copyright (c) 2026 the threadrank authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
 * Tokenization, sentence segmentation, syllable counting and the fixed
 * stop-word list.
 */

#ifndef THREADRANK_TEXT_HPP_
#define THREADRANK_TEXT_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace threadrank::textstats {

/// Token-level view of a text. Tokens are lowercased word runs; per-token
/// capitalization survives in `all_caps_flags` for the sentiment rules.
struct TokenStream {
  std::vector<std::string> tokens;
  std::vector<std::uint8_t> all_caps_flags;  // parallel to tokens
  std::size_t sentences = 0;
  std::size_t punctuation_count = 0;
  std::size_t quote_count = 0;
  std::size_t all_caps_tokens = 0;
};

namespace detail {

inline bool is_ascii_alpha(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}
inline bool is_ascii_alnum(unsigned char c) {
  return is_ascii_alpha(c) || (c >= '0' && c <= '9');
}
inline bool is_ascii_punct(unsigned char c) {
  return (c >= 33 && c <= 47) || (c >= 58 && c <= 64) || (c >= 91 && c <= 96) ||
         (c >= 123 && c <= 126);
}
// Word constituents: ASCII alphanumerics plus any non-ASCII byte, which
// keeps multi-byte UTF-8 sequences intact inside one token.
inline bool is_word_byte(unsigned char c) {
  return is_ascii_alnum(c) || c >= 0x80;
}
inline char ascii_lower(char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}
inline bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

}  // namespace detail

/// Splits text into lowercase word tokens (maximal alphanumeric runs with
/// internal apostrophes kept, e.g. "don't"). Sentence count is the number
/// of segments terminated by '.', '!' or '?', floored at 1 for any text
/// containing a non-whitespace character. punctuation_count covers the
/// ASCII punctuation set; quote_count covers '"' plus non-word-internal
/// single quotes. Total and deterministic: empty text gives an empty
/// stream with 0 sentences.
inline TokenStream tokenize(std::string_view text) {
  using namespace detail;
  TokenStream out;
  const std::size_t n = text.size();

  std::string token;
  bool tok_has_alpha = false;
  bool tok_has_lower = false;
  auto flush_token = [&] {
    if (token.empty()) return;
    bool caps = tok_has_alpha && !tok_has_lower;
    for (char& c : token) c = ascii_lower(c);
    out.tokens.push_back(std::move(token));
    out.all_caps_flags.push_back(caps ? 1 : 0);
    if (caps) ++out.all_caps_tokens;
    token.clear();
    tok_has_alpha = false;
    tok_has_lower = false;
  };

  bool sentence_content = false;
  bool any_content = false;
  for (std::size_t i = 0; i < n; ++i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    bool word = is_word_byte(c);
    if (!word && c == '\'' && !token.empty() && i + 1 < n &&
        is_word_byte(static_cast<unsigned char>(text[i + 1]))) {
      word = true;  // internal apostrophe
    }
    if (word) {
      token.push_back(static_cast<char>(c));
      if (is_ascii_alpha(c)) {
        tok_has_alpha = true;
        if (c >= 'a' && c <= 'z') tok_has_lower = true;
      }
      sentence_content = true;
      any_content = true;
      continue;
    }
    flush_token();
    if (is_ascii_punct(c)) ++out.punctuation_count;
    if (c == '"') {
      ++out.quote_count;
    } else if (c == '\'') {
      bool prev_word = i > 0 && is_word_byte(static_cast<unsigned char>(text[i - 1]));
      bool next_word =
          i + 1 < n && is_word_byte(static_cast<unsigned char>(text[i + 1]));
      if (!(prev_word && next_word)) ++out.quote_count;
    }
    if (c == '.' || c == '!' || c == '?') {
      if (sentence_content) {
        ++out.sentences;
        sentence_content = false;
      }
    } else if (!is_space(c)) {
      sentence_content = true;
      any_content = true;
    }
  }
  flush_token();
  if (any_content && out.sentences == 0) out.sentences = 1;
  return out;
}

/// Heuristic syllable count: contiguous vowel groups (a e i o u y) over the
/// word's ASCII letters, minus a trailing lone silent 'e' when more than
/// one group exists, floored at 1. Zero-dependency and deterministic; known
/// to miss dictionary exceptions ("-le" endings and the like).
inline std::size_t syllable_count(std::string_view word) {
  using namespace detail;
  auto is_vowel = [](char c) {
    c = ascii_lower(c);
    return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
  };
  std::size_t groups = 0;
  std::size_t last_group_len = 0;
  char last_letter = 0;
  bool in_group = false;
  bool group_at_end = false;
  for (char raw : word) {
    if (!is_ascii_alpha(static_cast<unsigned char>(raw))) continue;
    char c = ascii_lower(raw);
    last_letter = c;
    if (is_vowel(c)) {
      if (!in_group) {
        ++groups;
        last_group_len = 0;
        in_group = true;
      }
      ++last_group_len;
      group_at_end = true;
    } else {
      in_group = false;
      group_at_end = false;
    }
  }
  if (groups > 1 && group_at_end && last_group_len == 1 && last_letter == 'e') {
    --groups;
  }
  return groups == 0 ? 1 : groups;
}

/// The fixed stop-word list used by the per_stop feature: 174 English
/// function words (articles, pronouns, auxiliaries, common contractions).
inline const std::unordered_set<std::string>& stopwords() {
  static const std::unordered_set<std::string> kStopwords = {
      "a", "about", "above", "after", "again", "against", "all", "am", "an",
      "and", "any", "are", "aren't", "as", "at", "be", "because", "been",
      "before", "being", "below", "between", "both", "but", "by", "can",
      "can't", "cannot", "could", "couldn't", "did", "didn't", "do", "does",
      "doesn't", "doing", "don't", "down", "during", "each", "few", "for",
      "from", "further", "had", "hadn't", "has", "hasn't", "have", "haven't",
      "having", "he", "he'd", "he'll", "he's", "her", "here", "here's",
      "hers", "herself", "him", "himself", "his", "how", "how's", "i", "i'd",
      "i'll", "i'm", "i've", "if", "in", "into", "is", "isn't", "it", "it's",
      "its", "itself", "let's", "me", "more", "most", "mustn't", "my",
      "myself", "no", "nor", "not", "of", "off", "on", "once", "only", "or",
      "other", "ought", "our", "ours", "ourselves", "out", "over", "own",
      "same", "shan't", "she", "she'd", "she'll", "she's", "should",
      "shouldn't", "so", "some", "such", "than", "that", "that's", "the",
      "their", "theirs", "them", "themselves", "then", "there", "there's",
      "these", "they", "they'd", "they'll", "they're", "they've", "this",
      "those", "through", "to", "too", "under", "until", "up", "very", "was",
      "wasn't", "we", "we'd", "we'll", "we're", "we've", "were", "weren't",
      "what", "what's", "when", "when's", "where", "where's", "which",
      "while", "who", "who's", "whom", "why", "why's", "with", "won't",
      "would", "wouldn't", "you", "you'd", "you'll", "you're", "you've",
      "your", "yours", "yourself", "yourselves"};
  return kStopwords;
}

inline bool is_stopword(const std::string& token) {
  return stopwords().count(token) > 0;
}

}  // namespace threadrank::textstats

#endif  // THREADRANK_TEXT_HPP_
