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
 * Rule-augmented valence scoring. Per-token valences come from the lexicon's
 * valence table; a small set of context rules adjusts them:
 *
 *   1. an all-caps valence token is scaled by 1.5;
 *   2. each booster word within the 3 preceding tokens adds or removes
 *      0.293 of magnitude (never crossing zero);
 *   3. a negator within the 3 preceding tokens multiplies by -0.74.
 *
 * The compound score squashes the adjusted sum S to S/sqrt(S^2 + 15), after
 * adding 0.292 * sign(S) for each trailing '!' (at most 3). The pos/neg/neu
 * shares are normalized token masses: a positive token contributes v+1 to
 * the positive mass, a negative one |v|+1 to the negative mass, and a
 * zero-valence token counts 1 toward the neutral mass.
 */

#ifndef THREADRANK_SENTIMENT_HPP_
#define THREADRANK_SENTIMENT_HPP_

#include <cmath>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "threadrank/lexicon.hpp"
#include "threadrank/text.hpp"

namespace threadrank::features {

struct SentimentScores {
  double neg = 0.0;
  double pos = 0.0;
  double neu = 1.0;
  double compound = 0.0;
};

namespace detail {

inline const std::unordered_set<std::string>& negators() {
  static const std::unordered_set<std::string> kSet = {
      "not",     "no",      "never",   "none",    "nor",     "nothing",
      "nowhere", "neither", "cannot",  "cant",    "can't",   "dont",
      "don't",   "doesnt",  "doesn't", "didnt",   "didn't",  "isnt",
      "isn't",   "arent",   "aren't",  "wasnt",   "wasn't",  "werent",
      "weren't", "wont",    "won't",   "wouldnt", "wouldn't", "shouldnt",
      "shouldn't", "couldnt", "couldn't", "aint",  "ain't",   "hardly",
      "scarcely", "barely",  "rarely",  "seldom",  "without", "despite"};
  return kSet;
}

inline const std::unordered_set<std::string>& booster_up() {
  static const std::unordered_set<std::string> kSet = {
      "very",      "really",    "extremely", "absolutely", "completely",
      "enormously", "especially", "exceptionally", "incredibly", "totally",
      "tremendously", "utterly",  "highly",   "hugely",     "intensely",
      "particularly", "purely",   "remarkably", "so",       "thoroughly",
      "unbelievably", "deeply",   "amazingly"};
  return kSet;
}

inline const std::unordered_set<std::string>& booster_down() {
  static const std::unordered_set<std::string> kSet = {
      "slightly", "somewhat", "marginally", "kinda", "kind", "sorta",
      "sort", "almost", "partly", "little", "less", "occasionally",
      "moderately", "mildly"};
  return kSet;
}

inline int sign(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

/// Number of '!' at the end of the text, ignoring trailing whitespace.
inline int trailing_exclamations(std::string_view text) {
  std::size_t end = text.size();
  while (end > 0 && std::isspace(static_cast<unsigned char>(text[end - 1]))) {
    --end;
  }
  int n = 0;
  while (end > 0 && text[end - 1] == '!') {
    ++n;
    --end;
  }
  return n;
}

}  // namespace detail

/// Adjusted valence of tokens[i] given its 3-token left context.
inline double adjusted_valence(const textstats::TokenStream& ts, std::size_t i,
                               const textstats::Lexicon& lexicon) {
  bool found = false;
  double v = lexicon.valence(ts.tokens[i], &found);
  if (!found || v == 0.0) return 0.0;
  if (i < ts.all_caps_flags.size() && ts.all_caps_flags[i]) v *= 1.5;
  int s = detail::sign(v);
  double magnitude = std::abs(v);
  bool negated = false;
  std::size_t window = std::min<std::size_t>(i, 3);
  for (std::size_t back = 1; back <= window; ++back) {
    const std::string& prev = ts.tokens[i - back];
    if (detail::booster_up().count(prev)) magnitude += 0.293;
    if (detail::booster_down().count(prev)) magnitude -= 0.293;
    if (detail::negators().count(prev)) negated = true;
  }
  if (magnitude < 0.0) magnitude = 0.0;
  double out = s * magnitude;
  if (negated) out *= -0.74;
  return out;
}

inline SentimentScores sentiment_scores(std::string_view text,
                                        const textstats::Lexicon& lexicon) {
  textstats::TokenStream ts = textstats::tokenize(text);
  SentimentScores scores;
  if (ts.tokens.empty()) return scores;  // (0, 0, 1, 0)

  double sum = 0.0;
  double pos_mass = 0.0, neg_mass = 0.0, neu_mass = 0.0;
  for (std::size_t i = 0; i < ts.tokens.size(); ++i) {
    double v = adjusted_valence(ts, i, lexicon);
    sum += v;
    if (v > 0.0) {
      pos_mass += v + 1.0;
    } else if (v < 0.0) {
      neg_mass += -v + 1.0;
    } else {
      neu_mass += 1.0;
    }
  }

  int bangs = std::min(detail::trailing_exclamations(text), 3);
  sum += bangs * 0.292 * detail::sign(sum);
  scores.compound = sum / std::sqrt(sum * sum + 15.0);

  double mass = pos_mass + neg_mass + neu_mass;
  if (mass > 0.0) {
    scores.pos = pos_mass / mass;
    scores.neg = neg_mass / mass;
    scores.neu = neu_mass / mass;
  } else {
    scores.neu = 1.0;
  }
  return scores;
}

}  // namespace threadrank::features

#endif  // THREADRANK_SENTIMENT_HPP_
