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
 * Per-comment feature extraction. The registry below is the complete, fixed
 * set of feature names; every vector carries all of them in this order.
 * Features whose inputs are degenerate (empty text, missing embeddings, ...)
 * are set to 0 and flagged in the vector's mask instead of erroring.
 */

#ifndef THREADRANK_FEATURES_HPP_
#define THREADRANK_FEATURES_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "threadrank/corpus.hpp"
#include "threadrank/embeddings.hpp"
#include "threadrank/frequency.hpp"
#include "threadrank/lexicon.hpp"
#include "threadrank/sentiment.hpp"
#include "threadrank/subjectivity.hpp"
#include "threadrank/text.hpp"
#include "threadrank/util.hpp"

namespace threadrank::features {

inline constexpr std::size_t kFeatureCount = 52;

/// Fixed feature registry. Order is part of the dump-file contract:
/// user block, time, sentiment/subjectivity block, relevance, content block.
inline const std::array<std::string_view, kFeatureCount>& feature_registry() {
  static const std::array<std::string_view, kFeatureCount> kNames = {
      "h_index",      "activity",     "flair",       "time_diff",
      "vad_neg",      "vad_pos",      "vad_neu",     "vad_comp",
      "psubj",        "pobj",         "subjcat",     "posemo",
      "negemo",       "tone",         "affect",      "analytic",
      "insight",      "authentic",    "clout",       "tentative",
      "certain",      "affil",        "focuspresent", "focusfuture",
      "focuspast",    "relevance",    "self_fluency", "coca_fluency",
      "WC",           "WPS",          "GI",          "SMOG",
      "FKE",          "ttr",          "conj",        "adverb",
      "auxverb",      "pronoun",      "ppron",       "i",
      "we",           "you",          "shehe",       "quant",
      "swear",        "netspeak",     "interrog",    "per_stop",
      "AllPunc",      "quotes",       "function",    "word_len"};
  return kNames;
}

inline std::size_t feature_index(std::string_view name) {
  const auto& reg = feature_registry();
  for (std::size_t i = 0; i < reg.size(); ++i) {
    if (reg[i] == name) return i;
  }
  throw ValidationError("unknown feature name: " + std::string(name));
}

struct FeatureVector {
  std::array<double, kFeatureCount> values{};
  std::uint64_t degenerate_mask = 0;  // bit i: feature i fell back to 0

  double operator[](std::size_t i) const { return values[i]; }
  void set(std::size_t i, double v) { values[i] = v; }
  void set_degenerate(std::size_t i) {
    values[i] = 0.0;
    degenerate_mask |= std::uint64_t{1} << i;
  }
  bool is_degenerate(std::size_t i) const {
    return (degenerate_mask >> i) & 1;
  }
};

// ---------------------------------------------------------------------------
// User features

/// Largest h such that at least h of the scores are >= h.
inline int h_index(std::vector<int> scores) {
  std::sort(scores.begin(), scores.end(), std::greater<int>());
  int h = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= static_cast<int>(i) + 1) h = static_cast<int>(i) + 1;
  }
  return h;
}

/// Per-author history within one subreddit's training partition. Deleted
/// authors all collapse into the single "[deleted]" pseudo-user.
class UserStatsTable {
 public:
  static UserStatsTable build(const std::vector<corpus::Thread>& train) {
    UserStatsTable table;
    for (const auto& thread : train) {
      table.entries_[thread.post.author].n_posts += 1;
      for (const auto& c : thread.comments) {
        Entry& e = table.entries_[c.author];
        e.n_comments += 1;
        e.comment_scores.push_back(c.score);
      }
    }
    for (auto& [author, e] : table.entries_) {
      e.h = h_index(e.comment_scores);
    }
    return table;
  }

  /// (h_index, activity); unknown authors get (0, 0).
  std::pair<double, double> lookup(const std::string& author) const {
    auto it = entries_.find(author);
    if (it == entries_.end()) return {0.0, 0.0};
    return {static_cast<double>(it->second.h),
            static_cast<double>(it->second.n_comments + it->second.n_posts)};
  }

  std::size_t size() const { return entries_.size(); }

 private:
  struct Entry {
    std::vector<int> comment_scores;
    std::size_t n_comments = 0;
    std::size_t n_posts = 0;
    int h = 0;
  };
  std::unordered_map<std::string, Entry> entries_;
};

// ---------------------------------------------------------------------------
// Readability

struct Readability {
  double gi = 0.0;
  double smog = 0.0;
  double fke = 0.0;
};

inline Readability readability(double words, double sentences,
                               double syllables, double complex_words) {
  if (words < 1.0 || sentences < 1.0) {
    throw ValidationError("readability needs >= 1 word and >= 1 sentence");
  }
  Readability r;
  r.fke = 0.39 * (words / sentences) + 11.8 * (syllables / words) - 15.59;
  r.gi = 0.4 * ((words / sentences) + 100.0 * (complex_words / words));
  r.smog = 1.043 * std::sqrt(complex_words * 30.0 / sentences) + 3.1291;
  return r;
}

// ---------------------------------------------------------------------------
// Fluency

/// Mean add-one-smoothed log frequency over the comment's 3 tokens with the
/// highest counts in `table` (the commenter's community corpus). Fewer than
/// 3 tokens -> mean over what is there; ties broken by token text.
inline double self_fluency(std::vector<std::string> tokens,
                           const textstats::FrequencyTable& table,
                           bool* degenerate = nullptr) {
  if (degenerate) *degenerate = tokens.empty();
  if (tokens.empty()) return 0.0;
  std::sort(tokens.begin(), tokens.end(),
            [&](const std::string& a, const std::string& b) {
              auto ca = table.count(a), cb = table.count(b);
              if (ca != cb) return ca > cb;
              return a < b;
            });
  std::size_t n = std::min<std::size_t>(3, tokens.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += table.log_frequency(tokens[i]);
  return sum / static_cast<double>(n);
}

/// Mean log frequency over the 3 tokens *least* common in the reference
/// corpus table.
inline double reference_fluency(std::vector<std::string> tokens,
                                const textstats::FrequencyTable& table,
                                bool* degenerate = nullptr) {
  if (degenerate) *degenerate = tokens.empty();
  if (tokens.empty()) return 0.0;
  std::sort(tokens.begin(), tokens.end(),
            [&](const std::string& a, const std::string& b) {
              auto ca = table.count(a), cb = table.count(b);
              if (ca != cb) return ca < cb;
              return a < b;
            });
  std::size_t n = std::min<std::size_t>(3, tokens.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += table.log_frequency(tokens[i]);
  return sum / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Relevance

namespace detail {

/// Weighted centroid over the text's 5 rarest embeddable tokens; weights are
/// inverse absolute log frequency (capped when the log frequency is ~0).
/// Returns false when no token has an embedding.
inline bool rare_word_centroid(const std::vector<std::string>& tokens,
                               const textstats::EmbeddingTable& embeddings,
                               const textstats::FrequencyTable& reference,
                               std::vector<double>* out) {
  std::vector<std::string> embeddable;
  embeddable.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (embeddings.lookup(t)) embeddable.push_back(t);
  }
  if (embeddable.empty()) return false;
  std::sort(embeddable.begin(), embeddable.end(),
            [&](const std::string& a, const std::string& b) {
              auto ca = reference.count(a), cb = reference.count(b);
              if (ca != cb) return ca < cb;
              return a < b;
            });
  std::size_t n = std::min<std::size_t>(5, embeddable.size());
  out->assign(embeddings.dimension(), 0.0);
  double weight_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lf = std::abs(reference.log_frequency(embeddable[i]));
    double w = lf < 1e-6 ? 1e6 : 1.0 / lf;
    const std::vector<double>& v = *embeddings.lookup(embeddable[i]);
    for (std::size_t d = 0; d < v.size(); ++d) (*out)[d] += w * v[d];
    weight_sum += w;
  }
  for (double& x : *out) x /= weight_sum;
  return true;
}

}  // namespace detail

inline double relevance_score(std::string_view post_text,
                              std::string_view comment_text,
                              const textstats::EmbeddingTable& embeddings,
                              const textstats::FrequencyTable& reference,
                              bool* degenerate = nullptr) {
  std::vector<double> a, b;
  bool ok_a = detail::rare_word_centroid(textstats::tokenize(post_text).tokens,
                                         embeddings, reference, &a);
  bool ok_b = detail::rare_word_centroid(
      textstats::tokenize(comment_text).tokens, embeddings, reference, &b);
  if (degenerate) *degenerate = !(ok_a && ok_b);
  if (!ok_a || !ok_b) return 0.0;
  return textstats::cosine_similarity(a, b);
}

// ---------------------------------------------------------------------------
// Assembly

/// Immutable bundle of everything extraction needs. `users` may be null
/// (all user features become 0); everything else must be present.
struct Resources {
  const textstats::Lexicon* lexicon = nullptr;
  const textstats::EmbeddingTable* embeddings = nullptr;
  const textstats::FrequencyTable* reference = nullptr;   // shared corpus
  const textstats::FrequencyTable* community = nullptr;   // this subreddit
  const SubjectivityModel* subjectivity = nullptr;
  const UserStatsTable* users = nullptr;

  void require_complete() const {
    if (!lexicon || !embeddings || !reference || !community || !subjectivity) {
      throw ValidationError("feature resources are incomplete");
    }
  }
};

inline std::string post_text(const corpus::Post& post) {
  return post.title + "\n" + post.body;
}

inline FeatureVector extract_one(const corpus::Post& post,
                                 const corpus::Comment& comment,
                                 const Resources& res) {
  res.require_complete();
  FeatureVector fv;
  const auto idx = [](std::string_view name) { return feature_index(name); };

  // User block.
  double h = 0.0, activity = 0.0;
  if (res.users) {
    auto [hh, act] = res.users->lookup(comment.author);
    h = hh;
    activity = act;
  }
  fv.set(idx("h_index"), h);
  fv.set(idx("activity"), activity);
  fv.set(idx("flair"),
         comment.flair && !comment.flair->empty() ? 1.0 : 0.0);
  fv.set(idx("time_diff"),
         static_cast<double>(comment.created_at - post.created_at));

  // Sentiment / subjectivity block.
  SentimentScores sent = sentiment_scores(comment.body, *res.lexicon);
  fv.set(idx("vad_neg"), sent.neg);
  fv.set(idx("vad_pos"), sent.pos);
  fv.set(idx("vad_neu"), sent.neu);
  fv.set(idx("vad_comp"), sent.compound);
  SubjectivityFeatures subj =
      subjectivity_features(comment.body, *res.subjectivity);
  fv.set(idx("psubj"), subj.psubj);
  fv.set(idx("pobj"), subj.pobj);
  fv.set(idx("subjcat"), subj.subjcat);

  textstats::TokenStream ts = textstats::tokenize(comment.body);
  double wc = static_cast<double>(ts.tokens.size());

  // Lexicon category rates per 100 words (both blocks share the machinery).
  static const char* kCategoryFeatures[] = {
      "posemo",  "negemo",   "tone",        "affect",      "analytic",
      "insight", "authentic", "clout",      "tentative",   "certain",
      "affil",   "focuspresent", "focusfuture", "focuspast", "conj",
      "adverb",  "auxverb",  "pronoun",     "ppron",       "i",
      "we",      "you",      "shehe",       "quant",       "swear",
      "netspeak", "interrog", "function"};
  std::vector<std::size_t> counts =
      textstats::category_counts_indexed(ts.tokens, *res.lexicon);
  for (const char* name : kCategoryFeatures) {
    std::size_t fi = idx(name);
    if (wc == 0.0) {
      fv.set_degenerate(fi);
    } else if (res.lexicon->has_category(name)) {
      double c = static_cast<double>(counts[res.lexicon->category_id(name)]);
      fv.set(fi, 100.0 * c / wc);
    } else {
      fv.set_degenerate(fi);
    }
  }

  // Relevance.
  {
    bool degenerate = false;
    double r = relevance_score(post_text(post), comment.body, *res.embeddings,
                               *res.reference, &degenerate);
    std::size_t fi = idx("relevance");
    if (degenerate) {
      fv.set_degenerate(fi);
    } else {
      fv.set(fi, r);
    }
  }

  // Fluency.
  {
    bool degenerate = false;
    double sf = self_fluency(ts.tokens, *res.community, &degenerate);
    std::size_t fi = idx("self_fluency");
    degenerate ? fv.set_degenerate(fi) : fv.set(fi, sf);
  }
  {
    bool degenerate = false;
    double cf = reference_fluency(ts.tokens, *res.reference, &degenerate);
    std::size_t fi = idx("coca_fluency");
    degenerate ? fv.set_degenerate(fi) : fv.set(fi, cf);
  }

  // Content block.
  if (wc == 0.0) {
    for (const char* name : {"WC", "WPS", "GI", "SMOG", "FKE", "ttr",
                             "per_stop", "word_len"}) {
      fv.set_degenerate(idx(name));
    }
    fv.set(idx("AllPunc"), static_cast<double>(ts.punctuation_count));
    fv.set(idx("quotes"), static_cast<double>(ts.quote_count));
    return fv;
  }

  fv.set(idx("WC"), wc);
  fv.set(idx("WPS"), wc / static_cast<double>(ts.sentences));

  double syllables = 0.0, complex_words = 0.0, stop = 0.0, bytes = 0.0;
  std::unordered_set<std::string_view> distinct;
  for (const auto& tok : ts.tokens) {
    int syl = textstats::syllable_count(tok);
    syllables += syl;
    if (syl >= 3) complex_words += 1.0;
    if (textstats::is_stopword(tok)) stop += 1.0;
    bytes += static_cast<double>(tok.size());
    distinct.insert(tok);
  }
  Readability r = readability(wc, static_cast<double>(ts.sentences),
                              syllables, complex_words);
  fv.set(idx("GI"), r.gi);
  fv.set(idx("SMOG"), r.smog);
  fv.set(idx("FKE"), r.fke);
  fv.set(idx("ttr"), static_cast<double>(distinct.size()) / wc);
  fv.set(idx("per_stop"), 100.0 * stop / wc);
  fv.set(idx("AllPunc"), static_cast<double>(ts.punctuation_count));
  fv.set(idx("quotes"), static_cast<double>(ts.quote_count));
  fv.set(idx("word_len"), bytes / wc);
  return fv;
}

inline std::vector<FeatureVector> extract_all(const corpus::Thread& thread,
                                              const Resources& res) {
  std::vector<FeatureVector> out;
  out.reserve(thread.comments.size());
  for (const auto& comment : thread.comments) {
    out.push_back(extract_one(thread.post, comment, res));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dump format: comment id, post id, then every registry value in order.

inline void write_feature_dump_header(std::ostream& out) {
  out << "comment_id\tpost_id";
  for (const auto& name : feature_registry()) out << '\t' << name;
  out << '\n';
}

inline void write_feature_dump_row(std::ostream& out,
                                   const std::string& comment_id,
                                   const std::string& post_id,
                                   const FeatureVector& fv) {
  out << comment_id << '\t' << post_id;
  for (double v : fv.values) out << '\t' << format_double(v);
  out << '\n';
}

}  // namespace threadrank::features

#endif  // THREADRANK_FEATURES_HPP_
