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
 * Synthetic community generator. Comment bodies are assembled from small
 * word pools so that a handful of feature values are controlled exactly;
 * the true score is a planted linear combination of those values plus
 * Gaussian noise scaled to a fraction of the signal's standard deviation.
 * Comment timestamps follow a cubic profile (60*(i+1)^3 seconds after the
 * post), which keeps the top of each thread well separated in signal space
 * while lower ranks stay noisy — so rank metrics have headroom at every k.
 */

#ifndef THREADRANK_SYNTH_HPP_
#define THREADRANK_SYNTH_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "threadrank/util.hpp"

namespace threadrank::synth {

struct SynthConfig {
  std::size_t n_threads = 200;
  std::size_t comments_per_thread = 20;
  std::map<std::string, double> weights;  // empty -> default_weights()
  double noise_frac = 0.1;                // of the signal stddev
  std::uint64_t seed = 42;

  void validate() const {
    std::vector<std::string> errors;
    if (n_threads < 2) errors.push_back("synth_threads must be >= 2");
    if (comments_per_thread < 5) {
      errors.push_back("synth_comments_per_thread must be >= 5");
    }
    if (noise_frac < 0.0) errors.push_back("synth_noise must be >= 0");
    for (const auto& [name, _] : weights) {
      if (!is_plantable(name)) {
        errors.push_back("unsupported planted weight '" + name +
                         "' (supported: time_diff, WC, posemo, negemo, "
                         "swear, interrog)");
      }
    }
    if (!errors.empty()) {
      std::string all;
      for (const auto& e : errors) {
        if (!all.empty()) all += "; ";
        all += e;
      }
      throw ValidationError(all);
    }
  }

  static bool is_plantable(const std::string& name) {
    return name == "time_diff" || name == "WC" || name == "posemo" ||
           name == "negemo" || name == "swear" || name == "interrog";
  }
};

inline const std::map<std::string, double>& default_weights() {
  static const std::map<std::string, double> kWeights = {
      {"time_diff", 0.05}, {"posemo", 3.0},   {"negemo", -3.0},
      {"swear", -6.0},     {"interrog", 2.0}, {"WC", 1.0}};
  return kWeights;
}

namespace detail {

// Planted pools. Membership must line up with the starter lexicon: posemo
// words are posemo-only (plus affect/valence), interrog words are not
// function words, and filler words belong to no planted category.
inline const std::vector<std::string>& posemo_pool() {
  static const std::vector<std::string> kPool = {
      "happy", "glad", "great", "love", "nice", "wonderful", "excellent",
      "amazing"};
  return kPool;
}
inline const std::vector<std::string>& negemo_pool() {
  static const std::vector<std::string> kPool = {
      "sad", "bad", "awful", "terrible", "hate", "horrible", "worst",
      "angry"};
  return kPool;
}
inline const std::vector<std::string>& swear_pool() {
  static const std::vector<std::string> kPool = {"damn", "hell", "crap"};
  return kPool;
}
inline const std::vector<std::string>& interrog_pool() {
  static const std::vector<std::string> kPool = {"why", "how", "what",
                                                 "when"};
  return kPool;
}
inline const std::vector<std::string>& filler_pool() {
  static const std::vector<std::string> kPool = {
      "table",  "apple",  "river",  "stone",   "music",  "garden",
      "window", "bottle", "forest", "mountain", "paper", "bridge",
      "copper", "meadow", "lantern", "harbor",  "velvet", "signal",
      "marble", "timber", "the",     "and",     "with",   "from"};
  return kPool;
}

inline std::string pad_number(std::size_t n, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%0*zu", width, n);
  return buf;
}

}  // namespace detail

struct SynthComment {
  std::string id;
  std::string post_id;
  std::string author;
  std::string body;
  std::int64_t created_at = 0;
  bool flaired = false;
  double signal = 0.0;
  double noise = 0.0;
  std::int64_t score = 0;
};

struct SynthOutput {
  std::vector<SynthComment> comments;  // generation order
  double signal_stddev = 0.0;
};

/// Writes posts.jsonl, comments.jsonl and truth.tsv into `outdir` (which
/// must already exist). Same config -> byte-identical files.
inline SynthOutput generate(const SynthConfig& config,
                            const std::string& outdir) {
  config.validate();
  const auto& weights = config.weights.empty() ? default_weights()
                                               : config.weights;
  auto weight_of = [&](const char* name) {
    auto it = weights.find(name);
    return it == weights.end() ? 0.0 : it->second;
  };

  Rng rng(config.seed);
  std::size_t n_authors = std::max<std::size_t>(5, config.n_threads / 2);

  std::ofstream posts(outdir + "/posts.jsonl", std::ios::binary);
  if (!posts) throw IoError("cannot write " + outdir + "/posts.jsonl");

  SynthOutput out;
  out.comments.reserve(config.n_threads * config.comments_per_thread);
  std::size_t comment_counter = 0;

  for (std::size_t t = 0; t < config.n_threads; ++t) {
    std::string post_id = "p" + detail::pad_number(t, 5);
    std::int64_t post_time = 1500000000 + static_cast<std::int64_t>(t) * 86400;
    std::size_t post_author = rng.next_below(n_authors);

    std::string title = "about";
    for (int w = 0; w < 4; ++w) {
      title += " ";
      title += detail::filler_pool()[rng.next_below(
          detail::filler_pool().size())];
    }
    std::string post_body;
    for (int w = 0; w < 12; ++w) {
      if (w > 0) post_body += " ";
      post_body += detail::filler_pool()[rng.next_below(
          detail::filler_pool().size())];
    }
    post_body += ".";

    nlohmann::json pj;
    pj["author"] = "user" + detail::pad_number(post_author, 4);
    pj["created_utc"] = post_time;
    pj["id"] = post_id;
    pj["selftext"] = post_body;
    pj["subreddit"] = "synthetic";
    pj["title"] = title;
    posts << pj.dump() << '\n';

    for (std::size_t i = 0; i < config.comments_per_thread; ++i) {
      SynthComment c;
      c.id = "c" + detail::pad_number(comment_counter++, 7);
      c.post_id = post_id;
      std::size_t author_idx = rng.next_below(n_authors);
      c.author = "user" + detail::pad_number(author_idx, 4);
      c.flaired = author_idx % 7 == 0;
      std::int64_t offset = 60 * static_cast<std::int64_t>(i + 1) *
                            static_cast<std::int64_t>(i + 1) *
                            static_cast<std::int64_t>(i + 1);
      c.created_at = post_time + offset;

      std::size_t n_pos = rng.next_below(5);
      std::size_t n_neg = rng.next_below(5);
      std::size_t n_swear = rng.next_below(3);
      std::size_t n_interrog = rng.next_below(3);
      std::size_t n_filler = 10 + rng.next_below(21);

      std::vector<std::string> tokens;
      auto draw = [&](const std::vector<std::string>& pool, std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
          tokens.push_back(pool[rng.next_below(pool.size())]);
        }
      };
      draw(detail::posemo_pool(), n_pos);
      draw(detail::negemo_pool(), n_neg);
      draw(detail::swear_pool(), n_swear);
      draw(detail::interrog_pool(), n_interrog);
      draw(detail::filler_pool(), n_filler);
      fisher_yates_shuffle(tokens, rng);
      for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (k > 0) c.body += " ";
        c.body += tokens[k];
      }
      c.body += ".";

      double wc = static_cast<double>(tokens.size());
      c.signal = weight_of("time_diff") * static_cast<double>(offset) +
                 weight_of("WC") * wc +
                 weight_of("posemo") * 100.0 * static_cast<double>(n_pos) / wc +
                 weight_of("negemo") * 100.0 * static_cast<double>(n_neg) / wc +
                 weight_of("swear") * 100.0 * static_cast<double>(n_swear) / wc +
                 weight_of("interrog") * 100.0 *
                     static_cast<double>(n_interrog) / wc;
      out.comments.push_back(std::move(c));
    }
  }
  if (!posts) throw IoError("write failed: " + outdir + "/posts.jsonl");
  posts.close();

  // Population stddev of the signal, then one noise pass with the same RNG.
  double mean = 0.0;
  for (const auto& c : out.comments) mean += c.signal;
  mean /= static_cast<double>(out.comments.size());
  double var = 0.0;
  for (const auto& c : out.comments) {
    var += (c.signal - mean) * (c.signal - mean);
  }
  out.signal_stddev = std::sqrt(var / static_cast<double>(out.comments.size()));

  std::ofstream comments(outdir + "/comments.jsonl", std::ios::binary);
  if (!comments) throw IoError("cannot write " + outdir + "/comments.jsonl");
  for (auto& c : out.comments) {
    c.noise = config.noise_frac * out.signal_stddev * rng.next_gauss();
    c.score = std::llround(c.signal + c.noise);
    nlohmann::json cj;
    cj["author"] = c.author;
    if (c.flaired) {
      cj["author_flair_text"] = "expert";
    } else {
      cj["author_flair_text"] = nullptr;
    }
    cj["body"] = c.body;
    cj["created_utc"] = c.created_at;
    cj["id"] = c.id;
    cj["link_id"] = "t3_" + c.post_id;
    cj["score"] = c.score;
    comments << cj.dump() << '\n';
  }
  if (!comments) throw IoError("write failed: " + outdir + "/comments.jsonl");
  comments.close();

  std::ofstream truth(outdir + "/truth.tsv", std::ios::binary);
  if (!truth) throw IoError("cannot write " + outdir + "/truth.tsv");
  truth << "# threadrank-synth-truth v1\n";
  truth << "n_threads\t" << config.n_threads << '\n';
  truth << "comments_per_thread\t" << config.comments_per_thread << '\n';
  truth << "noise_frac\t" << format_double(config.noise_frac) << '\n';
  truth << "seed\t" << config.seed << '\n';
  for (const auto& [name, w] : weights) {
    truth << "weight\t" << name << '\t' << format_double(w) << '\n';
  }
  truth << "signal_stddev\t" << format_double(out.signal_stddev) << '\n';
  truth << "comment_id\tpost_id\tsignal\tnoise\tscore\n";
  for (const auto& c : out.comments) {
    truth << c.id << '\t' << c.post_id << '\t' << format_double(c.signal)
          << '\t' << format_double(c.noise) << '\t' << c.score << '\n';
  }
  if (!truth) throw IoError("write failed: " + outdir + "/truth.tsv");
  return out;
}

}  // namespace threadrank::synth

#endif  // THREADRANK_SYNTH_HPP_
