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
 * Discussion-corpus ingestion: newline-delimited post/comment records,
 * thread assembly, minimum-size filtering and seeded train/test splits.
 */

#ifndef THREADRANK_CORPUS_HPP_
#define THREADRANK_CORPUS_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "json.hpp"
#include "threadrank/util.hpp"

namespace threadrank::corpus {

struct Post {
  std::string id;
  std::string subreddit;
  std::string title;
  std::string body;        // selftext; may be empty for link posts
  std::int64_t created_at = 0;
  std::string author;
};

struct Comment {
  std::string id;
  std::string post_id;
  std::string author;
  std::string body;
  std::int64_t created_at = 0;
  std::int64_t score = 0;
  std::optional<std::string> flair;
};

/// One post plus its comments ordered by (created_at, id).
struct Thread {
  Post post;
  std::vector<Comment> comments;
};

struct DatasetSplit {
  std::set<std::string> train_posts;
  std::set<std::string> test_posts;
  std::uint64_t seed = 0;
};

/// Per-file parse outcome. Malformed lines are skipped, never fatal.
struct LoadReport {
  std::vector<std::string> warnings;  // one entry per skipped line
  std::size_t malformed = 0;
  std::size_t loaded = 0;
};

namespace detail {

// Reddit dumps carry created_utc as either a number or a numeric string.
inline std::int64_t timestamp_field(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_number()) return v.get<std::int64_t>();
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    std::size_t pos = 0;
    double d = std::stod(s, &pos);
    if (pos != s.size()) throw std::runtime_error("bad timestamp string");
    return static_cast<std::int64_t>(d);
  }
  throw std::runtime_error("timestamp is neither number nor string");
}

inline std::string strip_thing_prefix(std::string id) {
  // "t3_abc123" -> "abc123"; other t<digit>_ prefixes stripped the same way.
  if (id.size() > 3 && id[0] == 't' && id[2] == '_' && id[1] >= '0' &&
      id[1] <= '9') {
    return id.substr(3);
  }
  return id;
}

template <typename ParseLine, typename Out>
void load_lines(const std::string& path, LoadReport* report, ParseLine&& parse,
                std::vector<Out>& out) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open records file: " + path);
  std::string line;
  std::size_t lineno = 0;
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    try {
      out.push_back(parse(nlohmann::json::parse(line)));
      ++rep.loaded;
    } catch (const std::exception& e) {
      ++rep.malformed;
      rep.warnings.push_back(path + ":" + std::to_string(lineno) +
                             ": skipped malformed record (" + e.what() + ")");
    }
  }
}

}  // namespace detail

/// Loads one post per line. Records use public dump field names
/// (id, subreddit, title, selftext, created_utc, author). Malformed lines
/// are skipped and reported with their line number; duplicate ids keep the
/// first occurrence.
inline std::vector<Post> load_posts(const std::string& path,
                                    LoadReport* report = nullptr) {
  std::vector<Post> posts;
  detail::load_lines(path, report, [](const nlohmann::json& j) {
    Post p;
    p.id = j.at("id").get<std::string>();
    p.subreddit = j.at("subreddit").get<std::string>();
    p.title = j.at("title").get<std::string>();
    if (j.contains("selftext") && j["selftext"].is_string()) {
      p.body = j["selftext"].get<std::string>();
    }
    p.created_at = detail::timestamp_field(j, "created_utc");
    if (p.created_at <= 0) throw std::runtime_error("non-positive created_utc");
    p.author = j.at("author").get<std::string>();
    if (p.id.empty()) throw std::runtime_error("empty id");
    return p;
  }, posts);

  std::unordered_set<std::string> seen;
  std::vector<Post> unique;
  unique.reserve(posts.size());
  for (auto& p : posts) {
    if (seen.insert(p.id).second) {
      unique.push_back(std::move(p));
    } else if (report) {
      ++report->malformed;
      report->warnings.push_back(path + ": duplicate post id '" + p.id +
                                 "' skipped");
    }
  }
  return unique;
}

/// Loads one comment per line (id, link_id, author, body, created_utc,
/// score, author_flair_text). The "t3_" link prefix is stripped. Comment
/// timestamps may legitimately precede the post's (clock skew in real
/// dumps), so only non-positive values are rejected.
inline std::vector<Comment> load_comments(const std::string& path,
                                          LoadReport* report = nullptr) {
  std::vector<Comment> comments;
  detail::load_lines(path, report, [](const nlohmann::json& j) {
    Comment c;
    c.id = j.at("id").get<std::string>();
    c.post_id = detail::strip_thing_prefix(j.at("link_id").get<std::string>());
    c.author = j.at("author").get<std::string>();
    c.body = j.at("body").get<std::string>();
    c.created_at = detail::timestamp_field(j, "created_utc");
    if (c.created_at <= 0) throw std::runtime_error("non-positive created_utc");
    c.score = j.at("score").get<std::int64_t>();
    if (j.contains("author_flair_text") && j["author_flair_text"].is_string()) {
      std::string flair = j["author_flair_text"].get<std::string>();
      if (!flair.empty()) c.flair = std::move(flair);
    }
    if (c.id.empty() || c.post_id.empty()) throw std::runtime_error("empty id");
    return c;
  }, comments);
  return comments;
}

/// Groups comments under their posts. Comments whose post_id resolves to no
/// ingested post are dropped and counted in *orphan_count. Within a thread
/// comments are ordered by (created_at, id) — a total order, so assembly is
/// idempotent.
inline std::vector<Thread> assemble_threads(std::vector<Post> posts,
                                            const std::vector<Comment>& comments,
                                            std::size_t* orphan_count = nullptr) {
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(posts.size());
  std::vector<Thread> threads;
  threads.reserve(posts.size());
  for (auto& p : posts) {
    index.emplace(p.id, threads.size());
    threads.push_back(Thread{std::move(p), {}});
  }
  std::size_t orphans = 0;
  for (const auto& c : comments) {
    auto it = index.find(c.post_id);
    if (it == index.end()) {
      ++orphans;
      continue;
    }
    threads[it->second].comments.push_back(c);
  }
  for (auto& t : threads) {
    std::sort(t.comments.begin(), t.comments.end(),
              [](const Comment& a, const Comment& b) {
                if (a.created_at != b.created_at)
                  return a.created_at < b.created_at;
                return a.id < b.id;
              });
  }
  if (orphan_count) *orphan_count = orphans;
  return threads;
}

inline std::vector<Thread> filter_min_comments(std::vector<Thread> threads,
                                               std::size_t min_comments = 5) {
  if (min_comments < 1) {
    throw ValidationError("filter_min_comments: min must be >= 1");
  }
  std::vector<Thread> kept;
  kept.reserve(threads.size());
  for (auto& t : threads) {
    if (t.comments.size() >= min_comments) kept.push_back(std::move(t));
  }
  return kept;
}

/// Deterministic train/test partition of posts. Posts are sorted by id,
/// Fisher-Yates shuffled with the splitmix64 stream for `seed`, and the
/// first round(fraction * n) become the training posts (clamped so both
/// partitions are non-empty). All comments inherit their post's partition.
inline DatasetSplit split_by_post(const std::vector<Thread>& threads,
                                  double fraction, std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) {
    throw ValidationError("split_by_post: fraction must be in (0, 1)");
  }
  if (threads.size() < 2) {
    throw ValidationError(
        "split_by_post: need at least 2 threads to form both partitions");
  }
  std::vector<std::string> ids;
  ids.reserve(threads.size());
  for (const auto& t : threads) ids.push_back(t.post.id);
  std::sort(ids.begin(), ids.end());

  Rng rng(seed);
  fisher_yates_shuffle(ids, rng);

  auto n = ids.size();
  auto n_train = static_cast<std::size_t>(
      std::llround(fraction * static_cast<double>(n)));
  n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

  DatasetSplit out;
  out.seed = seed;
  for (std::size_t i = 0; i < n; ++i) {
    (i < n_train ? out.train_posts : out.test_posts).insert(ids[i]);
  }
  return out;
}

}  // namespace threadrank::corpus

#endif  // THREADRANK_CORPUS_HPP_
