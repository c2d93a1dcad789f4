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
 * Pipeline stages and their artifacts. Each stage reads raw inputs and/or
 * the artifacts of earlier stages from the output directory, writes its own
 * artifacts, and records a manifest (effective config, input digests,
 * output digests). Manifests carry no timestamps, so identical inputs and
 * seeds reproduce every artifact byte for byte.
 *
 *   synth     -> synth/posts.jsonl synth/comments.jsonl synth/truth.tsv
 *   ingest    -> ingest/split.tsv ingest/summary.tsv
 *   extract   -> extract/features.tsv extract/targets.tsv
 *   train     -> train/<subreddit>.<family>.model
 *   evaluate  -> evaluate/metrics.tsv evaluate/metrics.txt
 *   posthoc   -> posthoc/effects.tsv posthoc/heatmap.tsv posthoc/top_features.txt
 *   users     -> users/user_impact.tsv
 *   report    -> report/report.txt report/evaluation_table.tsv
 *                report/heatmap_data.tsv
 */

#ifndef THREADRANK_PIPELINE_HPP_
#define THREADRANK_PIPELINE_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "threadrank/corpus.hpp"
#include "threadrank/features.hpp"
#include "threadrank/model.hpp"
#include "threadrank/posthoc.hpp"
#include "threadrank/ranking.hpp"
#include "threadrank/synth.hpp"
#include "threadrank/util.hpp"

namespace threadrank::pipeline {

// ---------------------------------------------------------------------------
// Configuration

struct RunConfig {
  std::string posts;
  std::string comments;
  std::string lexicon;
  std::string embeddings;
  std::string reference_freqs;
  std::string subjectivity_data;
  std::string outdir;

  std::uint64_t split_seed = 1;
  std::uint64_t cv_seed = 2;
  double split_fraction = 0.8;
  std::size_t min_comments = 5;
  std::size_t folds = 10;
  std::vector<double> lambda_grid = model::default_lambda_grid();
  std::vector<std::size_t> precision_ks = {1, 3, 5, 10};
  std::vector<std::size_t> kt_ks = {5, 10, 20};
  double low_percentile = 50.0;
  double high_percentile = 90.0;
  std::size_t threads = 0;  // 0 -> hardware concurrency

  std::size_t synth_threads = 200;
  std::size_t synth_comments = 20;
  double synth_noise = 0.1;
  std::uint64_t synth_seed = 42;
  std::map<std::string, double> synth_weights;  // empty -> generator default

  std::size_t effective_threads() const {
    if (threads > 0) return threads;
    unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : hc;
  }

  /// Applies one key=value assignment. Unparsable values / unknown keys are
  /// reported through `errors` so callers can surface every problem at once.
  void apply(const std::string& key, const std::string& value,
             std::vector<std::string>& errors) {
    try {
      if (key == "posts") posts = value;
      else if (key == "comments") comments = value;
      else if (key == "lexicon") lexicon = value;
      else if (key == "embeddings") embeddings = value;
      else if (key == "reference_freqs") reference_freqs = value;
      else if (key == "subjectivity_data") subjectivity_data = value;
      else if (key == "outdir") outdir = value;
      else if (key == "split_seed") split_seed = parse_u64(value, key);
      else if (key == "cv_seed") cv_seed = parse_u64(value, key);
      else if (key == "split_fraction") split_fraction = parse_double(value, key);
      else if (key == "min_comments") min_comments = parse_u64(value, key);
      else if (key == "folds") folds = parse_u64(value, key);
      else if (key == "lambda_grid") lambda_grid = parse_double_list(value, key);
      else if (key == "precision_ks") precision_ks = parse_size_list(value, key);
      else if (key == "kt_ks") kt_ks = parse_size_list(value, key);
      else if (key == "low_percentile") low_percentile = parse_double(value, key);
      else if (key == "high_percentile") high_percentile = parse_double(value, key);
      else if (key == "threads") threads = parse_u64(value, key);
      else if (key == "synth_threads") synth_threads = parse_u64(value, key);
      else if (key == "synth_comments") synth_comments = parse_u64(value, key);
      else if (key == "synth_noise") synth_noise = parse_double(value, key);
      else if (key == "synth_seed") synth_seed = parse_u64(value, key);
      else if (key == "synth_weights") synth_weights = parse_weights(value, key);
      else errors.push_back("unknown config key '" + key + "'");
    } catch (const ValidationError& e) {
      errors.push_back(e.what());
    }
  }

  /// Cross-field checks, collected rather than thrown one at a time.
  void collect_errors(std::vector<std::string>& errors) const {
    if (!(split_fraction > 0.0 && split_fraction < 1.0)) {
      errors.push_back("split_fraction must be in (0, 1)");
    }
    if (min_comments < 1) errors.push_back("min_comments must be >= 1");
    if (folds < 2) errors.push_back("folds must be >= 2");
    if (lambda_grid.empty()) errors.push_back("lambda_grid must be non-empty");
    for (double l : lambda_grid) {
      if (l < 0.0) errors.push_back("lambda_grid values must be >= 0");
    }
    if (precision_ks.empty()) errors.push_back("precision_ks must be non-empty");
    if (kt_ks.empty()) errors.push_back("kt_ks must be non-empty");
    if (!(low_percentile > 0.0 && low_percentile < high_percentile &&
          high_percentile <= 100.0)) {
      errors.push_back(
          "percentiles must satisfy 0 < low_percentile < high_percentile <= 100");
    }
    try {
      synth_config().validate();
    } catch (const ValidationError& e) {
      errors.push_back(e.what());
    }
  }

  synth::SynthConfig synth_config() const {
    synth::SynthConfig sc;
    sc.n_threads = synth_threads;
    sc.comments_per_thread = synth_comments;
    sc.noise_frac = synth_noise;
    sc.seed = synth_seed;
    sc.weights = synth_weights;
    return sc;
  }

  /// Every effective key, sorted — echoed into stage manifests.
  std::map<std::string, std::string> echo() const {
    std::map<std::string, std::string> m;
    m["posts"] = posts;
    m["comments"] = comments;
    m["lexicon"] = lexicon;
    m["embeddings"] = embeddings;
    m["reference_freqs"] = reference_freqs;
    m["subjectivity_data"] = subjectivity_data;
    m["outdir"] = outdir;
    m["split_seed"] = std::to_string(split_seed);
    m["cv_seed"] = std::to_string(cv_seed);
    m["split_fraction"] = format_double(split_fraction);
    m["min_comments"] = std::to_string(min_comments);
    m["folds"] = std::to_string(folds);
    m["lambda_grid"] = join_doubles(lambda_grid);
    m["precision_ks"] = join_sizes(precision_ks);
    m["kt_ks"] = join_sizes(kt_ks);
    m["low_percentile"] = format_double(low_percentile);
    m["high_percentile"] = format_double(high_percentile);
    m["threads"] = std::to_string(threads);
    m["synth_threads"] = std::to_string(synth_threads);
    m["synth_comments"] = std::to_string(synth_comments);
    m["synth_noise"] = format_double(synth_noise);
    m["synth_seed"] = std::to_string(synth_seed);
    std::string w;
    for (const auto& [name, weight] : synth_weights) {
      if (!w.empty()) w += ",";
      w += name + ":" + format_double(weight);
    }
    m["synth_weights"] = w;
    return m;
  }

 private:
  static std::uint64_t parse_u64(const std::string& v, const std::string& key) {
    long long n = parse_int(v, key);
    if (n < 0) throw ValidationError(key + " must be >= 0");
    return static_cast<std::uint64_t>(n);
  }
  static std::vector<double> parse_double_list(const std::string& v,
                                               const std::string& key) {
    std::vector<double> out;
    for (const auto& part : split(v, ',')) {
      if (trim(part).empty()) continue;
      out.push_back(parse_double(trim(part), key));
    }
    return out;
  }
  static std::vector<std::size_t> parse_size_list(const std::string& v,
                                                  const std::string& key) {
    std::vector<std::size_t> out;
    for (const auto& part : split(v, ',')) {
      if (trim(part).empty()) continue;
      long long n = parse_int(trim(part), key);
      if (n < 1) throw ValidationError(key + " entries must be >= 1");
      out.push_back(static_cast<std::size_t>(n));
    }
    return out;
  }
  static std::map<std::string, double> parse_weights(const std::string& v,
                                                     const std::string& key) {
    std::map<std::string, double> out;
    for (const auto& part : split(v, ',')) {
      std::string_view p = trim(part);
      if (p.empty()) continue;
      auto colon = p.find(':');
      if (colon == std::string_view::npos) {
        throw ValidationError(key + " entries must look like name:weight");
      }
      out[std::string(trim(p.substr(0, colon)))] =
          parse_double(trim(p.substr(colon + 1)), key);
    }
    return out;
  }
  static std::string join_doubles(const std::vector<double>& v) {
    std::string s;
    for (double x : v) {
      if (!s.empty()) s += ",";
      s += format_double(x);
    }
    return s;
  }
  static std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t x : v) {
      if (!s.empty()) s += ",";
      s += std::to_string(x);
    }
    return s;
  }
};

/// Flat key=value file; '#' comments and blank lines ignored.
inline RunConfig load_config(const std::string& path,
                             std::vector<std::string>& errors) {
  std::ifstream in(path);
  if (!in) {
    errors.push_back("cannot open config file: " + path);
    return {};
  }
  RunConfig config;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto eq = sv.find('=');
    if (eq == std::string_view::npos) {
      errors.push_back(path + ":" + std::to_string(lineno) +
                       ": expected key = value");
      continue;
    }
    config.apply(std::string(trim(sv.substr(0, eq))),
                 std::string(trim(sv.substr(eq + 1))), errors);
  }
  return config;
}

// ---------------------------------------------------------------------------
// Manifests

class StageManifest {
 public:
  StageManifest(std::string stage, const RunConfig& config)
      : stage_(std::move(stage)), config_(config) {}

  void note_input(const std::string& path) {
    inputs_.emplace_back(path, hex64(fnv1a64_file(path)));
  }
  void note_output(const std::string& relpath) {
    outputs_.emplace_back(
        relpath, hex64(fnv1a64_file(config_.outdir + "/" + relpath)));
  }

  void write() const {
    std::filesystem::create_directories(config_.outdir + "/manifest");
    std::string path = config_.outdir + "/manifest/" + stage_ + ".txt";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path);
    out << "stage\t" << stage_ << '\n';
    out << "version\t" << kVersion << '\n';
    for (const auto& [k, v] : config_.echo()) {
      out << "config\t" << k << '\t' << v << '\n';
    }
    for (const auto& [p, d] : inputs_) out << "input\t" << p << '\t' << d << '\n';
    for (const auto& [p, d] : outputs_) {
      out << "output\t" << p << '\t' << d << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
  }

 private:
  std::string stage_;
  const RunConfig& config_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

// ---------------------------------------------------------------------------
// Shared artifact plumbing

namespace detail {

inline void require_file(const std::string& path, const std::string& what) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError(what + " not found: " + path);
  }
}

inline void require_artifact(const std::string& path, const char* stage) {
  if (!std::filesystem::exists(path)) {
    throw ValidationError("missing artifact " + path + "; run the '" +
                          std::string(stage) + "' stage first");
  }
}

inline void require_inputs(
    const std::vector<std::pair<std::string, std::string>>& path_and_key) {
  std::vector<std::string> errors;
  for (const auto& [path, key] : path_and_key) {
    if (path.empty()) {
      errors.push_back("config key '" + key + "' is required for this stage");
    } else if (!std::filesystem::exists(path)) {
      errors.push_back("config key '" + key + "': file not found: " + path);
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

struct SplitEntry {
  std::string subreddit;
  bool train = false;
};

inline std::map<std::string, SplitEntry> read_split(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::map<std::string, SplitEntry> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    auto fields = split(trim(line), '\t');
    if (trim(line).empty()) continue;
    if (fields.size() != 3) {
      throw ValidationError(path + ": malformed split row: " + line);
    }
    out[std::string(trim(fields[0]))] = {std::string(trim(fields[1])),
                                         trim(fields[2]) == "train"};
  }
  return out;
}

struct TargetRow {
  std::string subreddit;
  std::string post_id;
  std::string comment_id;
  std::string author;
  std::int64_t score = 0;
  bool flaired = false;
  bool train = false;
};

struct FeatureRow {
  std::string comment_id;
  std::string post_id;
  features::FeatureVector fv;
};

inline std::vector<TargetRow> read_targets(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<TargetRow> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split(trim(line), '\t');
    if (fields.size() != 7) {
      throw ValidationError(path + ": malformed target row: " + line);
    }
    TargetRow row;
    row.subreddit = std::string(trim(fields[0]));
    row.post_id = std::string(trim(fields[1]));
    row.comment_id = std::string(trim(fields[2]));
    row.author = std::string(trim(fields[3]));
    row.score = parse_int(trim(fields[4]), "target score");
    row.flaired = trim(fields[5]) == "1";
    row.train = trim(fields[6]) == "train";
    out.push_back(std::move(row));
  }
  return out;
}

inline std::vector<FeatureRow> read_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<FeatureRow> out;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (header) {
      header = false;
      continue;
    }
    if (trim(line).empty()) continue;
    auto fields = split(trim(line), '\t');
    if (fields.size() != 2 + features::kFeatureCount) {
      throw ValidationError(path + ": malformed feature row: " + line);
    }
    FeatureRow row;
    row.comment_id = std::string(trim(fields[0]));
    row.post_id = std::string(trim(fields[1]));
    for (std::size_t i = 0; i < features::kFeatureCount; ++i) {
      row.fv.values[i] = parse_double(trim(fields[2 + i]), "feature value");
    }
    out.push_back(std::move(row));
  }
  return out;
}

/// Threads retained by ingest (present in split.tsv), grouped by subreddit,
/// post order ascending within each group.
inline std::map<std::string, std::vector<corpus::Thread>> load_split_threads(
    const RunConfig& config, const std::map<std::string, SplitEntry>& split) {
  corpus::LoadReport posts_report, comments_report;
  auto posts = corpus::load_posts(config.posts, &posts_report);
  auto comments = corpus::load_comments(config.comments, &comments_report);
  auto threads = corpus::assemble_threads(posts, comments, nullptr);
  std::map<std::string, std::vector<corpus::Thread>> by_subreddit;
  std::vector<corpus::Thread*> kept;
  for (auto& t : threads) {
    if (split.count(t.post.id)) kept.push_back(&t);
  }
  std::sort(kept.begin(), kept.end(),
            [](const corpus::Thread* a, const corpus::Thread* b) {
              return a->post.id < b->post.id;
            });
  for (corpus::Thread* t : kept) {
    by_subreddit[t->post.subreddit].push_back(std::move(*t));
  }
  return by_subreddit;
}

inline std::string model_path(const RunConfig& config,
                              const std::string& subreddit,
                              const std::string& family) {
  return config.outdir + "/train/" + subreddit + "." + family + ".model";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Stages

inline void run_synth(const RunConfig& config) {
  std::filesystem::create_directories(config.outdir + "/synth");
  StageManifest manifest("synth", config);
  synth::generate(config.synth_config(), config.outdir + "/synth");
  manifest.note_output("synth/posts.jsonl");
  manifest.note_output("synth/comments.jsonl");
  manifest.note_output("synth/truth.tsv");
  manifest.write();
}

inline void run_ingest(const RunConfig& config) {
  detail::require_inputs({{config.posts, "posts"},
                          {config.comments, "comments"}});
  std::filesystem::create_directories(config.outdir + "/ingest");
  StageManifest manifest("ingest", config);
  manifest.note_input(config.posts);
  manifest.note_input(config.comments);

  corpus::LoadReport posts_report, comments_report;
  auto posts = corpus::load_posts(config.posts, &posts_report);
  auto comments = corpus::load_comments(config.comments, &comments_report);
  for (const auto& w : posts_report.warnings) std::cerr << w << '\n';
  for (const auto& w : comments_report.warnings) std::cerr << w << '\n';
  std::size_t orphans = 0;
  auto threads = corpus::assemble_threads(posts, comments, &orphans);
  std::size_t threads_total = threads.size();
  auto retained = corpus::filter_min_comments(threads, config.min_comments);
  corpus::DatasetSplit dataset =
      corpus::split_by_post(retained, config.split_fraction, config.split_seed);

  // split.tsv: one row per retained post, sorted by post id.
  std::vector<const corpus::Thread*> sorted;
  for (const auto& t : retained) sorted.push_back(&t);
  std::sort(sorted.begin(), sorted.end(),
            [](const corpus::Thread* a, const corpus::Thread* b) {
              return a->post.id < b->post.id;
            });
  {
    std::ofstream out(config.outdir + "/ingest/split.tsv", std::ios::binary);
    if (!out) throw IoError("cannot write split.tsv");
    out << "post_id\tsubreddit\tpartition\n";
    for (const corpus::Thread* t : sorted) {
      bool train = dataset.train_posts.count(t->post.id) > 0;
      out << t->post.id << '\t' << t->post.subreddit << '\t'
          << (train ? "train" : "test") << '\n';
    }
  }
  {
    std::set<std::string> subreddits;
    std::size_t retained_comments = 0;
    for (const auto& t : retained) {
      subreddits.insert(t.post.subreddit);
      retained_comments += t.comments.size();
    }
    std::ofstream out(config.outdir + "/ingest/summary.tsv", std::ios::binary);
    if (!out) throw IoError("cannot write summary.tsv");
    out << "posts_loaded\t" << posts_report.loaded << '\n';
    out << "posts_malformed\t" << posts_report.malformed << '\n';
    out << "comments_loaded\t" << comments_report.loaded << '\n';
    out << "comments_malformed\t" << comments_report.malformed << '\n';
    out << "orphan_comments\t" << orphans << '\n';
    out << "threads_total\t" << threads_total << '\n';
    out << "threads_retained\t" << retained.size() << '\n';
    out << "comments_retained\t" << retained_comments << '\n';
    out << "train_threads\t" << dataset.train_posts.size() << '\n';
    out << "test_threads\t" << dataset.test_posts.size() << '\n';
    out << "subreddits\t" << subreddits.size() << '\n';
  }
  manifest.note_output("ingest/split.tsv");
  manifest.note_output("ingest/summary.tsv");
  manifest.write();
}

inline void run_extract(const RunConfig& config) {
  detail::require_inputs({{config.posts, "posts"},
                          {config.comments, "comments"},
                          {config.lexicon, "lexicon"},
                          {config.embeddings, "embeddings"},
                          {config.reference_freqs, "reference_freqs"},
                          {config.subjectivity_data, "subjectivity_data"}});
  detail::require_artifact(config.outdir + "/ingest/split.tsv", "ingest");
  std::filesystem::create_directories(config.outdir + "/extract");
  StageManifest manifest("extract", config);
  for (const auto& path :
       {config.posts, config.comments, config.lexicon, config.embeddings,
        config.reference_freqs, config.subjectivity_data}) {
    manifest.note_input(path);
  }
  manifest.note_input(config.outdir + "/ingest/split.tsv");

  auto split = detail::read_split(config.outdir + "/ingest/split.tsv");
  auto by_subreddit = detail::load_split_threads(config, split);

  textstats::Lexicon lexicon = textstats::load_lexicon(config.lexicon);
  textstats::EmbeddingTable embeddings =
      textstats::EmbeddingTable::load(config.embeddings);
  textstats::FrequencyTable reference =
      textstats::FrequencyTable::load(config.reference_freqs);
  features::SubjectivityModel subjectivity = features::SubjectivityModel::train(
      features::load_labeled_sentences(config.subjectivity_data));

  std::ofstream features_out(config.outdir + "/extract/features.tsv",
                             std::ios::binary);
  std::ofstream targets_out(config.outdir + "/extract/targets.tsv",
                            std::ios::binary);
  if (!features_out || !targets_out) throw IoError("cannot write extract artifacts");
  features::write_feature_dump_header(features_out);
  targets_out << "subreddit\tpost_id\tcomment_id\tauthor\tscore\tflair\t"
                 "partition\n";

  for (const auto& [subreddit, threads] : by_subreddit) {
    // Community language resources come from the training partition only.
    textstats::FrequencyTable community(subreddit);
    std::vector<corpus::Thread> train_threads;
    for (const auto& t : threads) {
      if (split.at(t.post.id).train) train_threads.push_back(t);
    }
    for (const auto& t : train_threads) {
      for (const auto& c : t.comments) {
        for (const auto& tok : textstats::tokenize(c.body).tokens) {
          community.add(tok);
        }
      }
    }
    features::UserStatsTable users = features::UserStatsTable::build(train_threads);

    features::Resources res;
    res.lexicon = &lexicon;
    res.embeddings = &embeddings;
    res.reference = &reference;
    res.community = &community;
    res.subjectivity = &subjectivity;
    res.users = &users;

    std::vector<std::vector<features::FeatureVector>> extracted(threads.size());
    parallel_for(threads.size(), config.effective_threads(),
                 [&](std::size_t begin, std::size_t end) {
                   for (std::size_t i = begin; i < end; ++i) {
                     extracted[i] = features::extract_all(threads[i], res);
                   }
                 });
    for (std::size_t i = 0; i < threads.size(); ++i) {
      const corpus::Thread& t = threads[i];
      bool train = split.at(t.post.id).train;
      for (std::size_t c = 0; c < t.comments.size(); ++c) {
        const corpus::Comment& comment = t.comments[c];
        features::write_feature_dump_row(features_out, comment.id, t.post.id,
                                         extracted[i][c]);
        targets_out << subreddit << '\t' << t.post.id << '\t' << comment.id
                    << '\t' << comment.author << '\t' << comment.score << '\t'
                    << (comment.flair && !comment.flair->empty() ? 1 : 0)
                    << '\t' << (train ? "train" : "test") << '\n';
      }
    }
  }
  if (!features_out || !targets_out) throw IoError("extract write failed");
  features_out.close();
  targets_out.close();
  manifest.note_output("extract/features.tsv");
  manifest.note_output("extract/targets.tsv");
  manifest.write();
}

inline void run_train(const RunConfig& config) {
  detail::require_artifact(config.outdir + "/extract/features.tsv", "extract");
  detail::require_artifact(config.outdir + "/extract/targets.tsv", "extract");
  std::filesystem::create_directories(config.outdir + "/train");
  StageManifest manifest("train", config);
  manifest.note_input(config.outdir + "/extract/features.tsv");
  manifest.note_input(config.outdir + "/extract/targets.tsv");

  auto feats = detail::read_features(config.outdir + "/extract/features.tsv");
  auto targets = detail::read_targets(config.outdir + "/extract/targets.tsv");
  if (feats.size() != targets.size()) {
    throw ValidationError("features.tsv and targets.tsv row counts differ");
  }

  std::map<std::string, std::vector<std::size_t>> train_rows;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i].train) train_rows[targets[i].subreddit].push_back(i);
  }
  for (const auto& [subreddit, rows] : train_rows) {
    std::vector<features::FeatureVector> x;
    std::vector<double> y;
    x.reserve(rows.size());
    y.reserve(rows.size());
    for (std::size_t i : rows) {
      x.push_back(feats[i].fv);
      y.push_back(static_cast<double>(targets[i].score));
    }
    for (const auto& family : model::feature_families()) {
      model::RidgeModel m = model::train_family(
          x, y, family, config.lambda_grid, config.folds, config.cv_seed);
      std::string path = detail::model_path(config, subreddit, family.name);
      model::save_model(m, path);
      manifest.note_output("train/" + subreddit + "." + family.name + ".model");
    }
  }
  manifest.write();
}

inline void run_evaluate(const RunConfig& config) {
  detail::require_artifact(config.outdir + "/extract/features.tsv", "extract");
  detail::require_artifact(config.outdir + "/extract/targets.tsv", "extract");
  std::filesystem::create_directories(config.outdir + "/evaluate");
  StageManifest manifest("evaluate", config);
  manifest.note_input(config.outdir + "/extract/features.tsv");
  manifest.note_input(config.outdir + "/extract/targets.tsv");

  auto feats = detail::read_features(config.outdir + "/extract/features.tsv");
  auto targets = detail::read_targets(config.outdir + "/extract/targets.tsv");
  if (feats.size() != targets.size()) {
    throw ValidationError("features.tsv and targets.tsv row counts differ");
  }

  std::set<std::string> subreddits;
  for (const auto& t : targets) subreddits.insert(t.subreddit);
  for (const auto& subreddit : subreddits) {
    for (const auto& family : model::feature_families()) {
      detail::require_artifact(
          detail::model_path(config, subreddit, family.name), "train");
    }
  }

  std::ofstream tsv(config.outdir + "/evaluate/metrics.tsv", std::ios::binary);
  std::ofstream txt(config.outdir + "/evaluate/metrics.txt", std::ios::binary);
  if (!tsv || !txt) throw IoError("cannot write evaluate artifacts");
  tsv << "subreddit\tfamily";
  for (std::size_t k : config.precision_ks) {
    tsv << "\tP@" << k << "\tP@" << k << "_eligible";
  }
  for (std::size_t k : config.kt_ks) {
    tsv << "\tKT@" << k << "\tKT@" << k << "_eligible";
  }
  tsv << '\n';

  for (const auto& subreddit : subreddits) {
    // Test threads: comment rows grouped by post, file order within a post.
    std::map<std::string, std::vector<std::size_t>> posts_rows;
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (targets[i].subreddit == subreddit && !targets[i].train) {
        posts_rows[targets[i].post_id].push_back(i);
      }
    }
    std::vector<ranking::RankingMetricsReport> reports;
    for (const auto& family : model::feature_families()) {
      model::RidgeModel m = model::load_model(
          detail::model_path(config, subreddit, family.name));
      manifest.note_input(detail::model_path(config, subreddit, family.name));
      std::vector<std::vector<ranking::Entry>> threads;
      threads.reserve(posts_rows.size());
      for (const auto& [post_id, rows] : posts_rows) {
        std::vector<ranking::Entry> entries;
        entries.reserve(rows.size());
        for (std::size_t i : rows) {
          entries.push_back({targets[i].comment_id,
                             static_cast<double>(targets[i].score),
                             m.predict(feats[i].fv)});
        }
        threads.push_back(std::move(entries));
      }
      reports.push_back(ranking::evaluate_family(
          family.name, threads, config.precision_ks, config.kt_ks));
    }
    for (const auto& r : reports) {
      tsv << subreddit << '\t' << r.family;
      for (const auto& [k, cell] : r.precision_at) {
        tsv << '\t' << format_double(cell.mean) << '\t' << cell.eligible;
      }
      for (const auto& [k, cell] : r.kt_at) {
        tsv << '\t' << format_double(cell.mean) << '\t' << cell.eligible;
      }
      tsv << '\n';
    }
    txt << "subreddit: " << subreddit << '\n';
    ranking::write_metrics_table(txt, reports);
    txt << '\n';
  }
  if (!tsv || !txt) throw IoError("evaluate write failed");
  tsv.close();
  txt.close();
  manifest.note_output("evaluate/metrics.tsv");
  manifest.note_output("evaluate/metrics.txt");
  manifest.write();
}

inline void run_posthoc(const RunConfig& config) {
  detail::require_artifact(config.outdir + "/extract/features.tsv", "extract");
  detail::require_artifact(config.outdir + "/extract/targets.tsv", "extract");
  std::filesystem::create_directories(config.outdir + "/posthoc");
  StageManifest manifest("posthoc", config);
  manifest.note_input(config.outdir + "/extract/features.tsv");
  manifest.note_input(config.outdir + "/extract/targets.tsv");

  auto feats = detail::read_features(config.outdir + "/extract/features.tsv");
  auto targets = detail::read_targets(config.outdir + "/extract/targets.tsv");
  if (feats.size() != targets.size()) {
    throw ValidationError("features.tsv and targets.tsv row counts differ");
  }

  std::map<std::string, std::vector<std::size_t>> rows_by_subreddit;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    rows_by_subreddit[targets[i].subreddit].push_back(i);
  }

  std::ofstream effects(config.outdir + "/posthoc/effects.tsv",
                        std::ios::binary);
  std::ofstream heatmap(config.outdir + "/posthoc/heatmap.tsv",
                        std::ios::binary);
  std::ofstream top(config.outdir + "/posthoc/top_features.txt",
                    std::ios::binary);
  if (!effects || !heatmap || !top) throw IoError("cannot write posthoc artifacts");
  effects << "subreddit\tfeature\tD\tp_value\tmean_diff\tn_low\tn_high\n";

  std::map<std::string, posthoc::PosthocReport> reports;
  for (const auto& [subreddit, rows] : rows_by_subreddit) {
    std::vector<features::FeatureVector> x;
    std::vector<double> scores;
    x.reserve(rows.size());
    scores.reserve(rows.size());
    for (std::size_t i : rows) {
      x.push_back(feats[i].fv);
      scores.push_back(static_cast<double>(targets[i].score));
    }
    posthoc::PosthocReport report = posthoc::posthoc_report(
        x, scores, config.low_percentile, config.high_percentile);
    for (const auto& r : report.per_feature) {
      effects << subreddit << '\t' << r.feature << '\t' << format_double(r.d)
              << '\t' << format_double(r.p_value) << '\t'
              << format_double(r.mean_diff) << '\t' << r.n_low << '\t'
              << r.n_high << '\n';
    }
    top << "subreddit: " << subreddit << '\n';
    if (report.degenerate) {
      top << "  (degenerate class split: all scores equal or a class is "
             "empty)\n";
    } else if (report.top_features.empty()) {
      top << "  (no significant features at p < 0.05)\n";
    } else {
      for (std::size_t i = 0; i < report.top_features.size(); ++i) {
        const auto& r = report.top_features[i];
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "  %2zu. %-14s D=%.4f p=%.3g direction=%s\n", i + 1,
                      r.feature.c_str(), r.d, r.p_value,
                      r.mean_diff >= 0.0 ? "+" : "-");
        top << buf;
      }
    }
    top << '\n';
    reports[subreddit] = std::move(report);
  }

  heatmap << "feature";
  for (const auto& [subreddit, _] : reports) heatmap << '\t' << subreddit;
  heatmap << '\n';
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    heatmap << features::feature_registry()[f];
    for (const auto& [subreddit, report] : reports) {
      double signed_intensity = 0.0;
      if (!report.degenerate && report.intensity[f] > 0.0) {
        double sign = report.per_feature[f].mean_diff < 0.0 ? -1.0 : 1.0;
        signed_intensity = sign * report.intensity[f];
      }
      heatmap << '\t' << format_double(signed_intensity);
    }
    heatmap << '\n';
  }
  if (!effects || !heatmap || !top) throw IoError("posthoc write failed");
  effects.close();
  heatmap.close();
  top.close();
  manifest.note_output("posthoc/effects.tsv");
  manifest.note_output("posthoc/heatmap.tsv");
  manifest.note_output("posthoc/top_features.txt");
  manifest.write();
}

inline void run_users(const RunConfig& config) {
  detail::require_inputs({{config.posts, "posts"},
                          {config.comments, "comments"}});
  detail::require_artifact(config.outdir + "/ingest/split.tsv", "ingest");
  std::filesystem::create_directories(config.outdir + "/users");
  StageManifest manifest("users", config);
  manifest.note_input(config.posts);
  manifest.note_input(config.comments);
  manifest.note_input(config.outdir + "/ingest/split.tsv");

  auto split = detail::read_split(config.outdir + "/ingest/split.tsv");
  auto by_subreddit = detail::load_split_threads(config, split);

  std::ofstream out(config.outdir + "/users/user_impact.tsv", std::ios::binary);
  if (!out) throw IoError("cannot write users/user_impact.tsv");
  out << "subreddit\tby_max_h_index\tby_max_activity\tby_flaired_user\t"
         "n_threads\n";
  for (const auto& [subreddit, threads] : by_subreddit) {
    std::vector<corpus::Thread> train_threads;
    for (const auto& t : threads) {
      if (split.at(t.post.id).train) train_threads.push_back(t);
    }
    features::UserStatsTable users = features::UserStatsTable::build(train_threads);
    posthoc::UserImpactReport report = posthoc::user_impact(threads, users);
    out << subreddit << '\t' << format_double(report.by_max_h_index) << '\t'
        << format_double(report.by_max_activity) << '\t'
        << format_double(report.by_flaired_user) << '\t' << report.n_threads
        << '\n';
  }
  if (!out) throw IoError("users write failed");
  out.close();
  manifest.note_output("users/user_impact.tsv");
  manifest.write();
}

inline void run_report(const RunConfig& config) {
  detail::require_artifact(config.outdir + "/evaluate/metrics.tsv", "evaluate");
  detail::require_artifact(config.outdir + "/posthoc/heatmap.tsv", "posthoc");
  detail::require_artifact(config.outdir + "/posthoc/top_features.txt",
                           "posthoc");
  detail::require_artifact(config.outdir + "/users/user_impact.tsv", "users");
  std::filesystem::create_directories(config.outdir + "/report");
  StageManifest manifest("report", config);
  for (const auto& rel :
       {"evaluate/metrics.tsv", "evaluate/metrics.txt", "posthoc/heatmap.tsv",
        "posthoc/top_features.txt", "users/user_impact.tsv"}) {
    manifest.note_input(config.outdir + "/" + rel);
  }

  auto slurp = [](const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  auto emit = [&](const std::string& relpath, const std::string& content) {
    std::ofstream out(config.outdir + "/" + relpath, std::ios::binary);
    if (!out) throw IoError("cannot write " + relpath);
    out << content;
    if (!out) throw IoError("write failed: " + relpath);
  };

  emit("report/evaluation_table.tsv",
       slurp(config.outdir + "/evaluate/metrics.tsv"));
  emit("report/heatmap_data.tsv", slurp(config.outdir + "/posthoc/heatmap.tsv"));

  std::string body;
  body += "community comment ranking report\n";
  body += "================================\n\n";
  body += "ranking metrics by feature family\n";
  body += "---------------------------------\n";
  body += slurp(config.outdir + "/evaluate/metrics.txt");
  body += "top score-separating features (two-sample KS, p < 0.05)\n";
  body += "--------------------------------------------------------\n";
  body += slurp(config.outdir + "/posthoc/top_features.txt");
  body += "share of threads whose top comment comes from...\n";
  body += "-------------------------------------------------\n";
  body += slurp(config.outdir + "/users/user_impact.tsv");
  emit("report/report.txt", body);

  manifest.note_output("report/evaluation_table.tsv");
  manifest.note_output("report/heatmap_data.tsv");
  manifest.note_output("report/report.txt");
  manifest.write();
}

/// Dispatch by stage name; unknown stage -> ValidationError.
inline void run_stage(const std::string& stage, const RunConfig& config) {
  if (config.outdir.empty()) {
    throw ValidationError("config key 'outdir' is required");
  }
  std::filesystem::create_directories(config.outdir);
  if (stage == "synth") run_synth(config);
  else if (stage == "ingest") run_ingest(config);
  else if (stage == "extract") run_extract(config);
  else if (stage == "train") run_train(config);
  else if (stage == "evaluate") run_evaluate(config);
  else if (stage == "posthoc") run_posthoc(config);
  else if (stage == "users") run_users(config);
  else if (stage == "report") run_report(config);
  else throw ValidationError("unknown stage: " + stage);
}

}  // namespace threadrank::pipeline

#endif  // THREADRANK_PIPELINE_HPP_
