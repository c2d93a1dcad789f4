// Copyright 2026 The threadrank Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <string>
#include <vector>

#include "test_helpers.hpp"
#include "threadrank/pipeline.hpp"

using namespace threadrank;
using namespace threadrank::pipeline;
using testutil::TempDir;
using testutil::write_file;

namespace {

RunConfig small_config(const std::string& outdir) {
  RunConfig config;
  config.outdir = outdir;
  config.posts = outdir + "/synth/posts.jsonl";
  config.comments = outdir + "/synth/comments.jsonl";
  config.lexicon = std::string(THREADRANK_DATA_DIR) + "/starter_lexicon.tsv";
  config.embeddings = std::string(THREADRANK_DATA_DIR) +
                      "/embeddings_small.txt";
  config.reference_freqs = std::string(THREADRANK_DATA_DIR) +
                           "/reference_freqs.tsv";
  config.subjectivity_data = std::string(THREADRANK_DATA_DIR) +
                             "/subjectivity_train.tsv";
  config.synth_threads = 14;
  config.synth_comments = 6;
  config.synth_seed = 5;
  config.threads = 1;
  return config;
}

void run_all_stages(const RunConfig& config) {
  for (const char* stage : {"synth", "ingest", "extract", "train", "evaluate",
                            "posthoc", "users", "report"}) {
    run_stage(stage, config);
  }
}

std::size_t count_lines(const std::string& content) {
  std::size_t n = 0;
  for (char c : content) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("config assignments collect every error") {
  RunConfig config;
  std::vector<std::string> errors;
  config.apply("outdir", "/tmp/x", errors);
  config.apply("split_fraction", "0.7", errors);
  config.apply("lambda_grid", "0.1, 1, 10", errors);
  config.apply("synth_weights", "posemo:2.5, WC:1", errors);
  CHECK(errors.empty());
  CHECK(config.outdir == "/tmp/x");
  CHECK(config.split_fraction == 0.7);
  CHECK(config.lambda_grid == std::vector<double>{0.1, 1.0, 10.0});
  CHECK(config.synth_weights.at("posemo") == 2.5);

  config.apply("no_such_key", "1", errors);
  config.apply("folds", "many", errors);
  config.apply("synth_weights", "broken", errors);
  REQUIRE(errors.size() == 3);
  CHECK(errors[0].find("no_such_key") != std::string::npos);
  CHECK(errors[1].find("folds") != std::string::npos);
  CHECK(errors[2].find("name:weight") != std::string::npos);
}

TEST_CASE("cross-field validation reports all problems at once") {
  RunConfig config;
  config.split_fraction = 1.5;
  config.folds = 1;
  config.low_percentile = 95.0;  // above high_percentile
  config.lambda_grid.clear();
  std::vector<std::string> errors;
  config.collect_errors(errors);
  CHECK(errors.size() == 4);
}

TEST_CASE("config files parse key = value lines") {
  TempDir dir;
  auto path = write_file(dir.file("run.conf"),
                         "# sample\n"
                         "outdir = out\n"
                         "split_seed = 9\n"
                         "\n"
                         "kt_ks = 5, 10\n"
                         "bad line without equals\n");
  std::vector<std::string> errors;
  RunConfig config = load_config(path, errors);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].find(":6:") != std::string::npos);
  CHECK(config.outdir == "out");
  CHECK(config.split_seed == 9);
  CHECK(config.kt_ks == std::vector<std::size_t>{5, 10});

  std::vector<std::string> missing_errors;
  load_config(dir.file("absent.conf").string(), missing_errors);
  CHECK(missing_errors.size() == 1);
}

TEST_CASE("bundled example config parses cleanly") {
  std::vector<std::string> errors;
  RunConfig config = load_config(
      std::string(THREADRANK_DATA_DIR) + "/example.conf", errors);
  CHECK(errors.empty());
  config.collect_errors(errors);
  CHECK(errors.empty());
  CHECK_FALSE(config.outdir.empty());
}

TEST_CASE("stages demand their prerequisites by name") {
  TempDir dir;
  RunConfig config = small_config(dir.path().string());

  // train before extract: the message names the missing stage.
  CHECK_THROWS_WITH(run_stage("train", config),
                    Catch::Matchers::ContainsSubstring("'extract'"));
  CHECK_THROWS_WITH(run_stage("report", config),
                    Catch::Matchers::ContainsSubstring("'evaluate'"));
  CHECK_THROWS_WITH(run_stage("nonsense", config),
                    Catch::Matchers::ContainsSubstring("unknown stage"));

  RunConfig no_outdir;
  CHECK_THROWS_WITH(run_stage("synth", no_outdir),
                    Catch::Matchers::ContainsSubstring("outdir"));

  // ingest without raw inputs reports both missing files in one error.
  RunConfig missing = config;
  missing.posts = dir.file("nope.jsonl").string();
  missing.comments.clear();
  try {
    run_stage("ingest", missing);
    FAIL("expected ingest to throw");
  } catch (const ValidationError& e) {
    std::string msg = e.what();
    CHECK(msg.find("posts") != std::string::npos);
    CHECK(msg.find("comments") != std::string::npos);
  }
}

TEST_CASE("the full pipeline runs end to end on a small benchmark") {
  TempDir dir;
  RunConfig config = small_config(dir.path().string());
  run_all_stages(config);

  const std::string out = config.outdir;
  for (const char* rel :
       {"synth/posts.jsonl", "synth/comments.jsonl", "synth/truth.tsv",
        "ingest/split.tsv", "ingest/summary.tsv", "extract/features.tsv",
        "extract/targets.tsv", "evaluate/metrics.tsv", "evaluate/metrics.txt",
        "posthoc/effects.tsv", "posthoc/heatmap.tsv",
        "posthoc/top_features.txt", "users/user_impact.tsv",
        "report/report.txt", "report/evaluation_table.tsv",
        "report/heatmap_data.tsv", "manifest/synth.txt", "manifest/ingest.txt",
        "manifest/extract.txt", "manifest/train.txt", "manifest/evaluate.txt",
        "manifest/posthoc.txt", "manifest/users.txt", "manifest/report.txt"}) {
    INFO(rel);
    CHECK(std::filesystem::exists(out + "/" + rel));
  }

  // One model per family for the single synthetic community.
  for (const char* family : {"Time", "Time+Sentiment", "Time+Relevance",
                             "Time+Content", "All"}) {
    CHECK(std::filesystem::exists(out + "/train/synthetic." +
                                  std::string(family) + ".model"));
  }

  // Extract rows cover every comment: 14 threads x 6 comments + header.
  auto features_text = testutil::read_file(out + "/extract/features.tsv");
  auto targets_text = testutil::read_file(out + "/extract/targets.tsv");
  CHECK(count_lines(features_text) == 85);
  CHECK(count_lines(targets_text) == 85);

  auto rows = detail::read_features(out + "/extract/features.tsv");
  auto targets = detail::read_targets(out + "/extract/targets.tsv");
  REQUIRE(rows.size() == 84);
  REQUIRE(targets.size() == 84);
  CHECK(rows[0].comment_id == targets[0].comment_id);
  std::size_t train_rows = 0;
  for (const auto& t : targets) train_rows += t.train ? 1 : 0;
  CHECK(train_rows == 66);  // 11 of 14 posts

  // Metrics table: one row per family, subreddit column first.
  auto metrics = testutil::read_file(out + "/evaluate/metrics.tsv");
  CHECK(metrics.rfind("subreddit\tfamily\tP@1", 0) == 0);
  CHECK(count_lines(metrics) == 6);
  CHECK(metrics.find("synthetic\tAll\t") != std::string::npos);

  // Heatmap: every registry feature against every community.
  auto heatmap = testutil::read_file(out + "/posthoc/heatmap.tsv");
  CHECK(count_lines(heatmap) == 1 + features::kFeatureCount);
  CHECK(heatmap.rfind("feature\tsynthetic", 0) == 0);

  // The assembled report embeds all three sections.
  auto report = testutil::read_file(out + "/report/report.txt");
  CHECK(report.find("ranking metrics by feature family") != std::string::npos);
  CHECK(report.find("top score-separating features") != std::string::npos);
  CHECK(report.find("share of threads whose top comment") != std::string::npos);
  CHECK(report.find("subreddit: synthetic") != std::string::npos);
}

TEST_CASE("identical configs reproduce identical artifacts elsewhere") {
  TempDir d1, d2;
  RunConfig c1 = small_config(d1.path().string());
  RunConfig c2 = small_config(d2.path().string());
  run_all_stages(c1);
  run_all_stages(c2);
  for (const char* rel :
       {"synth/comments.jsonl", "ingest/split.tsv", "extract/features.tsv",
        "extract/targets.tsv", "train/synthetic.All.model",
        "evaluate/metrics.tsv", "posthoc/heatmap.tsv", "users/user_impact.tsv",
        "report/report.txt"}) {
    INFO(rel);
    CHECK(fnv1a64_file(c1.outdir + "/" + rel) ==
          fnv1a64_file(c2.outdir + "/" + rel));
  }
}
