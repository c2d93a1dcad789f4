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
//
// Acceptance gate: one self-contained check per release criterion, each
// printed as a single PASS/FAIL line. Exits non-zero if any criterion fails.

#include <sys/resource.h>
#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "test_helpers.hpp"
#include "threadrank/features.hpp"
#include "threadrank/model.hpp"
#include "threadrank/pipeline.hpp"
#include "threadrank/posthoc.hpp"
#include "threadrank/ranking.hpp"
#include "threadrank/subjectivity.hpp"
#include "threadrank/util.hpp"

namespace {

using threadrank::Rng;
using threadrank::split;
using threadrank::trim;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw std::runtime_error(message);
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Ranking metrics against exhaustive reference implementations.

std::vector<std::string> top_k_ids(const std::vector<threadrank::ranking::Entry>& entries,
                                   std::size_t k, bool by_true) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double sa = by_true ? entries[a].true_score : entries[a].pred_score;
    double sb = by_true ? entries[b].true_score : entries[b].pred_score;
    if (sa != sb) return sa > sb;
    return entries[a].id < entries[b].id;
  });
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < k && i < order.size(); ++i) {
    ids.push_back(entries[order[i]].id);
  }
  return ids;
}

std::optional<double> reference_precision(
    const std::vector<threadrank::ranking::Entry>& entries, std::size_t k) {
  if (k == 0 || entries.size() < k) return std::nullopt;
  auto a = top_k_ids(entries, k, true);
  auto b = top_k_ids(entries, k, false);
  std::size_t hits = 0;
  for (const auto& id : a) {
    hits += std::count(b.begin(), b.end(), id) > 0 ? 1 : 0;
  }
  return static_cast<double>(hits) / static_cast<double>(k);
}

std::optional<double> reference_kt(
    const std::vector<threadrank::ranking::Entry>& entries, std::size_t k) {
  if (k == 0 || entries.size() < k) return std::nullopt;
  auto ids = top_k_ids(entries, k, true);
  std::vector<threadrank::ranking::Entry> picked;
  for (const auto& id : ids) {
    for (const auto& e : entries) {
      if (e.id == id) picked.push_back(e);
    }
  }
  double distance = 0.0;
  for (std::size_t i = 0; i < picked.size(); ++i) {
    for (std::size_t j = i + 1; j < picked.size(); ++j) {
      const auto& hi = picked[i].true_score >= picked[j].true_score ? picked[i]
                                                                    : picked[j];
      const auto& lo = &hi == &picked[i] ? picked[j] : picked[i];
      if (hi.true_score == lo.true_score) continue;  // true ties cost nothing
      if (hi.pred_score == lo.pred_score) distance += 0.5;
      else if (hi.pred_score < lo.pred_score) distance += 1.0;
    }
  }
  return distance;
}

std::string check_ranking_oracle() {
  auto start = Clock::now();
  for (int t = 0; t < 1000; ++t) {
    Rng rng(9000 + static_cast<std::uint64_t>(t));
    std::size_t n = 1 + rng.next_below(12);
    std::vector<threadrank::ranking::Entry> entries;
    for (std::size_t i = 0; i < n; ++i) {
      entries.push_back({"c" + std::to_string(i),
                         static_cast<double>(rng.next_below(6)),
                         static_cast<double>(rng.next_below(6))});
    }
    for (std::size_t k = 1; k <= 6; ++k) {
      auto p = threadrank::ranking::precision_at_k(entries, k);
      auto pref = reference_precision(entries, k);
      require(p.has_value() == pref.has_value() &&
                  (!p.has_value() || *p == *pref),
              "precision@" + std::to_string(k) + " mismatch on trial " +
                  std::to_string(t));
      auto d = threadrank::ranking::kt_distance_at_k(entries, k);
      auto dref = reference_kt(entries, k);
      require(d.has_value() == dref.has_value() &&
                  (!d.has_value() || *d == *dref),
              "kt@" + std::to_string(k) + " mismatch on trial " +
                  std::to_string(t));
    }
  }
  double elapsed = seconds_since(start);
  require(elapsed < 5.0, "ranking oracle sweep took " + fmt(elapsed) + " s");
  return "1000 random threads, exact match (" + fmt(elapsed) + " s)";
}

// ---------------------------------------------------------------------------
// 2. Kolmogorov-Smirnov statistic and p-value against references.

double reference_ks(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  double best = 0.0;
  for (double x : pooled) {
    double fa = 0.0, fb = 0.0;
    for (double v : a) fa += v <= x ? 1.0 : 0.0;
    for (double v : b) fb += v <= x ? 1.0 : 0.0;
    best = std::max(best, std::abs(fa / static_cast<double>(a.size()) -
                                   fb / static_cast<double>(b.size())));
  }
  return best;
}

double reference_ks_pvalue(double d, std::size_t n_a, std::size_t n_b) {
  double ne = static_cast<double>(n_a) * static_cast<double>(n_b) /
              static_cast<double>(n_a + n_b);
  double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double sum = 0.0;
  for (int j = 1; j <= 10000; ++j) {
    double term = std::exp(-2.0 * static_cast<double>(j) * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
  }
  return std::min(1.0, std::max(0.0, 2.0 * sum));
}

std::string check_ks_oracle() {
  for (int t = 0; t < 1000; ++t) {
    Rng rng(17000 + static_cast<std::uint64_t>(t));
    std::size_t na = 1 + rng.next_below(50);
    std::size_t nb = 1 + rng.next_below(50);
    std::vector<double> a(na), b(nb);
    bool coarse = t % 2 == 0;  // coarse grids force tied pooled points
    for (auto& v : a) {
      v = coarse ? static_cast<double>(rng.next_below(12)) : rng.next_unit();
    }
    for (auto& v : b) {
      v = coarse ? static_cast<double>(rng.next_below(12)) : rng.next_unit();
    }
    double got = threadrank::posthoc::ks_statistic(a, b);
    double want = reference_ks(a, b);
    require(std::abs(got - want) <= 1e-12,
            "KS D mismatch on trial " + std::to_string(t) + ": got " +
                fmt(got) + ", reference " + fmt(want));
  }
  for (double d : {0.05, 0.1, 0.2, 0.5, 0.8}) {
    for (std::size_t n : {std::size_t{10}, std::size_t{50}, std::size_t{200}}) {
      double got = threadrank::posthoc::ks_pvalue(d, n, n);
      double want = reference_ks_pvalue(d, n, n);
      require(std::abs(got - want) <= 1e-10,
              "KS p-value mismatch at D=" + fmt(d) + ", n=" + std::to_string(n));
    }
  }
  double prev = 1.0;
  for (int i = 1; i <= 100; ++i) {
    double d = static_cast<double>(i) / 100.0;
    double p = threadrank::posthoc::ks_pvalue(d, 40, 40);
    require(p >= 0.0 && p <= 1.0, "KS p-value outside [0, 1] at D=" + fmt(d));
    require(p <= prev + 1e-15, "KS p-value not monotone at D=" + fmt(d));
    prev = p;
  }
  return "1000 statistic pairs within 1e-12; series within 1e-10; monotone";
}

// ---------------------------------------------------------------------------
// 3. Ridge solutions against an independent normal-equation solver.

std::vector<double> gauss_jordan_ridge(const threadrank::model::Matrix& x,
                                       const std::vector<double>& y,
                                       double lambda, double* intercept) {
  std::size_t n = x.size(), d = x[0].size();
  std::vector<double> mean(d, 0.0);
  double y_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += x[i][j];
    y_mean += y[i];
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  y_mean /= static_cast<double>(n);

  std::vector<std::vector<double>> aug(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      double cj = x[i][j] - mean[j];
      aug[j][d] += cj * (y[i] - y_mean);
      for (std::size_t k = 0; k < d; ++k) aug[j][k] += cj * (x[i][k] - mean[k]);
    }
  }
  for (std::size_t j = 0; j < d; ++j) aug[j][j] += lambda;

  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[pivot][col])) pivot = r;
    }
    std::swap(aug[col], aug[pivot]);
    double p = aug[col][col];
    for (std::size_t k = col; k <= d; ++k) aug[col][k] /= p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      double factor = aug[r][col];
      for (std::size_t k = col; k <= d; ++k) aug[r][k] -= factor * aug[col][k];
    }
  }
  std::vector<double> w(d);
  for (std::size_t j = 0; j < d; ++j) w[j] = aug[j][d];
  if (intercept) {
    *intercept = y_mean;
    for (std::size_t j = 0; j < d; ++j) *intercept -= w[j] * mean[j];
  }
  return w;
}

std::string check_ridge_oracle() {
  const auto& grid = threadrank::model::default_lambda_grid();
  for (int t = 0; t < 500; ++t) {
    Rng rng(31000 + static_cast<std::uint64_t>(t));
    std::size_t d = 1 + rng.next_below(10);
    std::size_t n = d + 2 + rng.next_below(50 - d - 1);
    threadrank::model::Matrix x(n, std::vector<double>(d));
    std::vector<double> truth(d), y(n);
    for (auto& w : truth) w = 4.0 * rng.next_unit() - 2.0;
    for (std::size_t i = 0; i < n; ++i) {
      double signal = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        x[i][j] = rng.next_gauss();
        signal += truth[j] * x[i][j];
      }
      y[i] = signal + 0.3 * rng.next_gauss();
    }
    double lambda = grid[rng.next_below(grid.size())];
    auto fit = threadrank::model::ridge_fit(x, y, lambda);
    double ref_intercept = 0.0;
    auto ref = gauss_jordan_ridge(x, y, lambda, &ref_intercept);
    double scale = 1.0;
    for (double w : ref) scale = std::max(scale, std::abs(w));
    for (std::size_t j = 0; j < d; ++j) {
      require(std::abs(fit.weights[j] - ref[j]) <= 1e-8 * scale,
              "ridge weight mismatch on trial " + std::to_string(t));
    }
    require(std::abs(fit.intercept - ref_intercept) <=
                1e-8 * std::max(1.0, std::abs(ref_intercept)),
            "ridge intercept mismatch on trial " + std::to_string(t));
  }

  // Invariants along the ascending default grid on one fixed problem.
  Rng rng(777);
  std::size_t n = 40, d = 8;
  threadrank::model::Matrix x(n, std::vector<double>(d));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& v : x[i]) v = rng.next_gauss();
    y[i] = 3.0 * x[i][0] - 2.0 * x[i][1] + 0.5 * rng.next_gauss();
  }
  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());
  double prev_norm = std::numeric_limits<double>::infinity();
  double prev_mse = 0.0;
  for (double lambda : sorted_grid) {
    auto fit = threadrank::model::ridge_fit(x, y, lambda);
    double norm = 0.0;
    for (double w : fit.weights) norm += w * w;
    double mse = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - threadrank::model::predict_row(fit, x[i]);
      mse += r * r;
    }
    mse /= static_cast<double>(n);
    require(norm <= prev_norm + 1e-9, "weight norm grew with lambda");
    require(mse + 1e-9 >= prev_mse, "training error shrank with lambda");
    prev_norm = norm;
    prev_mse = mse;
  }
  return "500 instances within 1e-8; shrinkage and residual invariants hold";
}

// ---------------------------------------------------------------------------
// 4. h-index, exhaustive over short score lists.

int reference_h_index(const std::vector<int>& scores) {
  int best = 0;
  for (int h = 0; h <= static_cast<int>(scores.size()); ++h) {
    int at_least = 0;
    for (int s : scores) at_least += s >= h ? 1 : 0;
    if (at_least >= h) best = h;
  }
  return best;
}

std::string check_h_index_exhaustive() {
  std::uint64_t visited = 0;
  std::vector<int> scores;
  Rng rng(4242);
  auto visit = [&]() {
    int want = reference_h_index(scores);
    require(threadrank::features::h_index(scores) == want,
            "h-index mismatch on a list of length " +
                std::to_string(scores.size()));
    if (visited % 97 == 0 && scores.size() > 1) {
      std::vector<int> shuffled = scores;
      threadrank::fisher_yates_shuffle(shuffled, rng);
      require(threadrank::features::h_index(shuffled) == want,
              "h-index is order sensitive");
    }
    ++visited;
  };
  // Depth-first over non-decreasing lists: every permutation of a list has
  // the same h-index (checked above), so multisets cover all lists.
  auto rec = [&](auto&& self, int min_value) -> void {
    visit();
    if (scores.size() == 12) return;
    for (int v = min_value; v <= 12; ++v) {
      scores.push_back(v);
      self(self, v);
      scores.pop_back();
    }
  };
  rec(rec, 0);
  require(visited == 5200300, "expected C(25,12) lists, saw " +
                                  std::to_string(visited));
  return "all 5,200,300 score multisets of length <= 12 match";
}

// ---------------------------------------------------------------------------
// 5. End-to-end synthetic benchmark through the installed CLI.

std::string cli_path() {
#ifdef THREADRANK_CLI_PATH
  return THREADRANK_CLI_PATH;
#else
  throw std::runtime_error("THREADRANK_CLI_PATH not defined");
#endif
}

void run_cli(const std::string& args, const std::string& log_path) {
  std::string cmd = cli_path() + " " + args + " >> " + log_path + " 2>&1";
  int status = std::system(cmd.c_str());
  if (status == -1 || !WIFEXITED(status) || WEXITSTATUS(status) != 0) {
    std::string tail;
    std::ifstream log(log_path);
    std::string line;
    while (std::getline(log, line)) {
      tail += line + " | ";
      if (tail.size() > 400) tail = tail.substr(tail.size() - 400);
    }
    throw std::runtime_error("CLI failed: " + args + " — log: " + tail);
  }
}

std::string base_config_text(const std::string& outdir) {
  std::string data = THREADRANK_DATA_DIR;
  return "outdir = " + outdir + "\n" +
         "posts = " + outdir + "/synth/posts.jsonl\n" +
         "comments = " + outdir + "/synth/comments.jsonl\n" +
         "lexicon = " + data + "/starter_lexicon.tsv\n" +
         "embeddings = " + data + "/embeddings_small.txt\n" +
         "reference_freqs = " + data + "/reference_freqs.tsv\n" +
         "subjectivity_data = " + data + "/subjectivity_train.tsv\n";
}

struct FamilyMetrics {
  double p1 = -1.0;
  double kt5 = -1.0;
};

FamilyMetrics read_family_metrics(const std::string& metrics_path,
                                  const std::string& family) {
  std::ifstream in(metrics_path);
  require(static_cast<bool>(in), "cannot open " + metrics_path);
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), "empty metrics file");
  auto header = split(trim(line), '\t');
  std::size_t p1_col = 0, kt5_col = 0;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "P@1") p1_col = i;
    if (header[i] == "KT@5") kt5_col = i;
  }
  require(p1_col > 0 && kt5_col > 0, "metrics header lacks P@1 or KT@5");
  while (std::getline(in, line)) {
    auto fields = split(trim(line), '\t');
    if (fields.size() > std::max(p1_col, kt5_col) && fields[1] == family) {
      return {std::stod(fields[p1_col]), std::stod(fields[kt5_col])};
    }
  }
  throw std::runtime_error("no '" + family + "' row in " + metrics_path);
}

std::string check_synthetic_benchmark() {
  testutil::TempDir dir;
  std::string out = dir.path().string() + "/bench";
  std::string conf = testutil::write_file(
      dir.file("bench.conf"), base_config_text(out) +
                                  "synth_threads = 200\n"
                                  "synth_comments = 20\n"
                                  "synth_noise = 0.1\n"
                                  "synth_seed = 42\n");
  std::string log = dir.file("bench.log").string();

  auto start = Clock::now();
  for (const char* stage : {"synth", "ingest", "extract", "train", "evaluate",
                            "posthoc", "users", "report"}) {
    run_cli(std::string(stage) + " -c " + conf, log);
  }
  double elapsed = seconds_since(start);
  require(elapsed < 60.0, "benchmark pipeline took " + fmt(elapsed) + " s");

  FamilyMetrics noisy = read_family_metrics(out + "/evaluate/metrics.tsv", "All");
  require(noisy.p1 >= 0.8, "noisy P@1 = " + fmt(noisy.p1) + " < 0.8");
  require(noisy.kt5 <= 2.0, "noisy KT@5 = " + fmt(noisy.kt5) + " > 2.0");

  std::string out0 = dir.path().string() + "/clean";
  std::string conf0 = testutil::write_file(
      dir.file("clean.conf"), base_config_text(out0) +
                                  "synth_threads = 200\n"
                                  "synth_comments = 20\n"
                                  "synth_noise = 0\n"
                                  "synth_seed = 42\n");
  for (const char* stage : {"synth", "ingest", "extract", "train", "evaluate"}) {
    run_cli(std::string(stage) + " -c " + conf0, log);
  }
  FamilyMetrics clean = read_family_metrics(out0 + "/evaluate/metrics.tsv", "All");
  require(clean.p1 == 1.0, "noise-free P@1 = " + fmt(clean.p1) + " != 1.0");

  return "P@1 = " + fmt(noisy.p1) + ", KT@5 = " + fmt(noisy.kt5) +
         " with noise; P@1 = 1 without (" + fmt(elapsed) + " s)";
}

// ---------------------------------------------------------------------------
// 6. Subjectivity classifier accuracy.

std::string check_subjectivity_accuracy() {
  std::vector<threadrank::features::LabeledSentence> data;
  Rng rng(606);
  for (int i = 0; i < 1000; ++i) {
    bool subjective = i % 2 == 0;
    std::string text;
    for (int w = 0; w < 8; ++w) {
      if (w) text += ' ';
      text += (subjective ? "feel" : "fact") +
              std::to_string(rng.next_below(60));
    }
    data.push_back({text, subjective});
  }
  double synthetic_acc =
      threadrank::features::cross_validated_accuracy(data, 5, 7);
  require(synthetic_acc >= 0.99, "synthetic separable accuracy = " +
                                     fmt(synthetic_acc) + " < 0.99");

  if (const char* real = std::getenv("THREADRANK_SUBJECTIVITY_DATA")) {
    auto labeled = threadrank::features::load_labeled_sentences(real);
    double acc = threadrank::features::cross_validated_accuracy(labeled, 5, 7);
    require(acc >= 0.88,
            "real-data 5-fold accuracy = " + fmt(acc) + " < 0.88");
    return "synthetic " + fmt(synthetic_acc) + "; real data " + fmt(acc);
  }
  return "synthetic separable corpus 5-fold accuracy = " + fmt(synthetic_acc);
}

// ---------------------------------------------------------------------------
// 7. Determinism: identical config and seeds, byte-identical artifacts.

threadrank::pipeline::RunConfig small_pipeline_config(const std::string& out) {
  std::vector<std::string> errors;
  threadrank::pipeline::RunConfig config;
  std::istringstream text(base_config_text(out));
  std::string line;
  while (std::getline(text, line)) {
    auto eq = line.find('=');
    config.apply(std::string(trim(line.substr(0, eq))),
                 std::string(trim(line.substr(eq + 1))), errors);
  }
  require(errors.empty(), "bad embedded config");
  config.synth_threads = 30;
  config.synth_comments = 8;
  config.synth_seed = 11;
  return config;
}

std::map<std::string, std::string> manifest_digests(const std::string& out) {
  std::map<std::string, std::string> digests;
  for (const auto& entry :
       std::filesystem::directory_iterator(out + "/manifest")) {
    std::ifstream in(entry.path());
    std::string line;
    while (std::getline(in, line)) {
      auto fields = split(line, '\t');
      if (fields.size() == 3 && fields[0] == "output") {
        digests[fields[1]] = fields[2];
      }
    }
  }
  return digests;
}

std::string check_determinism() {
  testutil::TempDir dir;
  std::string out = dir.path().string() + "/run";
  auto config = small_pipeline_config(out);
  auto run_all = [&] {
    for (const char* stage : {"synth", "ingest", "extract", "train",
                              "evaluate", "posthoc", "users", "report"}) {
      threadrank::pipeline::run_stage(stage, config);
    }
  };
  run_all();
  auto first = manifest_digests(out);
  require(first.size() >= 15, "expected at least 15 manifest outputs");
  std::filesystem::remove_all(out);
  run_all();
  auto second = manifest_digests(out);
  require(first == second, "artifact digests changed between identical runs");
  return std::to_string(first.size()) + " artifact digests identical across reruns";
}

// ---------------------------------------------------------------------------
// 8. Feature extraction throughput and memory on 50,000 comments.

std::string check_extraction_scale() {
  testutil::TempDir dir;
  std::string out = dir.path().string() + "/scale";
  auto config = small_pipeline_config(out);
  config.synth_threads = 2500;
  config.synth_comments = 20;
  config.synth_seed = 3;
  threadrank::pipeline::run_stage("synth", config);
  threadrank::pipeline::run_stage("ingest", config);

  auto start = Clock::now();
  threadrank::pipeline::run_stage("extract", config);
  double elapsed = seconds_since(start);
  require(elapsed < 60.0, "extraction took " + fmt(elapsed) + " s");

  struct rusage usage {};
  getrusage(RUSAGE_SELF, &usage);
  double peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;
  require(peak_mb < 2048.0, "peak RSS " + fmt(peak_mb) + " MB >= 2 GB");

  auto rows = threadrank::pipeline::detail::read_targets(out +
                                                         "/extract/targets.tsv");
  require(rows.size() == 50000, "expected 50000 rows, got " +
                                    std::to_string(rows.size()));
  return "50,000 comments in " + fmt(elapsed) + " s, peak RSS " +
         fmt(peak_mb) + " MB";
}

// ---------------------------------------------------------------------------
// 9. Report layout: families x metrics table plus full heatmap.

std::string check_report_structure() {
  testutil::TempDir dir;
  std::string out = dir.path().string() + "/report";
  auto config = small_pipeline_config(out);
  for (const char* stage : {"synth", "ingest", "extract", "train", "evaluate",
                            "posthoc", "users", "report"}) {
    threadrank::pipeline::run_stage(stage, config);
  }

  std::ifstream table(out + "/report/evaluation_table.tsv");
  require(static_cast<bool>(table), "missing evaluation_table.tsv");
  std::string line;
  require(static_cast<bool>(std::getline(table, line)), "empty table");
  auto header = split(trim(line), '\t');
  for (const char* column : {"P@1", "P@3", "P@5", "P@10", "KT@5", "KT@10",
                             "KT@20", "P@1_eligible", "KT@20_eligible"}) {
    require(std::count(header.begin(), header.end(), std::string(column)) == 1,
            std::string("missing table column ") + column);
  }
  std::map<std::string, int> family_rows;
  while (std::getline(table, line)) {
    auto fields = split(trim(line), '\t');
    if (fields.size() == header.size()) ++family_rows[fields[1]];
  }
  for (const char* family : {"Time", "Time+Sentiment", "Time+Relevance",
                             "Time+Content", "All"}) {
    require(family_rows[family] == 1,
            std::string("expected one table row for family ") + family);
  }

  std::ifstream heatmap(out + "/report/heatmap_data.tsv");
  require(static_cast<bool>(heatmap), "missing heatmap_data.tsv");
  require(static_cast<bool>(std::getline(heatmap, line)), "empty heatmap");
  require(split(trim(line), '\t')[0] == "feature", "bad heatmap header");
  std::size_t row_count = 0;
  while (std::getline(heatmap, line)) {
    if (trim(line).empty()) continue;
    auto fields = split(trim(line), '\t');
    require(fields[0] ==
                threadrank::features::feature_registry()[row_count],
            "heatmap row order departs from the feature registry");
    ++row_count;
  }
  require(row_count == threadrank::features::kFeatureCount,
          "heatmap has " + std::to_string(row_count) + " feature rows");
  return "5 families x 7 metrics; " + std::to_string(row_count) +
         " heatmap feature rows";
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::string (*run)();
  };
  const Criterion criteria[] = {
      {"ranking metrics match exhaustive references", check_ranking_oracle},
      {"KS statistic and p-value match references", check_ks_oracle},
      {"ridge solutions match an independent solver", check_ridge_oracle},
      {"h-index matches brute force exhaustively", check_h_index_exhaustive},
      {"synthetic benchmark meets ranking targets", check_synthetic_benchmark},
      {"subjectivity classifier meets accuracy floor",
       check_subjectivity_accuracy},
      {"identical runs produce identical artifacts", check_determinism},
      {"extraction meets the 50k-comment budget", check_extraction_scale},
      {"report emits the full table and heatmap layout",
       check_report_structure},
  };

  int failures = 0;
  int index = 0;
  for (const auto& criterion : criteria) {
    ++index;
    try {
      std::string detail = criterion.run();
      std::cout << "PASS " << index << ". " << criterion.name << " — "
                << detail << '\n';
    } catch (const std::exception& e) {
      ++failures;
      std::cout << "FAIL " << index << ". " << criterion.name << " — "
                << e.what() << '\n';
    }
    std::cout.flush();
  }
  if (failures > 0) {
    std::cout << failures << " acceptance criteri"
              << (failures == 1 ? "on" : "a") << " failed\n";
    return 1;
  }
  std::cout << "all 9 acceptance criteria passed\n";
  return 0;
}
