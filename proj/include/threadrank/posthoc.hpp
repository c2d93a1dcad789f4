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
 * Post-hoc effect analysis: split comments into low scorers (< 50th
 * percentile) and high scorers (> 90th percentile), measure per-feature
 * distribution shift with the two-sample Kolmogorov-Smirnov statistic, rank
 * significant features, and check which kinds of users land top comments.
 */

#ifndef THREADRANK_POSTHOC_HPP_
#define THREADRANK_POSTHOC_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "threadrank/corpus.hpp"
#include "threadrank/features.hpp"
#include "threadrank/util.hpp"

namespace threadrank::posthoc {

// ---------------------------------------------------------------------------
// Percentiles and the low/high class split

/// Nearest-rank percentile: the ceil(p/100 * n)-th smallest value (1-based).
inline double nearest_rank_percentile(std::vector<double> values, double pct) {
  if (values.empty()) throw ValidationError("percentile of empty sample");
  if (pct <= 0.0 || pct > 100.0) {
    throw ValidationError("percentile must be in (0, 100]");
  }
  std::sort(values.begin(), values.end());
  auto rank = static_cast<std::size_t>(
      std::ceil(pct / 100.0 * static_cast<double>(values.size())));
  if (rank < 1) rank = 1;
  return values[rank - 1];
}

struct ClassSplit {
  std::vector<std::size_t> low;   // indices with score < low percentile value
  std::vector<std::size_t> high;  // indices with score > high percentile value
  double low_cutoff = 0.0;
  double high_cutoff = 0.0;
  bool degenerate = false;  // all scores equal: both classes empty
};

inline ClassSplit class_split(const std::vector<double>& scores,
                              double low_pct = 50.0, double high_pct = 90.0) {
  if (scores.size() < 10) {
    throw ValidationError("class split needs >= 10 comments, got " +
                          std::to_string(scores.size()));
  }
  if (low_pct >= high_pct) {
    throw ValidationError("low percentile must be below high percentile");
  }
  ClassSplit split;
  split.low_cutoff = nearest_rank_percentile(scores, low_pct);
  split.high_cutoff = nearest_rank_percentile(scores, high_pct);
  auto [mn, mx] = std::minmax_element(scores.begin(), scores.end());
  if (*mn == *mx) {
    split.degenerate = true;
    return split;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] < split.low_cutoff) split.low.push_back(i);
    if (scores[i] > split.high_cutoff) split.high.push_back(i);
  }
  return split;
}

// ---------------------------------------------------------------------------
// Two-sample Kolmogorov-Smirnov

/// D = max |ECDF_a - ECDF_b| over the pooled sample points.
inline double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw ValidationError("KS statistic needs two non-empty samples");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size());
  double nb = static_cast<double>(b.size());
  std::size_t ia = 0, ib = 0;
  double d = 0.0;
  while (ia < a.size() && ib < b.size()) {
    double x = std::min(a[ia], b[ib]);
    while (ia < a.size() && a[ia] <= x) ++ia;
    while (ib < b.size() && b[ib] <= x) ++ib;
    d = std::max(d, std::abs(static_cast<double>(ia) / na -
                             static_cast<double>(ib) / nb));
  }
  return d;
}

/// Asymptotic two-sample p-value via the Kolmogorov series
/// 2 * sum_{j>=1} (-1)^{j-1} exp(-2 j^2 lambda^2), truncated at `terms`,
/// with the small-sample correction lambda = (sqrt(ne)+0.12+0.11/sqrt(ne))*D.
inline double ks_pvalue(double d, std::size_t n_a, std::size_t n_b,
                        int terms = 100) {
  if (d < 0.0 || d > 1.0) throw ValidationError("KS D outside [0, 1]");
  if (n_a < 1 || n_b < 1) throw ValidationError("KS p-value needs n >= 1");
  if (d == 0.0) return 1.0;
  double ne = static_cast<double>(n_a) * static_cast<double>(n_b) /
              static_cast<double>(n_a + n_b);
  double sqrt_ne = std::sqrt(ne);
  double lambda = (sqrt_ne + 0.12 + 0.11 / sqrt_ne) * d;
  double sum = 0.0;
  for (int j = 1; j <= terms; ++j) {
    double term = std::exp(-2.0 * static_cast<double>(j) * j * lambda * lambda);
    sum += (j % 2 == 1) ? term : -term;
  }
  double p = 2.0 * sum;
  return std::min(1.0, std::max(0.0, p));
}

/// Permutation-test p-value for small-sample validation: the fraction of
/// label shuffles whose KS statistic is >= the observed one.
inline double ks_pvalue_permutation(const std::vector<double>& a,
                                    const std::vector<double>& b,
                                    std::size_t permutations,
                                    std::uint64_t seed) {
  double observed = ks_statistic(a, b);
  std::vector<double> pooled = a;
  pooled.insert(pooled.end(), b.begin(), b.end());
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t it = 0; it < permutations; ++it) {
    fisher_yates_shuffle(pooled, rng);
    std::vector<double> pa(pooled.begin(),
                           pooled.begin() + static_cast<long>(a.size()));
    std::vector<double> pb(pooled.begin() + static_cast<long>(a.size()),
                           pooled.end());
    if (ks_statistic(pa, pb) >= observed - 1e-15) ++hits;
  }
  return static_cast<double>(hits + 1) /
         static_cast<double>(permutations + 1);
}

// ---------------------------------------------------------------------------
// Per-feature effect report

struct KSResult {
  std::string feature;
  double d = 0.0;
  double p_value = 1.0;
  double mean_diff = 0.0;  // mean(high) - mean(low)
  std::size_t n_low = 0;
  std::size_t n_high = 0;
};

struct PosthocReport {
  std::vector<KSResult> per_feature;   // registry order
  std::vector<KSResult> top_features;  // p < alpha, D desc, <= top_n
  std::vector<double> intensity;       // per registry feature, 0 if not significant
  bool degenerate = false;
};

inline PosthocReport posthoc_report(
    const std::vector<features::FeatureVector>& rows,
    const std::vector<double>& scores, double low_pct = 50.0,
    double high_pct = 90.0, double alpha = 0.05, std::size_t top_n = 15) {
  if (rows.size() != scores.size()) {
    throw ValidationError("feature rows and scores must align");
  }
  PosthocReport report;
  ClassSplit split = class_split(scores, low_pct, high_pct);
  report.intensity.assign(features::kFeatureCount, 0.0);
  if (split.degenerate || split.low.empty() || split.high.empty()) {
    report.degenerate = true;
    return report;
  }
  for (std::size_t f = 0; f < features::kFeatureCount; ++f) {
    std::vector<double> low, high;
    low.reserve(split.low.size());
    high.reserve(split.high.size());
    for (std::size_t i : split.low) low.push_back(rows[i].values[f]);
    for (std::size_t i : split.high) high.push_back(rows[i].values[f]);
    KSResult r;
    r.feature = std::string(features::feature_registry()[f]);
    r.n_low = low.size();
    r.n_high = high.size();
    r.d = ks_statistic(low, high);
    r.p_value = ks_pvalue(r.d, low.size(), high.size());
    double mean_low = 0.0, mean_high = 0.0;
    for (double v : low) mean_low += v;
    for (double v : high) mean_high += v;
    r.mean_diff = mean_high / static_cast<double>(high.size()) -
                  mean_low / static_cast<double>(low.size());
    report.per_feature.push_back(std::move(r));
  }
  std::vector<KSResult> significant;
  for (const auto& r : report.per_feature) {
    if (r.p_value < alpha) significant.push_back(r);
  }
  std::sort(significant.begin(), significant.end(),
            [](const KSResult& a, const KSResult& b) {
              if (a.d != b.d) return a.d > b.d;
              return a.feature < b.feature;
            });
  double max_d = significant.empty() ? 0.0 : significant.front().d;
  for (const auto& r : significant) {
    report.intensity[features::feature_index(r.feature)] =
        max_d > 0.0 ? r.d / max_d : 0.0;
  }
  if (significant.size() > top_n) significant.resize(top_n);
  report.top_features = std::move(significant);
  return report;
}

// ---------------------------------------------------------------------------
// User-impact analysis

struct UserImpactReport {
  double by_max_h_index = 0.0;
  double by_max_activity = 0.0;
  double by_flaired_user = 0.0;
  std::size_t n_threads = 0;
};

/// For each thread: the top comment is the one with the highest true score
/// (id tiebreak). Counts the fraction of threads where that comment's author
/// attains the thread's max h-index / max activity among commenting
/// participants, and where the top comment itself carries a flair.
inline UserImpactReport user_impact(const std::vector<corpus::Thread>& threads,
                                    const features::UserStatsTable& users) {
  UserImpactReport report;
  std::size_t hits_h = 0, hits_act = 0, hits_flair = 0;
  for (const auto& thread : threads) {
    if (thread.comments.empty()) continue;
    const corpus::Comment* top = &thread.comments.front();
    for (const auto& c : thread.comments) {
      if (c.score > top->score ||
          (c.score == top->score && c.id < top->id)) {
        top = &c;
      }
    }
    double max_h = 0.0, max_act = 0.0;
    for (const auto& c : thread.comments) {
      auto [h, act] = users.lookup(c.author);
      max_h = std::max(max_h, h);
      max_act = std::max(max_act, act);
    }
    auto [top_h, top_act] = users.lookup(top->author);
    if (top_h >= max_h) ++hits_h;
    if (top_act >= max_act) ++hits_act;
    if (top->flair && !top->flair->empty()) ++hits_flair;
    ++report.n_threads;
  }
  if (report.n_threads > 0) {
    double n = static_cast<double>(report.n_threads);
    report.by_max_h_index = hits_h / n;
    report.by_max_activity = hits_act / n;
    report.by_flaired_user = hits_flair / n;
  }
  return report;
}

}  // namespace threadrank::posthoc

#endif  // THREADRANK_POSTHOC_HPP_
