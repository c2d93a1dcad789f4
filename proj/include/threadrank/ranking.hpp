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
 * Learning-to-rank evaluation. Precision@k compares top-k sets under true
 * and predicted scores (descending, comment-id tiebreak). KT@k restricts to
 * the true top-k comments and counts predicted-order discordances against
 * the true order; a predicted tie on a strictly-ordered true pair counts as
 * half a discordance. Threads smaller than k are ineligible for that k and
 * excluded from the mean (the eligible count is reported).
 */

#ifndef THREADRANK_RANKING_HPP_
#define THREADRANK_RANKING_HPP_

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "threadrank/util.hpp"

namespace threadrank::ranking {

struct Entry {
  std::string id;
  double true_score = 0.0;
  double pred_score = 0.0;
};

namespace detail {

/// Indices of the k entries with the highest `score`, ties by id ascending.
template <typename ScoreFn>
std::vector<std::size_t> top_k_indices(const std::vector<Entry>& entries,
                                       std::size_t k, ScoreFn score) {
  std::vector<std::size_t> order(entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    double sa = score(entries[a]), sb = score(entries[b]);
    if (sa != sb) return sa > sb;
    return entries[a].id < entries[b].id;
  });
  order.resize(k);
  return order;
}

}  // namespace detail

/// |top-k by true ∩ top-k by predicted| / k, or nullopt when the thread is
/// too small for k (ineligible).
inline std::optional<double> precision_at_k(const std::vector<Entry>& entries,
                                            std::size_t k) {
  if (k < 1 || entries.size() < k) return std::nullopt;
  auto true_top = detail::top_k_indices(
      entries, k, [](const Entry& e) { return e.true_score; });
  auto pred_top = detail::top_k_indices(
      entries, k, [](const Entry& e) { return e.pred_score; });
  std::sort(true_top.begin(), true_top.end());
  std::sort(pred_top.begin(), pred_top.end());
  std::vector<std::size_t> both;
  std::set_intersection(true_top.begin(), true_top.end(), pred_top.begin(),
                        pred_top.end(), std::back_inserter(both));
  return static_cast<double>(both.size()) / static_cast<double>(k);
}

/// Discordant-pair count over the true top-k (nullopt when ineligible).
/// Pairs tied on true score contribute 0; pairs strictly ordered by true
/// score contribute 1 when the predicted order contradicts it and 0.5 when
/// the predicted scores tie.
inline std::optional<double> kt_distance_at_k(const std::vector<Entry>& entries,
                                              std::size_t k) {
  if (k < 1 || entries.size() < k) return std::nullopt;
  auto top = detail::top_k_indices(entries, k,
                                   [](const Entry& e) { return e.true_score; });
  double distance = 0.0;
  for (std::size_t a = 0; a < top.size(); ++a) {
    for (std::size_t b = a + 1; b < top.size(); ++b) {
      const Entry& ea = entries[top[a]];
      const Entry& eb = entries[top[b]];
      if (ea.true_score == eb.true_score) continue;
      // ea precedes eb in true order; is the prediction concordant?
      bool true_a_first = ea.true_score > eb.true_score;
      if (ea.pred_score == eb.pred_score) {
        distance += 0.5;
      } else {
        bool pred_a_first = ea.pred_score > eb.pred_score;
        if (pred_a_first != true_a_first) distance += 1.0;
      }
    }
  }
  return distance;
}

/// One thread ranked by predicted score (descending, id tiebreak).
inline std::vector<Entry> rank_by_prediction(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    if (a.pred_score != b.pred_score) return a.pred_score > b.pred_score;
    return a.id < b.id;
  });
  return entries;
}

struct MetricCell {
  double mean = 0.0;
  std::size_t eligible = 0;
};

struct RankingMetricsReport {
  std::string family;
  std::map<std::size_t, MetricCell> precision_at;  // k -> mean, eligible
  std::map<std::size_t, MetricCell> kt_at;
};

inline const std::vector<std::size_t>& default_precision_ks() {
  static const std::vector<std::size_t> kKs = {1, 3, 5, 10};
  return kKs;
}

inline const std::vector<std::size_t>& default_kt_ks() {
  static const std::vector<std::size_t> kKs = {5, 10, 20};
  return kKs;
}

/// Aggregates thread-level metrics into per-family means.
inline RankingMetricsReport evaluate_family(
    const std::string& family,
    const std::vector<std::vector<Entry>>& threads,
    const std::vector<std::size_t>& precision_ks = default_precision_ks(),
    const std::vector<std::size_t>& kt_ks = default_kt_ks()) {
  RankingMetricsReport report;
  report.family = family;
  for (std::size_t k : precision_ks) report.precision_at[k] = {};
  for (std::size_t k : kt_ks) report.kt_at[k] = {};
  for (const auto& thread : threads) {
    for (std::size_t k : precision_ks) {
      if (auto p = precision_at_k(thread, k)) {
        auto& cell = report.precision_at[k];
        cell.mean += *p;
        cell.eligible += 1;
      }
    }
    for (std::size_t k : kt_ks) {
      if (auto d = kt_distance_at_k(thread, k)) {
        auto& cell = report.kt_at[k];
        cell.mean += *d;
        cell.eligible += 1;
      }
    }
  }
  for (auto& [k, cell] : report.precision_at) {
    if (cell.eligible > 0) cell.mean /= static_cast<double>(cell.eligible);
  }
  for (auto& [k, cell] : report.kt_at) {
    if (cell.eligible > 0) cell.mean /= static_cast<double>(cell.eligible);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Report serialization: one TSV row per family, plus a pretty table.

inline void write_metrics_tsv(std::ostream& out,
                              const std::vector<RankingMetricsReport>& reports) {
  out << "family";
  if (!reports.empty()) {
    for (const auto& [k, _] : reports.front().precision_at) {
      out << "\tP@" << k << "\tP@" << k << "_eligible";
    }
    for (const auto& [k, _] : reports.front().kt_at) {
      out << "\tKT@" << k << "\tKT@" << k << "_eligible";
    }
  }
  out << '\n';
  for (const auto& r : reports) {
    out << r.family;
    for (const auto& [k, cell] : r.precision_at) {
      out << '\t' << format_double(cell.mean) << '\t' << cell.eligible;
    }
    for (const auto& [k, cell] : r.kt_at) {
      out << '\t' << format_double(cell.mean) << '\t' << cell.eligible;
    }
    out << '\n';
  }
}

inline void write_metrics_table(std::ostream& out,
                                const std::vector<RankingMetricsReport>& reports) {
  auto cell = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%8.4f", v);
    return std::string(buf);
  };
  out << "model           ";
  if (!reports.empty()) {
    for (const auto& [k, _] : reports.front().precision_at) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "    P@%-3zu", k);
      out << buf;
    }
    for (const auto& [k, _] : reports.front().kt_at) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "   KT@%-3zu", k);
      out << buf;
    }
  }
  out << '\n';
  for (const auto& r : reports) {
    char name[32];
    std::snprintf(name, sizeof(name), "%-16s", r.family.c_str());
    out << name;
    for (const auto& [k, c] : r.precision_at) out << ' ' << cell(c.mean);
    for (const auto& [k, c] : r.kt_at) out << ' ' << cell(c.mean);
    out << '\n';
  }
}

}  // namespace threadrank::ranking

#endif  // THREADRANK_RANKING_HPP_
