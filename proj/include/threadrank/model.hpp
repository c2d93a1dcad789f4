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
 * Ridge regression over standardized feature columns. The intercept is
 * unpenalized: columns and targets are centered, (Xc^T Xc + λI) w = Xc^T yc
 * is solved by a Cholesky factorization, and the intercept is recovered
 * from the means. λ is picked by 10-fold cross-validation over a fixed grid.
 */

#ifndef THREADRANK_MODEL_HPP_
#define THREADRANK_MODEL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include "threadrank/features.hpp"
#include "threadrank/util.hpp"

namespace threadrank::model {

using Matrix = std::vector<std::vector<double>>;

inline const std::vector<double>& default_lambda_grid() {
  static const std::vector<double> kGrid = {1e-3, 1e-2, 1e-1, 1.0,
                                            10.0, 1e2,  1e3};
  return kGrid;
}

// ---------------------------------------------------------------------------
// Feature families (ablations evaluated side by side)

struct FeatureFamily {
  std::string name;
  std::vector<std::size_t> indices;  // into the feature registry, ascending
};

inline const std::vector<FeatureFamily>& feature_families() {
  static const std::vector<FeatureFamily> kFamilies = [] {
    auto range = [](std::size_t lo, std::size_t hi) {
      std::vector<std::size_t> v(hi - lo + 1);
      std::iota(v.begin(), v.end(), lo);
      return v;
    };
    std::size_t time = features::feature_index("time_diff");
    std::vector<FeatureFamily> fams;
    fams.push_back({"Time", {time}});
    {
      std::vector<std::size_t> idx = {time};
      auto block = range(features::feature_index("vad_neg"),
                         features::feature_index("focuspast"));
      idx.insert(idx.end(), block.begin(), block.end());
      fams.push_back({"Time+Sentiment", idx});
    }
    fams.push_back(
        {"Time+Relevance", {time, features::feature_index("relevance")}});
    {
      std::vector<std::size_t> idx = {time};
      auto block = range(features::feature_index("self_fluency"),
                         features::feature_index("word_len"));
      idx.insert(idx.end(), block.begin(), block.end());
      fams.push_back({"Time+Content", idx});
    }
    fams.push_back({"All", range(0, features::kFeatureCount - 1)});
    return fams;
  }();
  return kFamilies;
}

inline const FeatureFamily& family_by_name(std::string_view name) {
  for (const auto& f : feature_families()) {
    if (f.name == name) return f;
  }
  std::string known;
  for (const auto& f : feature_families()) {
    if (!known.empty()) known += ", ";
    known += f.name;
  }
  throw ValidationError("unknown feature family '" + std::string(name) +
                        "' (known: " + known + ")");
}

/// Projects full registry vectors down to one family's columns.
inline Matrix family_matrix(const std::vector<features::FeatureVector>& rows,
                            const FeatureFamily& family) {
  Matrix x(rows.size(), std::vector<double>(family.indices.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < family.indices.size(); ++c) {
      x[r][c] = rows[r].values[family.indices[c]];
    }
  }
  return x;
}

// ---------------------------------------------------------------------------
// Standardization

struct StandardizationStats {
  std::vector<double> mean;
  std::vector<double> stddev;            // population (divide by n)
  std::vector<std::uint8_t> zero_variance;  // centered but not scaled

  double transform(std::size_t j, double v) const {
    return zero_variance[j] ? v - mean[j] : (v - mean[j]) / stddev[j];
  }
};

inline StandardizationStats standardize_fit(const Matrix& x) {
  if (x.size() < 2) {
    throw ValidationError("standardization needs >= 2 training rows");
  }
  std::size_t d = x[0].size();
  StandardizationStats s;
  s.mean.assign(d, 0.0);
  s.stddev.assign(d, 0.0);
  s.zero_variance.assign(d, 0);
  double n = static_cast<double>(x.size());
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) s.mean[j] += row[j];
  }
  for (std::size_t j = 0; j < d; ++j) s.mean[j] /= n;
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) {
      double c = row[j] - s.mean[j];
      s.stddev[j] += c * c;
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    s.stddev[j] = std::sqrt(s.stddev[j] / n);
    if (s.stddev[j] == 0.0) s.zero_variance[j] = 1;
  }
  return s;
}

inline Matrix standardize_apply(const Matrix& x,
                                const StandardizationStats& s) {
  Matrix out = x;
  for (auto& row : out) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = s.transform(j, row[j]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Ridge fit

struct FitResult {
  std::vector<double> weights;
  double intercept = 0.0;
};

namespace detail {

/// In-place Cholesky solve of A w = b for symmetric positive definite A.
inline std::vector<double> cholesky_solve(std::vector<std::vector<double>> a,
                                          std::vector<double> b) {
  std::size_t d = a.size();
  for (std::size_t j = 0; j < d; ++j) {
    double pivot = a[j][j];
    for (std::size_t k = 0; k < j; ++k) pivot -= a[j][k] * a[j][k];
    if (pivot <= 0.0) {
      throw ValidationError(
          "normal equations are singular; refit with lambda > 0");
    }
    a[j][j] = std::sqrt(pivot);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = a[i][j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i][k] * a[j][k];
      a[i][j] = v / a[j][j];
    }
  }
  // Forward then back substitution: L z = b, L^T w = z.
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a[i][k] * b[k];
    b[i] /= a[i][i];
  }
  for (std::size_t ii = d; ii > 0; --ii) {
    std::size_t i = ii - 1;
    for (std::size_t k = i + 1; k < d; ++k) b[i] -= a[k][i] * b[k];
    b[i] /= a[i][i];
  }
  return b;
}

}  // namespace detail

inline FitResult ridge_fit(const Matrix& x, const std::vector<double>& y,
                           double lambda) {
  if (x.empty() || x.size() != y.size()) {
    throw ValidationError("ridge_fit needs matching non-empty X and y");
  }
  if (lambda < 0.0) throw ValidationError("lambda must be >= 0");
  std::size_t n = x.size(), d = x[0].size();
  std::vector<double> col_mean(d, 0.0);
  for (const auto& row : x) {
    for (std::size_t j = 0; j < d; ++j) col_mean[j] += row[j];
  }
  for (auto& m : col_mean) m /= static_cast<double>(n);
  double y_mean = std::accumulate(y.begin(), y.end(), 0.0) /
                  static_cast<double>(n);

  std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
  std::vector<double> b(d, 0.0);
  std::vector<double> centered(d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) centered[j] = x[i][j] - col_mean[j];
    double yc = y[i] - y_mean;
    for (std::size_t j = 0; j < d; ++j) {
      b[j] += centered[j] * yc;
      for (std::size_t k = 0; k <= j; ++k) a[j][k] += centered[j] * centered[k];
    }
  }
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t k = j + 1; k < d; ++k) a[j][k] = a[k][j];
    a[j][j] += lambda;
  }

  FitResult fit;
  fit.weights = detail::cholesky_solve(std::move(a), std::move(b));
  fit.intercept = y_mean;
  for (std::size_t j = 0; j < d; ++j) {
    fit.intercept -= fit.weights[j] * col_mean[j];
  }
  return fit;
}

inline double predict_row(const FitResult& fit, const std::vector<double>& row) {
  double y = fit.intercept;
  for (std::size_t j = 0; j < row.size(); ++j) y += fit.weights[j] * row[j];
  return y;
}

// ---------------------------------------------------------------------------
// Cross-validated lambda selection

inline double cv_select_lambda(const Matrix& x, const std::vector<double>& y,
                               std::size_t folds,
                               const std::vector<double>& grid,
                               std::uint64_t seed,
                               std::vector<double>* grid_mse = nullptr) {
  if (grid.empty()) throw ValidationError("lambda grid is empty");
  if (folds < 2) throw ValidationError("cross-validation needs >= 2 folds");
  std::size_t n = x.size();
  if (n < folds) {
    throw ValidationError("cross-validation needs >= " +
                          std::to_string(folds) + " rows, got " +
                          std::to_string(n));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(seed);
  fisher_yates_shuffle(perm, rng);

  // Contiguous blocks of the shuffle; remainder spread one per leading fold.
  std::vector<std::pair<std::size_t, std::size_t>> bounds;
  std::size_t base = n / folds, rem = n % folds, at = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::size_t len = base + (f < rem ? 1 : 0);
    bounds.emplace_back(at, at + len);
    at += len;
  }

  std::vector<double> sorted_grid = grid;
  std::sort(sorted_grid.begin(), sorted_grid.end());
  std::vector<double> mse(sorted_grid.size(), 0.0);

  for (auto [begin, end] : bounds) {
    Matrix train_x;
    std::vector<double> train_y;
    train_x.reserve(n - (end - begin));
    for (std::size_t p = 0; p < n; ++p) {
      if (p >= begin && p < end) continue;
      train_x.push_back(x[perm[p]]);
      train_y.push_back(y[perm[p]]);
    }
    StandardizationStats stats = standardize_fit(train_x);
    Matrix train_std = standardize_apply(train_x, stats);
    for (std::size_t g = 0; g < sorted_grid.size(); ++g) {
      FitResult fit = ridge_fit(train_std, train_y, sorted_grid[g]);
      double err = 0.0;
      for (std::size_t p = begin; p < end; ++p) {
        std::vector<double> row = x[perm[p]];
        for (std::size_t j = 0; j < row.size(); ++j) {
          row[j] = stats.transform(j, row[j]);
        }
        double r = predict_row(fit, row) - y[perm[p]];
        err += r * r;
      }
      mse[g] += err / static_cast<double>(end - begin);
    }
  }
  for (auto& m : mse) m /= static_cast<double>(folds);

  std::size_t best = 0;
  for (std::size_t g = 1; g < sorted_grid.size(); ++g) {
    if (mse[g] < mse[best]) best = g;  // ties keep the smaller lambda
  }
  if (grid_mse) *grid_mse = mse;
  return sorted_grid[best];
}

// ---------------------------------------------------------------------------
// Trained model bundle + plain-text round-trip format

struct RidgeModel {
  std::string family;
  std::vector<std::string> feature_names;
  std::vector<std::size_t> feature_indices;
  StandardizationStats stats;
  std::vector<double> weights;  // over standardized columns
  double intercept = 0.0;
  double lambda = 0.0;
  std::uint64_t cv_seed = 0;

  double predict(const features::FeatureVector& fv) const {
    double y = intercept;
    for (std::size_t j = 0; j < feature_indices.size(); ++j) {
      y += weights[j] * stats.transform(j, fv.values[feature_indices[j]]);
    }
    return y;
  }
};

inline RidgeModel train_family(const std::vector<features::FeatureVector>& rows,
                               const std::vector<double>& y,
                               const FeatureFamily& family,
                               const std::vector<double>& grid,
                               std::size_t folds, std::uint64_t cv_seed) {
  Matrix x = family_matrix(rows, family);
  RidgeModel m;
  m.family = family.name;
  m.feature_indices = family.indices;
  for (std::size_t i : family.indices) {
    m.feature_names.emplace_back(features::feature_registry()[i]);
  }
  m.cv_seed = cv_seed;
  m.lambda = grid.size() == 1 ? grid.front()
                              : cv_select_lambda(x, y, folds, grid, cv_seed);
  m.stats = standardize_fit(x);
  FitResult fit = ridge_fit(standardize_apply(x, m.stats), y, m.lambda);
  m.weights = std::move(fit.weights);
  m.intercept = fit.intercept;
  return m;
}

inline void save_model(const RidgeModel& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file: " + path);
  out << "# threadrank-model v1\n";
  out << "family\t" << m.family << '\n';
  out << "lambda\t" << format_double(m.lambda) << '\n';
  out << "intercept\t" << format_double(m.intercept) << '\n';
  out << "cv_seed\t" << m.cv_seed << '\n';
  out << "features\t" << m.feature_names.size() << '\n';
  for (std::size_t j = 0; j < m.feature_names.size(); ++j) {
    out << m.feature_names[j] << '\t' << format_double(m.stats.mean[j]) << '\t'
        << format_double(m.stats.stddev[j]) << '\t'
        << format_double(m.weights[j]) << '\n';
  }
  if (!out) throw IoError("write failed: " + path);
}

inline RidgeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open model file: " + path);
  RidgeModel m;
  std::string line;
  std::size_t n_features = 0;
  bool header_done = false;
  while (!header_done && std::getline(in, line)) {
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto tab = sv.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError(path + ": malformed model line: " + line);
    }
    std::string_view key = sv.substr(0, tab);
    std::string_view value = trim(sv.substr(tab + 1));
    if (key == "family") {
      m.family = std::string(value);
    } else if (key == "lambda") {
      m.lambda = parse_double(value, "model lambda");
    } else if (key == "intercept") {
      m.intercept = parse_double(value, "model intercept");
    } else if (key == "cv_seed") {
      m.cv_seed = static_cast<std::uint64_t>(parse_int(value, "model cv_seed"));
    } else if (key == "features") {
      n_features = static_cast<std::size_t>(parse_int(value, "model features"));
      header_done = true;
    } else {
      throw ValidationError(path + ": unknown model key: " + std::string(key));
    }
  }
  if (!header_done) throw ValidationError(path + ": truncated model file");
  for (std::size_t j = 0; j < n_features; ++j) {
    if (!std::getline(in, line)) {
      throw ValidationError(path + ": expected " + std::to_string(n_features) +
                            " feature lines");
    }
    auto fields = split(trim(line), '\t');
    if (fields.size() != 4) {
      throw ValidationError(path + ": malformed feature line: " + line);
    }
    m.feature_names.emplace_back(trim(fields[0]));
    m.feature_indices.push_back(features::feature_index(trim(fields[0])));
    m.stats.mean.push_back(parse_double(trim(fields[1]), "feature mean"));
    double sd = parse_double(trim(fields[2]), "feature stddev");
    m.stats.stddev.push_back(sd);
    m.stats.zero_variance.push_back(sd == 0.0 ? 1 : 0);
    m.weights.push_back(parse_double(trim(fields[3]), "feature weight"));
  }
  return m;
}

}  // namespace threadrank::model

#endif  // THREADRANK_MODEL_HPP_
