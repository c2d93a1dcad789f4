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
 * Multinomial naive Bayes over subjective/objective sentences, add-one
 * smoothing, log-space. Tokens outside the training vocabulary are ignored
 * at classification time.
 */

#ifndef THREADRANK_SUBJECTIVITY_HPP_
#define THREADRANK_SUBJECTIVITY_HPP_

#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "threadrank/text.hpp"
#include "threadrank/util.hpp"

namespace threadrank::features {

struct LabeledSentence {
  std::string text;
  bool subjective = false;
};

class SubjectivityModel {
 public:
  /// Trains on raw sentences; requires at least one example of each class.
  static SubjectivityModel train(const std::vector<LabeledSentence>& data) {
    SubjectivityModel m;
    std::unordered_map<std::string, std::uint64_t> counts[2];
    std::uint64_t totals[2] = {0, 0};
    std::uint64_t docs[2] = {0, 0};
    for (const auto& example : data) {
      int c = example.subjective ? 1 : 0;
      ++docs[c];
      for (const auto& tok : textstats::tokenize(example.text).tokens) {
        ++counts[c][tok];
        ++totals[c];
        m.vocabulary_.insert({tok, 0});
      }
    }
    if (docs[0] == 0 || docs[1] == 0) {
      throw ValidationError(
          "subjectivity training needs both subjective and objective "
          "examples");
    }
    double n_docs = static_cast<double>(docs[0] + docs[1]);
    m.log_prior_[0] = std::log(docs[0] / n_docs);
    m.log_prior_[1] = std::log(docs[1] / n_docs);
    double v = static_cast<double>(m.vocabulary_.size());
    for (int c = 0; c < 2; ++c) {
      double denom = std::log(static_cast<double>(totals[c]) + v);
      m.log_unseen_[c] = std::log(1.0) - denom;
      for (auto& [word, slot] : m.vocabulary_) {
        auto it = counts[c].find(word);
        std::uint64_t n = it == counts[c].end() ? 0 : it->second;
        m.log_likelihood_[c][word] =
            std::log(static_cast<double>(n) + 1.0) - denom;
      }
    }
    return m;
  }

  /// P(subjective | text). Out-of-vocabulary tokens are skipped; an empty
  /// or fully-unknown text falls back to the priors.
  double p_subjective(std::string_view text) const {
    double lp[2] = {log_prior_[0], log_prior_[1]};
    for (const auto& tok : textstats::tokenize(text).tokens) {
      if (!vocabulary_.count(tok)) continue;
      for (int c = 0; c < 2; ++c) {
        auto it = log_likelihood_[c].find(tok);
        lp[c] += it == log_likelihood_[c].end() ? log_unseen_[c] : it->second;
      }
    }
    // posterior = e^ls / (e^ls + e^lo) = 1 / (1 + e^(lo - ls))
    return 1.0 / (1.0 + std::exp(lp[0] - lp[1]));
  }

  std::size_t vocabulary_size() const { return vocabulary_.size(); }

 private:
  // index 0 = objective, 1 = subjective
  double log_prior_[2] = {0.0, 0.0};
  double log_unseen_[2] = {0.0, 0.0};
  std::unordered_map<std::string, double> log_likelihood_[2];
  std::unordered_map<std::string, int> vocabulary_;
};

struct SubjectivityFeatures {
  double psubj = 0.5;
  double pobj = 0.5;
  double subjcat = 0.0;
};

inline SubjectivityFeatures subjectivity_features(std::string_view text,
                                                  const SubjectivityModel& m) {
  SubjectivityFeatures f;
  f.psubj = m.p_subjective(text);
  f.pobj = 1.0 - f.psubj;
  f.subjcat = f.psubj > 0.5 ? 1.0 : 0.0;  // exact tie counts as objective
  return f;
}

/// Reads "subj|obj<TAB>sentence" lines; '#' lines and blanks are skipped.
inline std::vector<LabeledSentence> load_labeled_sentences(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open labeled sentences: " + path);
  std::vector<LabeledSentence> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    auto tab = sv.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": expected <label><TAB><sentence>");
    }
    std::string_view label = trim(sv.substr(0, tab));
    if (label != "subj" && label != "obj") {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": label must be 'subj' or 'obj'");
    }
    out.push_back({std::string(trim(sv.substr(tab + 1))), label == "subj"});
  }
  return out;
}

/// Mean k-fold accuracy with contiguous folds over a pre-shuffled copy.
inline double cross_validated_accuracy(std::vector<LabeledSentence> data,
                                       std::size_t folds, std::uint64_t seed) {
  if (folds < 2 || data.size() < folds) {
    throw ValidationError("cross-validation needs >= 2 folds and >= folds rows");
  }
  Rng rng(seed);
  fisher_yates_shuffle(data, rng);
  std::size_t n = data.size();
  std::size_t correct = 0, scored = 0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::size_t begin = f * n / folds;
    std::size_t end = (f + 1) * n / folds;
    std::vector<LabeledSentence> train_rows;
    train_rows.reserve(n - (end - begin));
    for (std::size_t i = 0; i < n; ++i) {
      if (i < begin || i >= end) train_rows.push_back(data[i]);
    }
    SubjectivityModel m = SubjectivityModel::train(train_rows);
    for (std::size_t i = begin; i < end; ++i) {
      bool predicted = m.p_subjective(data[i].text) > 0.5;
      correct += predicted == data[i].subjective ? 1 : 0;
      ++scored;
    }
  }
  return static_cast<double>(correct) / static_cast<double>(scored);
}

}  // namespace threadrank::features

#endif  // THREADRANK_SUBJECTIVITY_HPP_
