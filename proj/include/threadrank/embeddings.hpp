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
 */

#ifndef THREADRANK_EMBEDDINGS_HPP_
#define THREADRANK_EMBEDDINGS_HPP_

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "threadrank/util.hpp"

namespace threadrank::textstats {

/// Word vectors in the usual text format: optional "count dim" header,
/// then one "word v1 v2 ... vd" line per word. Every row must share one
/// dimensionality.
class EmbeddingTable {
 public:
  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return vectors_.size(); }

  /// nullptr when the word has no vector.
  const std::vector<double>* lookup(const std::string& word) const {
    auto it = vectors_.find(word);
    return it == vectors_.end() ? nullptr : &it->second;
  }

  void add(const std::string& word, std::vector<double> vec) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_) {
      throw ValidationError("embedding for '" + word + "' has dimension " +
                            std::to_string(vec.size()) + ", expected " +
                            std::to_string(dim_));
    }
    vectors_[word] = std::move(vec);
  }

  static EmbeddingTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embeddings file: " + path);
    EmbeddingTable table;
    std::string line;
    std::size_t lineno = 0;
    bool first_content = true;
    while (std::getline(in, line)) {
      ++lineno;
      std::string_view sv = trim(line);
      if (sv.empty() || sv.front() == '#') continue;
      std::vector<std::string_view> fields;
      {
        std::size_t start = 0;
        while (start < sv.size()) {
          while (start < sv.size() && (sv[start] == ' ' || sv[start] == '\t'))
            ++start;
          std::size_t end = start;
          while (end < sv.size() && sv[end] != ' ' && sv[end] != '\t') ++end;
          if (end > start) fields.push_back(sv.substr(start, end - start));
          start = end;
        }
      }
      if (fields.empty()) continue;
      if (first_content && fields.size() == 2 && looks_numeric(fields[0]) &&
          looks_numeric(fields[1])) {
        first_content = false;  // "count dim" header; sizes checked per row
        continue;
      }
      first_content = false;
      if (fields.size() < 2) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": embedding row needs a word and values");
      }
      std::vector<double> vec;
      vec.reserve(fields.size() - 1);
      for (std::size_t i = 1; i < fields.size(); ++i) {
        vec.push_back(parse_double(fields[i], path + ":" +
                                   std::to_string(lineno) + " value"));
      }
      try {
        table.add(std::string(fields[0]), std::move(vec));
      } catch (const ValidationError& e) {
        throw ValidationError(path + ":" + std::to_string(lineno) + ": " +
                              e.what());
      }
    }
    return table;
  }

 private:
  static bool looks_numeric(std::string_view sv) {
    if (sv.empty()) return false;
    for (char c : sv) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  }

  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::vector<double>> vectors_;
};

inline double cosine_similarity(const std::vector<double>& a,
                                const std::vector<double>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("cosine of vectors with different dimensions");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace threadrank::textstats

#endif  // THREADRANK_EMBEDDINGS_HPP_
