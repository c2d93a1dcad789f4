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

#ifndef THREADRANK_FREQUENCY_HPP_
#define THREADRANK_FREQUENCY_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "threadrank/util.hpp"

namespace threadrank::textstats {

/// Token counts over some corpus, used for add-one smoothed relative
/// log frequencies:  ln(count + 1) - ln(total + vocabulary size).
/// Unseen words get the same small but finite value instead of -inf.
class FrequencyTable {
 public:
  FrequencyTable() = default;
  explicit FrequencyTable(std::string source) : source_(std::move(source)) {}

  void add(const std::string& token, std::uint64_t count = 1) {
    counts_[token] += count;
    total_ += count;
  }

  std::uint64_t count(const std::string& token) const {
    auto it = counts_.find(token);
    return it == counts_.end() ? 0 : it->second;
  }

  std::uint64_t total() const { return total_; }
  std::size_t vocabulary_size() const { return counts_.size(); }
  const std::string& source() const { return source_; }
  void set_source(std::string source) { source_ = std::move(source); }

  double log_frequency(const std::string& token) const {
    if (total_ == 0) {
      throw ValidationError("log_frequency on empty frequency table");
    }
    return std::log(static_cast<double>(count(token) + 1)) -
           std::log(static_cast<double>(total_ + counts_.size()));
  }

  const std::unordered_map<std::string, std::uint64_t>& counts() const {
    return counts_;
  }

  /// Writes the cache format: a header line with totals, then one
  /// word<TAB>count line per word, sorted by word.
  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write frequency table: " + path);
    out << "# threadrank-freq v1 total=" << total_
        << " vocab=" << counts_.size() << " source=" << source_ << "\n";
    std::vector<const std::string*> words;
    words.reserve(counts_.size());
    for (const auto& [w, _] : counts_) words.push_back(&w);
    std::sort(words.begin(), words.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });
    for (const std::string* w : words) {
      out << *w << '\t' << counts_.at(*w) << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
  }

  static FrequencyTable load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open frequency table: " + path);
    std::string line;
    if (!std::getline(in, line)) {
      throw ValidationError("frequency table is empty: " + path);
    }
    FrequencyTable table;
    std::uint64_t declared_total = 0;
    std::uint64_t declared_vocab = 0;
    bool has_header = false;
    if (line.rfind("# threadrank-freq v1 ", 0) == 0) {
      has_header = true;
      for (const auto& field : split(line, ' ')) {
        std::string_view f = trim(field);
        if (f.rfind("total=", 0) == 0) {
          declared_total = static_cast<std::uint64_t>(
              parse_int(f.substr(6), "frequency header total"));
        } else if (f.rfind("vocab=", 0) == 0) {
          declared_vocab = static_cast<std::uint64_t>(
              parse_int(f.substr(6), "frequency header vocab"));
        } else if (f.rfind("source=", 0) == 0) {
          table.source_ = std::string(f.substr(7));
        }
      }
    }
    std::size_t lineno = 1;
    auto consume = [&](std::string_view sv) {
      sv = trim(sv);
      if (sv.empty() || sv.front() == '#') return;
      auto tab = sv.find('\t');
      if (tab == std::string_view::npos) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": expected <word><TAB><count>");
      }
      std::string word(trim(sv.substr(0, tab)));
      long long n = parse_int(trim(sv.substr(tab + 1)),
                              "count for '" + word + "'");
      if (n < 0) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": negative count");
      }
      table.add(word, static_cast<std::uint64_t>(n));
    };
    if (!has_header) consume(line);
    while (std::getline(in, line)) {
      ++lineno;
      consume(line);
    }
    if (has_header) {
      if (table.total_ != declared_total) {
        throw ValidationError(path + ": bad frequency table, counts sum to " +
                              std::to_string(table.total_) +
                              " but header declares " +
                              std::to_string(declared_total));
      }
      if (table.counts_.size() != declared_vocab) {
        throw ValidationError(path + ": bad frequency table, " +
                              std::to_string(table.counts_.size()) +
                              " words but header declares " +
                              std::to_string(declared_vocab));
      }
    }
    return table;
  }

 private:
  std::unordered_map<std::string, std::uint64_t> counts_;
  std::uint64_t total_ = 0;
  std::string source_;
};

}  // namespace threadrank::textstats

#endif  // THREADRANK_FREQUENCY_HPP_
