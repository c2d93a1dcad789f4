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
 * Category lexicon with wildcard (prefix) patterns and an optional word
 * valence table. File format, one entry per line:
 *
 *     <category><TAB><pattern>,<pattern>,...     e.g.  posemo\thappy,glad*
 *     %valence                                   switches to the valence section
 *     <word><TAB><score in [-4,4]>
 *
 * '#' lines and blank lines are ignored. A trailing '*' in a pattern makes
 * it a prefix match ("happ*" matches "happiness").
 */

#ifndef THREADRANK_LEXICON_HPP_
#define THREADRANK_LEXICON_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "threadrank/util.hpp"

namespace threadrank::textstats {

class Lexicon {
 public:
  /// Category ids are assigned in file order and returned by matching.
  std::size_t add_category(const std::string& name) {
    if (category_ids_.count(name)) {
      throw ValidationError("duplicate lexicon category: " + name);
    }
    std::size_t id = category_names_.size();
    category_ids_.emplace(name, id);
    category_names_.push_back(name);
    return id;
  }

  void add_pattern(std::size_t category, std::string_view pattern) {
    if (pattern.empty() || pattern == "*") {
      throw ValidationError("invalid lexicon pattern for category '" +
                            category_names_.at(category) + "'");
    }
    if (pattern.back() == '*') {
      add_to_trie(pattern.substr(0, pattern.size() - 1), category,
                  /*prefix=*/true);
    } else {
      literals_[std::string(pattern)].push_back(category);
    }
  }

  void set_valence(const std::string& word, double score) {
    if (score < -4.0 || score > 4.0) {
      throw ValidationError("valence for '" + word + "' outside [-4, 4]");
    }
    valence_[word] = score;
  }

  const std::vector<std::string>& category_names() const {
    return category_names_;
  }

  std::size_t category_id(std::string_view name) const {
    auto it = category_ids_.find(std::string(name));
    if (it == category_ids_.end()) {
      throw ValidationError("unknown lexicon category: " + std::string(name));
    }
    return it->second;
  }

  bool has_category(std::string_view name) const {
    return category_ids_.count(std::string(name)) > 0;
  }

  bool has_valence() const { return !valence_.empty(); }

  /// Valence score for a token, or 0 with *found=false when absent.
  double valence(const std::string& token, bool* found = nullptr) const {
    auto it = valence_.find(token);
    if (found) *found = it != valence_.end();
    return it == valence_.end() ? 0.0 : it->second;
  }

  /// Appends every category the token belongs to (each category at most
  /// once, even if several of its patterns match).
  void match(const std::string& token, std::vector<std::size_t>& out) const {
    std::size_t first = out.size();
    if (auto it = literals_.find(token); it != literals_.end()) {
      out.insert(out.end(), it->second.begin(), it->second.end());
    }
    const TrieNode* node = root_.get();
    for (std::size_t i = 0; node && i < token.size(); ++i) {
      node = node->child(token[i]);
      if (node) {
        out.insert(out.end(), node->prefix_categories.begin(),
                   node->prefix_categories.end());
      }
    }
    dedupe_tail(out, first);
  }

 private:
  struct TrieNode {
    std::map<char, std::unique_ptr<TrieNode>> children;
    std::vector<std::size_t> prefix_categories;  // prefixes ending here

    const TrieNode* child(char c) const {
      auto it = children.find(c);
      return it == children.end() ? nullptr : it->second.get();
    }
  };

  void add_to_trie(std::string_view prefix, std::size_t category, bool) {
    TrieNode* node = root_.get();
    for (char c : prefix) {
      auto& slot = node->children[c];
      if (!slot) slot = std::make_unique<TrieNode>();
      node = slot.get();
    }
    node->prefix_categories.push_back(category);
  }

  static void dedupe_tail(std::vector<std::size_t>& v, std::size_t first) {
    for (std::size_t i = first; i < v.size(); ++i) {
      for (std::size_t j = first; j < i; ++j) {
        if (v[j] == v[i]) {
          v[i] = v.back();
          v.pop_back();
          --i;
          break;
        }
      }
    }
  }

  std::vector<std::string> category_names_;
  std::unordered_map<std::string, std::size_t> category_ids_;
  std::unordered_map<std::string, std::vector<std::size_t>> literals_;
  std::unique_ptr<TrieNode> root_ = std::make_unique<TrieNode>();
  std::unordered_map<std::string, double> valence_;
};

inline Lexicon load_lexicon(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon file: " + path);
  Lexicon lex;
  std::string line;
  std::size_t lineno = 0;
  bool valence_section = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view sv = trim(line);
    if (sv.empty() || sv.front() == '#') continue;
    if (sv == "%valence") {
      valence_section = true;
      continue;
    }
    auto tab = sv.find('\t');
    if (tab == std::string_view::npos) {
      throw ValidationError("lexicon line " + std::to_string(lineno) +
                            ": expected <name><TAB><values>");
    }
    std::string key(trim(sv.substr(0, tab)));
    std::string_view rest = trim(sv.substr(tab + 1));
    if (valence_section) {
      lex.set_valence(key, parse_double(rest, "valence of '" + key + "'"));
      continue;
    }
    std::size_t id = lex.add_category(key);
    std::size_t n_patterns = 0;
    for (const auto& pat : split(rest, ',')) {
      std::string_view p = trim(pat);
      if (p.empty()) continue;
      lex.add_pattern(id, p);
      ++n_patterns;
    }
    if (n_patterns == 0) {
      throw ValidationError("lexicon category '" + key + "' has no patterns");
    }
  }
  return lex;
}

/// Per-category token counts. A token may count toward several categories;
/// within one category it counts once no matter how many patterns match.
inline std::vector<std::size_t> category_counts_indexed(
    const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  std::vector<std::size_t> counts(lexicon.category_names().size(), 0);
  std::vector<std::size_t> matched;
  for (const auto& tok : tokens) {
    matched.clear();
    lexicon.match(tok, matched);
    for (std::size_t id : matched) ++counts[id];
  }
  return counts;
}

inline std::map<std::string, std::size_t> category_counts(
    const std::vector<std::string>& tokens, const Lexicon& lexicon) {
  auto indexed = category_counts_indexed(tokens, lexicon);
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < indexed.size(); ++i) {
    out[lexicon.category_names()[i]] = indexed[i];
  }
  return out;
}

}  // namespace threadrank::textstats

#endif  // THREADRANK_LEXICON_HPP_
