// Copyright 2026 The metriclens Authors
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

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metriclens/error.hpp"

namespace metriclens {

// ---------------------------------------------------------------------------
// SentencePair
// ---------------------------------------------------------------------------

/// One (x, y) pair: x is the reference or source sentence, y the hypothesis.
/// `sem` holds the raw human score when available (DA for MT data, similarity
/// for STS-style data); it is normalized later, in the regression stage.
struct SentencePair {
  std::string id;
  std::vector<std::string> x_tokens;
  std::vector<std::string> y_tokens;
  std::optional<double> sem;
  std::string lang_x = "en";
  std::string lang_y = "en";
};

// ---------------------------------------------------------------------------
// DependencyTree
// ---------------------------------------------------------------------------

/// Ordered rooted tree over the tokens of one sentence. Node i corresponds
/// to token i (surface order); children are kept sorted by token index.
/// Labels are intentionally absent: only structure is compared.
class DependencyTree {
 public:
  static constexpr std::size_t kNoParent = static_cast<std::size_t>(-1);

  /// Builds a tree from per-node parent indices, where `parents[i]` is the
  /// index of node i's head and kNoParent marks the root. Validates that
  /// there is exactly one root, every parent exists, and there is no cycle.
  /// `context` is prepended to error messages (e.g. a sentence id).
  static DependencyTree from_parents(const std::vector<std::size_t>& parents,
                                     const std::string& context = "") {
    const std::size_t n = parents.size();
    auto where = [&context]() {
      return context.empty() ? std::string() : context + ": ";
    };
    if (n == 0) throw DataError(where() + "tree has no nodes");

    DependencyTree t;
    t.parent_ = parents;
    t.children_.assign(n, {});
    std::size_t root_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (parents[i] == kNoParent) {
        t.root_ = i;
        ++root_count;
        continue;
      }
      if (parents[i] >= n)
        fail_data(where(), "node ", i + 1, " references nonexistent head ",
                  parents[i] + 1);
      if (parents[i] == i)
        fail_data(where(), "node ", i + 1, " is its own head");
      t.children_[parents[i]].push_back(i);
    }
    if (root_count != 1)
      fail_data(where(), "expected exactly one root, found ", root_count);

    // Cycle check: walk each node to the root; in a valid tree every chain
    // terminates within n steps.
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t cur = i, steps = 0;
      while (cur != t.root_) {
        cur = parents[cur];
        if (++steps > n)
          fail_data(where(), "head chain from node ", i + 1, " forms a cycle");
      }
    }
    // push_back over increasing i already yields children in surface order,
    // but sort defensively so the invariant never depends on construction.
    for (auto& c : t.children_) std::sort(c.begin(), c.end());
    return t;
  }

  std::size_t size() const { return parent_.size(); }
  std::size_t root() const { return root_; }
  std::size_t parent(std::size_t i) const { return parent_[i]; }
  const std::vector<std::size_t>& children(std::size_t i) const {
    return children_[i];
  }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t root_ = 0;
};

// ---------------------------------------------------------------------------
// EmbeddingTable
// ---------------------------------------------------------------------------

/// word -> dense real vector, insertion-ordered so that iterating is
/// deterministic across runs and platforms.
class EmbeddingTable {
 public:
  explicit EmbeddingTable(std::size_t dimension = 0) : dimension_(dimension) {}

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return words_.size(); }

  void set_dimension(std::size_t d) {
    if (!words_.empty() && d != dimension_)
      fail_data("cannot change embedding dimension from ", dimension_, " to ",
                d, " after insertion");
    dimension_ = d;
  }

  /// Inserts a vector; returns false (keep-first) if the word already exists.
  bool insert(const std::string& word, std::vector<double> vec) {
    if (vec.size() != dimension_)
      fail_data("vector for '", word, "' has ", vec.size(),
                " components, expected ", dimension_);
    for (double v : vec)
      if (!std::isfinite(v))
        fail_data("vector for '", word, "' has a non-finite component");
    auto [it, fresh] = index_.try_emplace(word, words_.size());
    if (!fresh) return false;
    words_.push_back(word);
    vectors_.push_back(std::move(vec));
    return true;
  }

  bool contains(const std::string& word) const { return index_.count(word) > 0; }

  const std::vector<double>* find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vectors_[it->second];
  }

  /// Mutable access for in-place retrofitting updates.
  std::vector<double>* find_mutable(const std::string& word) {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : &vectors_[it->second];
  }

  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& vector_at(std::size_t i) const { return vectors_[i]; }
  std::vector<double>& vector_at(std::size_t i) { return vectors_[i]; }

 private:
  std::size_t dimension_;
  std::vector<std::string> words_;
  std::vector<std::vector<double>> vectors_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// MorphLexicon
// ---------------------------------------------------------------------------

/// Unordered word pairs that share an identical UD feature bundle, tagged
/// with that bundle. Pairs are deduplicated regardless of member order and
/// never pair a word with itself.
class MorphLexicon {
 public:
  struct Pair {
    std::string first;   // lexicographically <= second
    std::string second;
    std::string bundle;  // the shared feature bundle, e.g. "Tense=Past|VerbForm=Part"
  };

  /// Returns false if the pair is degenerate (w, w) or already present.
  bool add(std::string a, std::string b, const std::string& bundle) {
    if (a == b) return false;
    if (b < a) std::swap(a, b);
    auto [it, fresh] = seen_.try_emplace(a + '\t' + b, pairs_.size());
    if (!fresh) return false;
    pairs_.push_back(Pair{std::move(a), std::move(b), bundle});
    return true;
  }

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }

 private:
  std::vector<Pair> pairs_;
  std::unordered_map<std::string, std::size_t> seen_;
};

// ---------------------------------------------------------------------------
// ScoreTable
// ---------------------------------------------------------------------------

/// Named metric's per-pair scores, insertion-ordered.
class ScoreTable {
 public:
  explicit ScoreTable(std::string metric_name = "")
      : metric_name_(std::move(metric_name)) {}

  const std::string& metric_name() const { return metric_name_; }
  void set_metric_name(std::string name) { metric_name_ = std::move(name); }

  void add(const std::string& id, double score) {
    if (!std::isfinite(score))
      fail_data("metric '", metric_name_, "': non-finite score for id '", id, "'");
    auto [it, fresh] = index_.try_emplace(id, ids_.size());
    if (!fresh)
      fail_data("metric '", metric_name_, "': duplicate id '", id, "'");
    ids_.push_back(id);
    scores_.push_back(score);
  }

  bool contains(const std::string& id) const { return index_.count(id) > 0; }

  std::optional<double> find(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return scores_[it->second];
  }

  const std::vector<std::string>& ids() const { return ids_; }
  const std::vector<double>& scores() const { return scores_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }

 private:
  std::string metric_name_;
  std::vector<std::string> ids_;
  std::vector<double> scores_;
  std::unordered_map<std::string, std::size_t> index_;
};

// ---------------------------------------------------------------------------
// FactorTable
// ---------------------------------------------------------------------------

enum class FactorKind { SEM, SYN, LEX, MOR, CLB };

inline const char* factor_name(FactorKind k) {
  switch (k) {
    case FactorKind::SEM: return "SEM";
    case FactorKind::SYN: return "SYN";
    case FactorKind::LEX: return "LEX";
    case FactorKind::MOR: return "MOR";
    case FactorKind::CLB: return "CLB";
  }
  return "?";
}

inline std::optional<FactorKind> factor_from_name(std::string_view name) {
  if (name == "SEM") return FactorKind::SEM;
  if (name == "SYN") return FactorKind::SYN;
  if (name == "LEX") return FactorKind::LEX;
  if (name == "MOR") return FactorKind::MOR;
  if (name == "CLB") return FactorKind::CLB;
  return std::nullopt;
}

/// Canonical report order for factor columns.
inline const std::vector<FactorKind>& all_factor_kinds() {
  static const std::vector<FactorKind> kinds = {
      FactorKind::SEM, FactorKind::SYN, FactorKind::LEX, FactorKind::MOR,
      FactorKind::CLB};
  return kinds;
}

/// The regression design matrix: rows keyed by pair id, one column per
/// active factor plus the target metric score. Column-major storage.
class FactorTable {
 public:
  FactorTable(std::vector<FactorKind> factors, std::string target_name)
      : factors_(std::move(factors)), target_name_(std::move(target_name)) {}

  void add_row(const std::string& id, const std::vector<double>& factor_values,
               double target) {
    if (factor_values.size() != factors_.size())
      fail_data("factor row for '", id, "' has ", factor_values.size(),
                " values, expected ", factors_.size());
    for (double v : factor_values)
      if (!std::isfinite(v))
        fail_data("non-finite factor value for id '", id, "'");
    if (!std::isfinite(target))
      fail_data("non-finite target value for id '", id, "'");
    auto [it, fresh] = index_.try_emplace(id, ids_.size());
    if (!fresh) fail_data("duplicate row id '", id, "'");
    ids_.push_back(id);
    if (columns_.empty()) columns_.assign(factors_.size(), {});
    for (std::size_t c = 0; c < factors_.size(); ++c)
      columns_[c].push_back(factor_values[c]);
    target_.push_back(target);
  }

  const std::vector<FactorKind>& factors() const { return factors_; }
  const std::string& target_name() const { return target_name_; }
  const std::vector<std::string>& ids() const { return ids_; }
  std::size_t n_rows() const { return ids_.size(); }
  std::size_t n_factors() const { return factors_.size(); }

  const std::vector<double>& column(std::size_t c) const { return columns_[c]; }
  std::vector<double>& column(std::size_t c) { return columns_[c]; }
  const std::vector<double>& target() const { return target_; }
  std::vector<double>& target() { return target_; }

  bool normalized(std::size_t c) const {
    return c < normalized_.size() && normalized_[c];
  }
  bool target_normalized() const { return target_normalized_; }
  void mark_normalized(std::size_t c) {
    if (normalized_.size() < factors_.size()) normalized_.resize(factors_.size());
    normalized_[c] = true;
  }
  void mark_target_normalized() { target_normalized_ = true; }

  std::size_t dropped_rows() const { return dropped_rows_; }
  const std::vector<std::string>& dropped_ids() const { return dropped_ids_; }
  void record_dropped(const std::string& id) {
    ++dropped_rows_;
    dropped_ids_.push_back(id);
  }

 private:
  std::vector<FactorKind> factors_;
  std::string target_name_;
  std::vector<std::string> ids_;
  std::vector<std::vector<double>> columns_;  // column-major, one per factor
  std::vector<double> target_;
  std::vector<bool> normalized_;
  bool target_normalized_ = false;
  std::size_t dropped_rows_ = 0;
  std::vector<std::string> dropped_ids_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace metriclens
