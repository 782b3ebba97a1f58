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
#include <cstddef>
#include <unordered_map>
#include <utility>
#include <vector>

#include "metriclens/types.hpp"

namespace metriclens {

namespace detail {

/// Precomputed traversal data for Zhang-Shasha: postorder numbering,
/// leftmost-leaf-descendant indices, and keyroots.
struct TedIndex {
  std::vector<std::size_t> postorder;  // node ids in postorder
  std::vector<std::size_t> lml;        // postorder index of leftmost leaf per position
  std::vector<std::size_t> keyroots;   // postorder positions, ascending
};

inline TedIndex build_ted_index(const DependencyTree& t) {
  TedIndex idx;
  idx.postorder.reserve(t.size());
  std::vector<std::size_t> pos(t.size());

  // Iterative postorder; (node, index of next child to visit).
  std::vector<std::pair<std::size_t, std::size_t>> stack;
  stack.emplace_back(t.root(), 0);
  while (!stack.empty()) {
    auto [node, child] = stack.back();
    if (child < t.children(node).size()) {
      ++stack.back().second;
      stack.emplace_back(t.children(node)[child], 0);
    } else {
      pos[node] = idx.postorder.size();
      idx.postorder.push_back(node);
      stack.pop_back();
    }
  }

  // Leftmost leaf of the subtree at postorder position i: the position
  // itself for leaves, else the leftmost leaf of the first child.
  idx.lml.resize(t.size());
  for (std::size_t i = 0; i < idx.postorder.size(); ++i) {
    std::size_t node = idx.postorder[i];
    idx.lml[i] = t.children(node).empty()
                     ? i
                     : idx.lml[pos[t.children(node).front()]];
  }

  // Keyroots: the highest postorder position for each distinct leftmost
  // leaf (i.e. nodes with no ancestor sharing their leftmost leaf).
  std::unordered_map<std::size_t, std::size_t> highest;
  for (std::size_t i = 0; i < idx.lml.size(); ++i) highest[idx.lml[i]] = i;
  idx.keyroots.reserve(highest.size());
  for (const auto& [leaf, i] : highest) idx.keyroots.push_back(i);
  std::sort(idx.keyroots.begin(), idx.keyroots.end());
  return idx;
}

}  // namespace detail

/// Ordered tree edit distance with unit insert/delete cost and zero
/// relabel cost (labels are ignored entirely, so matching any node to any
/// node is free). Zhang-Shasha dynamic program over keyroot pairs.
inline std::size_t tree_edit_distance(const DependencyTree& t1,
                                      const DependencyTree& t2) {
  const detail::TedIndex i1 = detail::build_ted_index(t1);
  const detail::TedIndex i2 = detail::build_ted_index(t2);
  const std::size_t n1 = t1.size(), n2 = t2.size();

  // td[p1][p2] = distance between the subtrees rooted at postorder
  // positions p1 (in t1) and p2 (in t2).
  std::vector<std::vector<std::size_t>> td(n1, std::vector<std::size_t>(n2, 0));
  // fd = forest-distance scratch; index 0 is the empty forest.
  std::vector<std::vector<std::size_t>> fd(n1 + 1,
                                           std::vector<std::size_t>(n2 + 1, 0));

  for (std::size_t k1 : i1.keyroots) {
    const std::size_t L1 = i1.lml[k1];
    const std::size_t m = k1 - L1 + 1;
    for (std::size_t k2 : i2.keyroots) {
      const std::size_t L2 = i2.lml[k2];
      const std::size_t n = k2 - L2 + 1;

      fd[0][0] = 0;
      for (std::size_t di = 1; di <= m; ++di) fd[di][0] = fd[di - 1][0] + 1;
      for (std::size_t dj = 1; dj <= n; ++dj) fd[0][dj] = fd[0][dj - 1] + 1;

      for (std::size_t di = 1; di <= m; ++di) {
        const std::size_t p1 = L1 + di - 1;
        for (std::size_t dj = 1; dj <= n; ++dj) {
          const std::size_t p2 = L2 + dj - 1;
          if (i1.lml[p1] == L1 && i2.lml[p2] == L2) {
            // Both prefixes are whole subtrees: delete, insert, or match
            // the roots (match is free — labels ignored).
            fd[di][dj] = std::min({fd[di - 1][dj] + 1, fd[di][dj - 1] + 1,
                                   fd[di - 1][dj - 1]});
            td[p1][p2] = fd[di][dj];
          } else {
            const std::size_t fi = i1.lml[p1] - L1;  // forest left of subtree p1
            const std::size_t fj = i2.lml[p2] - L2;
            fd[di][dj] = std::min({fd[di - 1][dj] + 1, fd[di][dj - 1] + 1,
                                   fd[fi][fj] + td[p1][p2]});
          }
        }
      }
    }
  }
  return td[n1 - 1][n2 - 1];
}

/// Length-normalized syntactic similarity: 1 - TED / (|t1| + |t2|).
/// In [0, 1] because deleting all of t1 and inserting all of t2 costs
/// exactly |t1| + |t2|, an upper bound on the distance.
inline double syn_score(const DependencyTree& t1, const DependencyTree& t2) {
  const double ted = static_cast<double>(tree_edit_distance(t1, t2));
  return 1.0 - ted / static_cast<double>(t1.size() + t2.size());
}

}  // namespace metriclens
