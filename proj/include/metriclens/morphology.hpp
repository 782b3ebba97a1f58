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
#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/random.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

/// Canonical form of a UD feature bundle: features sorted and joined by
/// '|', so "VerbForm=Part|Tense=Past" and "Tense=Past|VerbForm=Part"
/// compare equal. Returns "" for empty or "_" bundles.
inline std::string canonicalize_bundle(std::string_view bundle) {
  std::string trimmed = trim(bundle);
  if (trimmed.empty() || trimmed == "_") return "";
  std::vector<std::string> feats;
  for (const std::string& part : split(trimmed, '|')) {
    std::string f = trim(part);
    if (!f.empty()) feats.push_back(std::move(f));
  }
  std::sort(feats.begin(), feats.end());
  return join(feats, "|");
}

namespace detail {

/// Maps a flat index k in [0, w*(w-1)/2) to the k-th unordered pair (i, j),
/// i < j, enumerated row by row. Used to sample pairs without materializing
/// the full quadratic pair list.
inline std::pair<std::size_t, std::size_t> kth_pair(std::size_t w, std::uint64_t k) {
  // Pairs with first element < i number cum(i) = i*(w-1) - i*(i-1)/2.
  auto cum = [w](std::uint64_t i) {
    return i * (w - 1) - i * (i - 1) / 2;
  };
  std::uint64_t lo = 0, hi = w - 1;  // largest i with cum(i) <= k
  while (lo < hi) {
    std::uint64_t mid = (lo + hi + 1) / 2;
    if (cum(mid) <= k)
      lo = mid;
    else
      hi = mid - 1;
  }
  std::size_t i = static_cast<std::size_t>(lo);
  std::size_t j = static_cast<std::size_t>(i + 1 + (k - cum(lo)));
  return {i, j};
}

}  // namespace detail

/// Builds the morphological lexicon: all unordered pairs of distinct words
/// sharing an identical canonicalized feature bundle. Bundles whose pair
/// count exceeds `pair_cap` are downsampled to `pair_cap` pairs with a
/// deterministic per-bundle seed, so huge tag classes cannot blow up
/// quadratically.
inline MorphLexicon build_morph_lexicon(
    const std::vector<std::pair<std::string, std::string>>& tagged_words,
    std::size_t pair_cap = 100000, std::uint64_t seed = 0) {
  // Group distinct words by canonical bundle, preserving first-seen order
  // of both bundles and words so output is independent of hashing.
  std::vector<std::string> bundle_order;
  std::unordered_map<std::string, std::vector<std::string>> groups;
  std::unordered_map<std::string, std::unordered_set<std::string>> group_seen;
  for (const auto& [word, raw_bundle] : tagged_words) {
    std::string bundle = canonicalize_bundle(raw_bundle);
    if (bundle.empty()) continue;
    auto [it, fresh] = groups.try_emplace(bundle);
    if (fresh) bundle_order.push_back(bundle);
    if (group_seen[bundle].insert(word).second) it->second.push_back(word);
  }

  MorphLexicon lexicon;
  for (const std::string& bundle : bundle_order) {
    const std::vector<std::string>& words = groups[bundle];
    const std::size_t w = words.size();
    if (w < 2) continue;
    const std::uint64_t total = std::uint64_t(w) * (w - 1) / 2;
    if (total <= pair_cap) {
      for (std::size_t i = 0; i < w; ++i)
        for (std::size_t j = i + 1; j < w; ++j)
          lexicon.add(words[i], words[j], bundle);
    } else {
      Rng rng(derive_seed(seed, bundle));
      std::unordered_set<std::uint64_t> chosen;
      std::vector<std::uint64_t> picks;
      picks.reserve(pair_cap);
      while (picks.size() < pair_cap) {
        std::uint64_t k = rng.below(total);
        if (chosen.insert(k).second) picks.push_back(k);
      }
      std::sort(picks.begin(), picks.end());
      for (std::uint64_t k : picks) {
        auto [i, j] = detail::kth_pair(w, k);
        lexicon.add(words[i], words[j], bundle);
      }
    }
  }
  return lexicon;
}

/// Objective tracked by retrofitting. The update below is exact per-node
/// minimization of
///
///   sum_i deg(i) * ||q_i - q_hat_i||^2  +  sum_{(i,j) in E} ||q_i - q_j||^2
///
/// (edges counted once), the degree-scaled form of the retrofitting
/// objective with alpha_i = 1 and beta_ij = 1/deg(i): multiplying node i's
/// terms by deg(i) makes the neighbor weights symmetric, which the
/// coordinate-descent sweep needs for a monotone objective.
inline double retrofit_objective(
    const EmbeddingTable& base, const EmbeddingTable& retro,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  std::unordered_map<std::string, std::size_t> degree;
  for (const auto& [a, b] : edges) {
    ++degree[a];
    ++degree[b];
  }
  double total = 0.0;
  for (const auto& [word, deg] : degree) {
    const std::vector<double>* q = retro.find(word);
    const std::vector<double>* qh = base.find(word);
    if (!q || !qh) continue;
    double d2 = 0.0;
    for (std::size_t c = 0; c < q->size(); ++c) {
      double d = (*q)[c] - (*qh)[c];
      d2 += d * d;
    }
    total += static_cast<double>(deg) * d2;
  }
  for (const auto& [a, b] : edges) {
    const std::vector<double>* qa = retro.find(a);
    const std::vector<double>* qb = retro.find(b);
    if (!qa || !qb) continue;
    for (std::size_t c = 0; c < qa->size(); ++c) {
      double d = (*qa)[c] - (*qb)[c];
      total += d * d;
    }
  }
  return total;
}

/// Retrofits embeddings toward the morphological lexicon graph with the
/// classic iterative update
///
///   q_i <- (q_hat_i + mean of neighbor q_j) / 2
///
/// i.e. alpha_i = 1, beta_ij = 1/deg(i), applied as in-place (Gauss-Seidel)
/// sweeps in stored word order. Lexicon pairs whose words are not both in
/// `base` are ignored; words outside the lexicon graph come back unchanged.
/// When `objective_trace` is non-null it receives the objective value after
/// each sweep.
inline EmbeddingTable retrofit_embeddings(
    const EmbeddingTable& base, const MorphLexicon& lexicon,
    std::size_t iterations = 10, std::vector<double>* objective_trace = nullptr) {
  EmbeddingTable retro = base;

  // Adjacency restricted to in-vocabulary words, as word indices.
  std::unordered_map<std::string, std::vector<std::size_t>> neighbors;
  std::vector<std::pair<std::string, std::string>> edges;
  std::unordered_map<std::string, std::size_t> word_index;
  for (std::size_t i = 0; i < base.words().size(); ++i)
    word_index[base.words()[i]] = i;
  for (const auto& p : lexicon.pairs()) {
    auto ia = word_index.find(p.first);
    auto ib = word_index.find(p.second);
    if (ia == word_index.end() || ib == word_index.end()) continue;
    neighbors[p.first].push_back(ib->second);
    neighbors[p.second].push_back(ia->second);
    edges.emplace_back(p.first, p.second);
  }
  if (edges.empty()) {
    if (objective_trace) objective_trace->assign(iterations, 0.0);
    return retro;
  }

  // Sweep in the table's stored word order for determinism.
  std::vector<std::size_t> graph_words;
  for (std::size_t i = 0; i < base.words().size(); ++i)
    if (neighbors.count(base.words()[i])) graph_words.push_back(i);

  const std::size_t dim = base.dimension();
  if (objective_trace) objective_trace->clear();
  std::vector<double> mean(dim);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t wi : graph_words) {
      const std::vector<std::size_t>& nb = neighbors[base.words()[wi]];
      std::fill(mean.begin(), mean.end(), 0.0);
      for (std::size_t ni : nb)
        for (std::size_t c = 0; c < dim; ++c) mean[c] += retro.vector_at(ni)[c];
      const double inv_deg = 1.0 / static_cast<double>(nb.size());
      const std::vector<double>& qh = base.vector_at(wi);
      std::vector<double>& q = retro.vector_at(wi);
      for (std::size_t c = 0; c < dim; ++c)
        q[c] = 0.5 * (qh[c] + mean[c] * inv_deg);
    }
    if (objective_trace)
      objective_trace->push_back(retrofit_objective(base, retro, edges));
  }
  return retro;
}

/// Decision of the cross-lingual morphology gate.
struct MorGate {
  bool active = true;
  double shared_fraction = 1.0;  // fraction of cross-lingual word pairs sharing a bundle
  std::string reason;            // set when deactivated
};

/// Morphology is only meaningful across languages when their tag
/// inventories actually connect words. This gate deactivates MOR when
/// fewer than `threshold` of the cross-lingual word pairs (one word per
/// side) share an identical canonical feature bundle.
inline MorGate mor_cross_lingual_gate(
    const std::vector<std::pair<std::string, std::string>>& tagged_x,
    const std::vector<std::pair<std::string, std::string>>& tagged_y,
    double threshold = 0.05) {
  MorGate gate;
  auto distinct_per_bundle =
      [](const std::vector<std::pair<std::string, std::string>>& tagged,
         std::unordered_map<std::string, std::unordered_set<std::string>>& out,
         std::unordered_set<std::string>& words) {
        for (const auto& [word, raw] : tagged) {
          std::string bundle = canonicalize_bundle(raw);
          if (bundle.empty()) continue;
          out[bundle].insert(word);
          words.insert(word);
        }
      };
  std::unordered_map<std::string, std::unordered_set<std::string>> bx, by;
  std::unordered_set<std::string> wx, wy;
  distinct_per_bundle(tagged_x, bx, wx);
  distinct_per_bundle(tagged_y, by, wy);
  if (wx.empty() || wy.empty()) {
    gate.active = false;
    gate.shared_fraction = 0.0;
    gate.reason = "no tagged words available for one language side";
    return gate;
  }
  double shared = 0.0;
  for (const auto& [bundle, words_x] : bx) {
    auto it = by.find(bundle);
    if (it != by.end())
      shared += static_cast<double>(words_x.size()) *
                static_cast<double>(it->second.size());
  }
  gate.shared_fraction = shared / (static_cast<double>(wx.size()) *
                                   static_cast<double>(wy.size()));
  if (gate.shared_fraction < threshold) {
    gate.active = false;
    gate.reason = detail::concat(
        "only ", format_double(gate.shared_fraction * 100.0),
        "% of cross-lingual word pairs share a feature bundle (threshold ",
        format_double(threshold * 100.0), "%)");
  }
  return gate;
}

namespace detail {

/// Mean of the in-vocabulary token vectors; errors when nothing is found.
inline std::vector<double> sentence_embedding(
    const std::vector<std::string>& tokens, const EmbeddingTable& table,
    const char* which) {
  std::vector<double> sum(table.dimension(), 0.0);
  std::size_t found = 0;
  for (const std::string& tok : tokens) {
    const std::vector<double>* v = table.find(tok);
    if (!v) continue;  // OOV tokens are skipped, not zero-imputed
    for (std::size_t c = 0; c < sum.size(); ++c) sum[c] += (*v)[c];
    ++found;
  }
  if (found == 0)
    fail_data("mor_score: ", which, " sentence has no in-vocabulary tokens");
  for (double& v : sum) v /= static_cast<double>(found);
  return sum;
}

}  // namespace detail

/// Cosine similarity of the two averaged sentence embeddings, in [-1, 1].
inline double mor_score(const std::vector<std::string>& x_tokens,
                        const std::vector<std::string>& y_tokens,
                        const EmbeddingTable& retro) {
  std::vector<double> ex = detail::sentence_embedding(x_tokens, retro, "x");
  std::vector<double> ey = detail::sentence_embedding(y_tokens, retro, "y");
  double dot = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t c = 0; c < ex.size(); ++c) {
    dot += ex[c] * ey[c];
    nx += ex[c] * ex[c];
    ny += ey[c] * ey[c];
  }
  if (nx == 0.0 || ny == 0.0)
    fail_data("mor_score: zero-norm averaged sentence embedding");
  double cos = dot / (std::sqrt(nx) * std::sqrt(ny));
  return std::clamp(cos, -1.0, 1.0);
}

}  // namespace metriclens
