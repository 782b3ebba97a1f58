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

#include <cmath>
#include <string>
#include <unordered_map>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

/// Clipped unigram precision (sentence-level BLEU-1, no brevity penalty):
/// each distinct candidate word is credited at most as often as it occurs
/// in the reference, and the clipped total is divided by the candidate
/// length. Word order is irrelevant by construction.
inline double lex_score(const std::vector<std::string>& candidate_tokens,
                        const std::vector<std::string>& reference_tokens) {
  if (candidate_tokens.empty()) fail_data("lex_score: empty candidate sentence");
  if (reference_tokens.empty()) fail_data("lex_score: empty reference sentence");

  std::unordered_map<std::string, std::size_t> ref_counts;
  for (const std::string& w : reference_tokens) ++ref_counts[w];

  std::unordered_map<std::string, std::size_t> cand_counts;
  for (const std::string& w : candidate_tokens) ++cand_counts[w];

  std::size_t clipped = 0;
  for (const auto& [word, count] : cand_counts) {
    auto it = ref_counts.find(word);
    if (it != ref_counts.end()) clipped += std::min(count, it->second);
  }
  return static_cast<double>(clipped) /
         static_cast<double>(candidate_tokens.size());
}

/// Classic BLEU brevity penalty: 1 when the candidate is at least as long
/// as the reference, exp(1 - r/c) otherwise. Off by default — the plain
/// factor is pure clipped precision — but available behind a flag.
inline double brevity_penalty(std::size_t candidate_len,
                              std::size_t reference_len) {
  if (candidate_len >= reference_len) return 1.0;
  return std::exp(1.0 - static_cast<double>(reference_len) /
                            static_cast<double>(candidate_len));
}

/// Which sentence plays the BLEU candidate role when scoring a pair.
enum class LexDirection {
  kHypAgainstRef,  // candidate = y (hypothesis), reference = x — BLEU convention
  kRefAgainstHyp,  // candidate = x, reference = y
  kSymmetric,      // mean of both directions
};

inline double lex_pair_score(const std::vector<std::string>& x_tokens,
                             const std::vector<std::string>& y_tokens,
                             LexDirection direction = LexDirection::kHypAgainstRef,
                             bool apply_brevity_penalty = false) {
  auto directed = [&](const std::vector<std::string>& cand,
                      const std::vector<std::string>& ref) {
    double score = lex_score(cand, ref);
    if (apply_brevity_penalty) score *= brevity_penalty(cand.size(), ref.size());
    return score;
  };
  switch (direction) {
    case LexDirection::kHypAgainstRef:
      return directed(y_tokens, x_tokens);
    case LexDirection::kRefAgainstHyp:
      return directed(x_tokens, y_tokens);
    case LexDirection::kSymmetric:
      return 0.5 * (directed(y_tokens, x_tokens) + directed(x_tokens, y_tokens));
  }
  fail_data("lex_pair_score: invalid direction");
}

}  // namespace metriclens
