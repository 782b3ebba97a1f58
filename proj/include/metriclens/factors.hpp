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

#include <string>
#include <unordered_map>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

/// The semantic factor is the raw human score, passed through unchanged;
/// normalization happens later with every other regressor.
inline double sem_score(const SentencePair& pair) {
  if (!pair.sem)
    fail_data("sem_score: pair '", pair.id, "' has no human semantic score");
  return *pair.sem;
}

/// The cross-lingual-bias factor is the metric's own score on parallel
/// (source, high-quality translation) pairs, used verbatim as a regressor
/// column; a well-calibrated metric yields a near-constant column.
inline std::unordered_map<std::string, double> clb_scores(
    const ScoreTable& metric_scores_on_parallel) {
  std::unordered_map<std::string, double> out;
  out.reserve(metric_scores_on_parallel.size());
  for (std::size_t i = 0; i < metric_scores_on_parallel.size(); ++i)
    out[metric_scores_on_parallel.ids()[i]] =
        metric_scores_on_parallel.scores()[i];
  return out;
}

}  // namespace metriclens
