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
#include <unordered_set>
#include <utility>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/io.hpp"
#include "metriclens/lexical.hpp"
#include "metriclens/random.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

// ---------------------------------------------------------------------------
// Noun permutation
// ---------------------------------------------------------------------------

/// Default noun detector: Penn-style tags beginning with "NN" or the UD
/// tags NOUN / PROPN.
inline bool is_noun_tag(std::string_view tag) {
  return tag.size() >= 2 && tag[0] == 'N' && tag[1] == 'N'
             ? true
             : (tag == "NOUN" || tag == "PROPN");
}

/// Randomly permutes the noun tokens of a sentence in place; all other
/// tokens keep their positions. The permutation is resampled up to 10
/// times when it reproduces the original token sequence (possible for
/// repeated nouns); if it still does, the identity is accepted and
/// `kept_identity` is set. Deterministic for a given seed.
inline std::vector<std::string> permute_nouns(
    const std::vector<std::string>& tokens,
    const std::vector<std::string>& pos_tags, std::uint64_t seed,
    bool* kept_identity = nullptr) {
  if (tokens.size() != pos_tags.size())
    fail_data("permute_nouns: ", tokens.size(), " tokens but ", pos_tags.size(),
              " POS tags");
  if (kept_identity) *kept_identity = false;

  std::vector<std::size_t> noun_slots;
  for (std::size_t i = 0; i < tokens.size(); ++i)
    if (is_noun_tag(pos_tags[i])) noun_slots.push_back(i);
  if (noun_slots.size() < 2) return tokens;

  Rng rng(seed);
  std::vector<std::string> out = tokens;
  for (int attempt = 0; attempt < 1 + 10; ++attempt) {
    std::vector<std::size_t> perm(noun_slots.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    rng.shuffle(perm);
    for (std::size_t i = 0; i < noun_slots.size(); ++i)
      out[noun_slots[i]] = tokens[noun_slots[perm[i]]];
    if (out != tokens) return out;
  }
  if (kept_identity) *kept_identity = true;
  return out;  // all resamples reproduced the sentence; accept and flag
}

// ---------------------------------------------------------------------------
// Triple construction
// ---------------------------------------------------------------------------

/// (A, B, C): anchor, low-overlap paraphrase, high-overlap non-paraphrase.
/// lex_ab / lex_ac score B / C as BLEU candidate against reference A.
struct AdversarialTriple {
  std::string id;
  std::vector<std::string> a_tokens;
  std::vector<std::string> b_tokens;
  std::vector<std::string> c_tokens;
  double lex_ab = 0.0;
  double lex_ac = 0.0;
};

/// Raw input for the noun-permutation construction: anchor A, its
/// paraphrase B, and POS tags aligned to A.
struct FreitagAnchor {
  std::string id;
  std::vector<std::string> a_tokens;
  std::vector<std::string> b_tokens;
  std::vector<std::string> a_pos_tags;
};

/// Raw input for the selection-based construction: one anchor with
/// labeled paraphrase / non-paraphrase candidates.
struct PawsAnchor {
  struct Candidate {
    std::vector<std::string> tokens;
    bool is_paraphrase = false;
  };
  std::string id;
  std::vector<std::string> a_tokens;
  std::vector<Candidate> candidates;
};

struct TripleBuildStats {
  std::size_t skipped_anchors = 0;   // paws anchors lacking a B or C candidate
  std::size_t identity_permutations = 0;  // noun permutation left A unchanged
};

/// C is A with its nouns permuted, so C preserves A's token multiset and
/// lex(A, C) is exactly 1. Per-anchor seeds are derived from the anchor id
/// so construction order cannot change results.
inline std::vector<AdversarialTriple> build_triples_freitag(
    const std::vector<FreitagAnchor>& anchors, std::uint64_t seed,
    TripleBuildStats* stats = nullptr) {
  std::vector<AdversarialTriple> triples;
  triples.reserve(anchors.size());
  for (const FreitagAnchor& anchor : anchors) {
    bool kept_identity = false;
    AdversarialTriple t;
    t.id = anchor.id;
    t.a_tokens = anchor.a_tokens;
    t.b_tokens = anchor.b_tokens;
    t.c_tokens = permute_nouns(anchor.a_tokens, anchor.a_pos_tags,
                               derive_seed(seed, anchor.id), &kept_identity);
    if (kept_identity && stats) ++stats->identity_permutations;
    t.lex_ab = lex_score(t.b_tokens, t.a_tokens);
    t.lex_ac = lex_score(t.c_tokens, t.a_tokens);
    triples.push_back(std::move(t));
  }
  return triples;
}

/// Selects per anchor the paraphrase with minimal overlap as B and the
/// non-paraphrase with maximal overlap as C, keeps the `top_k` triples
/// with the smallest lex_ab, sorted ascending. Anchors lacking either
/// candidate kind are skipped and counted.
inline std::vector<AdversarialTriple> build_triples_paws(
    const std::vector<PawsAnchor>& anchors, std::size_t top_k = 100,
    TripleBuildStats* stats = nullptr) {
  std::vector<AdversarialTriple> triples;
  for (const PawsAnchor& anchor : anchors) {
    const PawsAnchor::Candidate* best_b = nullptr;
    const PawsAnchor::Candidate* best_c = nullptr;
    double best_b_lex = 0.0, best_c_lex = 0.0;
    for (const auto& cand : anchor.candidates) {
      const double lex = lex_score(cand.tokens, anchor.a_tokens);
      if (cand.is_paraphrase) {
        if (!best_b || lex < best_b_lex) {
          best_b = &cand;
          best_b_lex = lex;
        }
      } else {
        if (!best_c || lex > best_c_lex) {
          best_c = &cand;
          best_c_lex = lex;
        }
      }
    }
    if (!best_b || !best_c) {
      if (stats) ++stats->skipped_anchors;
      continue;
    }
    AdversarialTriple t;
    t.id = anchor.id;
    t.a_tokens = anchor.a_tokens;
    t.b_tokens = best_b->tokens;
    t.c_tokens = best_c->tokens;
    t.lex_ab = best_b_lex;
    t.lex_ac = best_c_lex;
    triples.push_back(std::move(t));
  }
  std::stable_sort(triples.begin(), triples.end(),
                   [](const AdversarialTriple& a, const AdversarialTriple& b) {
                     return a.lex_ab < b.lex_ab;
                   });
  if (triples.size() > top_k) triples.resize(top_k);
  return triples;
}

// ---------------------------------------------------------------------------
// Preference evaluation
// ---------------------------------------------------------------------------

struct PreferenceReport {
  struct Row {
    std::string id;
    double score_ab = 0.0;
    double score_ac = 0.0;
    char preference = '=';  // 'B', 'C', or '=' for a tie
  };
  std::string metric;
  std::vector<Row> rows;
  double b_preference = 0.0;  // fraction with m(A,B) > m(A,C)
  double c_preference = 0.0;
  double tie_fraction = 0.0;
  double mean_gap = 0.0;      // mean of m(A,B) - m(A,C)
};

/// A robust metric prefers the paraphrase: m(A,B) > m(A,C). Ties are
/// counted separately (equality within 1e-9).
inline PreferenceReport evaluate_preferences(
    const std::vector<AdversarialTriple>& triples, const ScoreTable& scores_ab,
    const ScoreTable& scores_ac) {
  if (triples.empty()) fail_data("evaluate_preferences: no triples");
  PreferenceReport report;
  report.metric = scores_ab.metric_name();
  std::size_t b = 0, c = 0, ties = 0;
  double gap_sum = 0.0;
  for (const AdversarialTriple& t : triples) {
    auto ab = scores_ab.find(t.id);
    auto ac = scores_ac.find(t.id);
    if (!ab) fail_data("evaluate_preferences: no (A,B) score for id '", t.id, "'");
    if (!ac) fail_data("evaluate_preferences: no (A,C) score for id '", t.id, "'");
    PreferenceReport::Row row;
    row.id = t.id;
    row.score_ab = *ab;
    row.score_ac = *ac;
    if (std::abs(*ab - *ac) <= 1e-9) {
      row.preference = '=';
      ++ties;
    } else if (*ab > *ac) {
      row.preference = 'B';
      ++b;
    } else {
      row.preference = 'C';
      ++c;
    }
    gap_sum += *ab - *ac;
    report.rows.push_back(std::move(row));
  }
  const double n = static_cast<double>(triples.size());
  report.b_preference = static_cast<double>(b) / n;
  report.c_preference = static_cast<double>(c) / n;
  report.tie_fraction = static_cast<double>(ties) / n;
  report.mean_gap = gap_sum / n;
  return report;
}

// ---------------------------------------------------------------------------
// Triple TSV: id <TAB> A <TAB> B <TAB> C <TAB> lex_ab <TAB> lex_ac
// ---------------------------------------------------------------------------

inline void write_triples_tsv(const std::string& path,
                              const std::vector<AdversarialTriple>& triples) {
  std::ofstream out = open_output(path);
  out << "id\tA\tB\tC\tlex_ab\tlex_ac\n";
  for (const AdversarialTriple& t : triples) {
    out << t.id << '\t' << join(t.a_tokens, " ") << '\t' << join(t.b_tokens, " ")
        << '\t' << join(t.c_tokens, " ") << '\t' << format_double(t.lex_ab)
        << '\t' << format_double(t.lex_ac) << '\n';
  }
}

/// Reads triples back and re-validates that the stored overlap values match
/// lex_score recomputed from the stored tokens.
inline std::vector<AdversarialTriple> read_triples_tsv(const std::string& path) {
  std::vector<AdversarialTriple> triples;
  bool past_header = false;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::vector<std::string> cells = split(line, '\t');
    if (!past_header) {
      past_header = true;
      if (detail::is_header(cells)) continue;
    }
    if (cells.size() != 6)
      fail_data(path, ":", line_no, ": expected 6 tab-separated columns, got ",
                cells.size());
    AdversarialTriple t;
    t.id = trim(cells[0]);
    t.a_tokens = split_ws(cells[1]);
    t.b_tokens = split_ws(cells[2]);
    t.c_tokens = split_ws(cells[3]);
    if (t.a_tokens.empty() || t.b_tokens.empty() || t.c_tokens.empty())
      fail_data(path, ":", line_no, ": empty sentence in triple '", t.id, "'");
    auto ab = parse_double(trim(cells[4]));
    auto ac = parse_double(trim(cells[5]));
    if (!ab || !ac)
      fail_data(path, ":", line_no, ": non-numeric overlap value");
    t.lex_ab = *ab;
    t.lex_ac = *ac;
    if (std::abs(t.lex_ab - lex_score(t.b_tokens, t.a_tokens)) > 1e-9 ||
        std::abs(t.lex_ac - lex_score(t.c_tokens, t.a_tokens)) > 1e-9)
      fail_data(path, ":", line_no, ": stored overlap for '", t.id,
                "' does not match the stored tokens");
    triples.push_back(std::move(t));
  }
  return triples;
}

// ---------------------------------------------------------------------------
// Raw adversarial input files
// ---------------------------------------------------------------------------

/// Freitag-style input: id <TAB> A <TAB> B <TAB> POS tags of A.
inline std::vector<FreitagAnchor> load_freitag_anchors(const std::string& path) {
  std::vector<FreitagAnchor> anchors;
  std::unordered_set<std::string> seen;
  bool past_header = false;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::vector<std::string> cells = split(line, '\t');
    if (!past_header) {
      past_header = true;
      if (detail::is_header(cells)) continue;
    }
    if (cells.size() != 4)
      fail_data(path, ":", line_no, ": expected 4 tab-separated columns, got ",
                cells.size());
    FreitagAnchor a;
    a.id = trim(cells[0]);
    if (!seen.insert(a.id).second)
      fail_data(path, ":", line_no, ": duplicate anchor id '", a.id, "'");
    a.a_tokens = split_ws(cells[1]);
    a.b_tokens = split_ws(cells[2]);
    a.a_pos_tags = split_ws(cells[3]);
    if (a.a_tokens.empty() || a.b_tokens.empty())
      fail_data(path, ":", line_no, ": empty sentence for id '", a.id, "'");
    if (a.a_tokens.size() != a.a_pos_tags.size())
      fail_data(path, ":", line_no, ": ", a.a_tokens.size(), " tokens but ",
                a.a_pos_tags.size(), " POS tags for id '", a.id, "'");
    anchors.push_back(std::move(a));
  }
  return anchors;
}

/// Selection-style input: id <TAB> A <TAB> candidate <TAB> label, where
/// label 1 marks a paraphrase and 0 a non-paraphrase. Rows sharing an id
/// contribute candidates to the same anchor and must repeat A verbatim.
inline std::vector<PawsAnchor> load_paws_anchors(const std::string& path) {
  std::vector<PawsAnchor> anchors;
  std::unordered_map<std::string, std::size_t> index;
  bool past_header = false;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::vector<std::string> cells = split(line, '\t');
    if (!past_header) {
      past_header = true;
      if (detail::is_header(cells)) continue;
    }
    if (cells.size() != 4)
      fail_data(path, ":", line_no, ": expected 4 tab-separated columns, got ",
                cells.size());
    const std::string id = trim(cells[0]);
    std::vector<std::string> a_tokens = split_ws(cells[1]);
    PawsAnchor::Candidate cand;
    cand.tokens = split_ws(cells[2]);
    const std::string label = trim(cells[3]);
    if (label == "1")
      cand.is_paraphrase = true;
    else if (label == "0")
      cand.is_paraphrase = false;
    else
      fail_data(path, ":", line_no, ": label must be 0 or 1, got '", label, "'");
    if (a_tokens.empty() || cand.tokens.empty())
      fail_data(path, ":", line_no, ": empty sentence for id '", id, "'");

    auto [it, fresh] = index.try_emplace(id, anchors.size());
    if (fresh) {
      PawsAnchor a;
      a.id = id;
      a.a_tokens = std::move(a_tokens);
      anchors.push_back(std::move(a));
    } else if (anchors[it->second].a_tokens != a_tokens) {
      fail_data(path, ":", line_no, ": anchor sentence for id '", id,
                "' differs between rows");
    }
    anchors[index[id]].candidates.push_back(std::move(cand));
  }
  return anchors;
}

}  // namespace metriclens
