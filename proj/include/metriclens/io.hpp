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

#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

// ---------------------------------------------------------------------------
// Low-level file helpers
// ---------------------------------------------------------------------------

/// Reads a whole text file as lines, stripping trailing '\r'.
inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_data("cannot open file: ", path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

inline std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_data("cannot write file: ", path);
  return out;
}

namespace detail {

/// True for lines that TSV readers skip: blank or '#'-prefixed comments.
inline bool skip_line(const std::string& line) {
  return line.empty() || line[0] == '#';
}

/// True when `cells` looks like a header row whose first column is "id".
inline bool is_header(const std::vector<std::string>& cells) {
  return !cells.empty() && cells[0] == "id";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Pair dataset TSV: id <TAB> x <TAB> y <TAB> sem?
// ---------------------------------------------------------------------------

inline std::vector<SentencePair> load_pair_dataset(
    const std::string& path, const std::string& format = "tsv",
    const std::string& lang_x = "en", const std::string& lang_y = "en") {
  if (format != "tsv")
    fail_config("unsupported pair dataset format '", format, "' (expected tsv)");
  std::vector<SentencePair> pairs;
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
    if (cells.size() < 3 || cells.size() > 4)
      fail_data(path, ":", line_no, ": expected 3 or 4 tab-separated columns, got ",
                cells.size());
    SentencePair p;
    p.id = trim(cells[0]);
    p.lang_x = lang_x;
    p.lang_y = lang_y;
    if (p.id.empty()) fail_data(path, ":", line_no, ": empty pair id");
    if (!seen.insert(p.id).second)
      fail_data(path, ":", line_no, ": duplicate pair id '", p.id, "'");
    p.x_tokens = split_ws(cells[1]);
    p.y_tokens = split_ws(cells[2]);
    if (p.x_tokens.empty())
      fail_data(path, ":", line_no, ": empty x sentence for id '", p.id, "'");
    if (p.y_tokens.empty())
      fail_data(path, ":", line_no, ": empty y sentence for id '", p.id, "'");
    if (cells.size() == 4 && !trim(cells[3]).empty()) {
      std::optional<double> sem = parse_double(trim(cells[3]));
      if (!sem)
        fail_data(path, ":", line_no, ": non-numeric sem score '", cells[3],
                  "' for id '", p.id, "'");
      p.sem = *sem;
    }
    pairs.push_back(std::move(p));
  }
  if (pairs.empty()) fail_data(path, ": no sentence pairs found");
  return pairs;
}

// ---------------------------------------------------------------------------
// CoNLL-U
// ---------------------------------------------------------------------------

/// One CoNLL-U sentence: surface forms, per-token feature bundles (empty
/// string when FEATS is "_"), and the dependency tree. Only the ID, FORM,
/// HEAD and FEATS columns are consumed.
struct ConlluSentence {
  std::string sent_id;  // from "# sent_id = ..." when present, else ""
  std::vector<std::string> forms;
  std::vector<std::string> feats;
  DependencyTree tree;
};

inline std::vector<ConlluSentence> load_conllu(const std::string& path) {
  std::vector<ConlluSentence> sentences;

  std::string sent_id;
  std::vector<std::string> forms, feats;
  std::vector<long long> heads;  // 0 = root, 1-based otherwise

  auto flush = [&](std::size_t sentence_index) {
    if (forms.empty()) {
      sent_id.clear();
      return;
    }
    const std::string context =
        detail::concat(path, ": sentence ", sentence_index,
                       sent_id.empty() ? "" : " (" + sent_id + ")");
    std::vector<std::size_t> parents(forms.size());
    for (std::size_t i = 0; i < heads.size(); ++i) {
      if (heads[i] == 0) {
        parents[i] = DependencyTree::kNoParent;
      } else if (heads[i] < 0 ||
                 static_cast<std::size_t>(heads[i]) > forms.size()) {
        fail_data(context, ": token ", i + 1, " references nonexistent head ",
                  heads[i]);
      } else {
        parents[i] = static_cast<std::size_t>(heads[i]) - 1;
      }
    }
    ConlluSentence s;
    s.sent_id = sent_id;
    s.tree = DependencyTree::from_parents(parents, context);
    s.forms = std::move(forms);
    s.feats = std::move(feats);
    sentences.push_back(std::move(s));
    forms.clear();
    feats.clear();
    heads.clear();
    sent_id.clear();
  };

  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (line.empty()) {
      flush(sentences.size() + 1);
      continue;
    }
    if (line[0] == '#') {
      std::string body = trim(line.substr(1));
      constexpr std::string_view kSentId = "sent_id";
      if (body.size() > kSentId.size() &&
          std::string_view(body).substr(0, kSentId.size()) == kSentId) {
        std::string rest = trim(body.substr(kSentId.size()));
        if (!rest.empty() && rest[0] == '=') sent_id = trim(rest.substr(1));
      }
      continue;
    }
    std::vector<std::string> cols = split(line, '\t');
    if (cols.size() < 10)
      fail_data(path, ":", line_no, ": expected 10 tab-separated columns, got ",
                cols.size());
    // Skip multiword-token ranges ("1-2") and empty nodes ("1.1").
    if (cols[0].find('-') != std::string::npos ||
        cols[0].find('.') != std::string::npos)
      continue;
    std::optional<long long> tok_id = parse_int(cols[0]);
    if (!tok_id || *tok_id <= 0)
      fail_data(path, ":", line_no, ": bad token id '", cols[0], "'");
    if (static_cast<std::size_t>(*tok_id) != forms.size() + 1)
      fail_data(path, ":", line_no, ": token ids not consecutive (got ",
                *tok_id, ", expected ", forms.size() + 1, ")");
    std::optional<long long> head = parse_int(cols[6]);
    if (!head || *head < 0)
      fail_data(path, ":", line_no, ": bad HEAD value '", cols[6], "'");
    forms.push_back(cols[1]);
    feats.push_back(cols[5] == "_" ? std::string() : cols[5]);
    heads.push_back(*head);
  }
  flush(sentences.size() + 1);
  return sentences;
}

/// Trees only, one per sentence block.
inline std::vector<DependencyTree> parse_conllu(const std::string& path) {
  std::vector<DependencyTree> trees;
  for (auto& s : load_conllu(path)) trees.push_back(std::move(s.tree));
  return trees;
}

/// Index of sentences by sent_id; sentences without one are skipped.
inline std::unordered_map<std::string, std::size_t> index_by_sent_id(
    const std::vector<ConlluSentence>& sentences, const std::string& path) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].sent_id.empty()) continue;
    if (!index.emplace(sentences[i].sent_id, i).second)
      fail_data(path, ": duplicate sent_id '", sentences[i].sent_id, "'");
  }
  return index;
}

// ---------------------------------------------------------------------------
// Embeddings (FastText .vec text layout)
// ---------------------------------------------------------------------------

inline EmbeddingTable load_embeddings(const std::string& path,
                                      std::size_t* duplicate_count = nullptr) {
  std::vector<std::string> lines = read_lines(path);
  EmbeddingTable table;
  std::size_t duplicates = 0;
  std::size_t start = 0;

  // Optional header "count dim": exactly two integer tokens.
  if (!lines.empty()) {
    std::vector<std::string> head = split_ws(lines[0]);
    if (head.size() == 2 && parse_int(head[0]) && parse_int(head[1])) {
      auto dim = parse_int(head[1]);
      if (*dim <= 0) fail_data(path, ":1: non-positive dimension in header");
      table.set_dimension(static_cast<std::size_t>(*dim));
      start = 1;
    }
  }

  for (std::size_t i = start; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    std::vector<std::string> toks = split_ws(lines[i]);
    if (toks.size() < 2)
      fail_data(path, ":", i + 1, ": expected a word followed by vector components");
    if (table.dimension() == 0) table.set_dimension(toks.size() - 1);
    if (toks.size() - 1 != table.dimension())
      fail_data(path, ":", i + 1, ": vector for '", toks[0], "' has ",
                toks.size() - 1, " components, expected ", table.dimension());
    std::vector<double> vec(table.dimension());
    for (std::size_t c = 0; c < table.dimension(); ++c) {
      std::optional<double> v = parse_double(toks[c + 1]);
      if (!v)
        fail_data(path, ":", i + 1, ": non-numeric component '", toks[c + 1], "'");
      vec[c] = *v;
    }
    if (!table.insert(toks[0], std::move(vec))) ++duplicates;
  }
  if (duplicate_count) *duplicate_count = duplicates;
  if (table.size() == 0) fail_data(path, ": no embedding vectors found");
  return table;
}

// ---------------------------------------------------------------------------
// Score tables: id <TAB> score
// ---------------------------------------------------------------------------

inline ScoreTable load_score_table(const std::string& path,
                                   const std::string& metric_name) {
  ScoreTable table(metric_name);
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
    if (cells.size() != 2)
      fail_data(path, ":", line_no, ": expected 2 tab-separated columns, got ",
                cells.size());
    std::optional<double> score = parse_double(trim(cells[1]));
    if (!score)
      fail_data(path, ":", line_no, ": non-numeric score '", cells[1], "'");
    try {
      table.add(trim(cells[0]), *score);
    } catch (const DataError& e) {
      fail_data(path, ":", line_no, ": ", e.what());
    }
  }
  return table;
}

inline void write_score_table_tsv(const std::string& path,
                                  const ScoreTable& table) {
  std::ofstream out = open_output(path);
  out << "id\tscore\n";
  for (std::size_t i = 0; i < table.size(); ++i)
    out << table.ids()[i] << '\t' << format_double(table.scores()[i]) << '\n';
}

// ---------------------------------------------------------------------------
// Tagged words: word <TAB> UD feature bundle
// ---------------------------------------------------------------------------

inline std::vector<std::pair<std::string, std::string>> load_tagged_words(
    const std::string& path) {
  std::vector<std::pair<std::string, std::string>> out;
  std::size_t line_no = 0;
  for (const std::string& line : read_lines(path)) {
    ++line_no;
    if (detail::skip_line(line)) continue;
    std::vector<std::string> cells = split(line, '\t');
    if (cells.size() != 2)
      fail_data(path, ":", line_no, ": expected 2 tab-separated columns, got ",
                cells.size());
    std::string word = trim(cells[0]);
    std::string bundle = trim(cells[1]);
    if (word.empty())
      fail_data(path, ":", line_no, ": empty word");
    if (bundle.empty() || bundle == "_") continue;  // untagged words carry no signal
    out.emplace_back(std::move(word), std::move(bundle));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Factor score files: id <TAB> factor <TAB> value
// ---------------------------------------------------------------------------

inline void write_factor_scores_tsv(
    const std::string& path, FactorKind kind,
    const std::vector<std::pair<std::string, double>>& values) {
  std::ofstream out = open_output(path);
  out << "id\tfactor\tvalue\n";
  for (const auto& [id, v] : values)
    out << id << '\t' << factor_name(kind) << '\t' << format_double(v) << '\n';
}

struct FactorScores {
  FactorKind kind;
  std::vector<std::pair<std::string, double>> values;
};

inline FactorScores read_factor_scores_tsv(const std::string& path) {
  std::optional<FactorKind> kind;
  std::vector<std::pair<std::string, double>> values;
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
    if (cells.size() != 3)
      fail_data(path, ":", line_no, ": expected 3 tab-separated columns, got ",
                cells.size());
    std::optional<FactorKind> k = factor_from_name(trim(cells[1]));
    if (!k)
      fail_data(path, ":", line_no, ": unknown factor '", cells[1], "'");
    if (kind && *kind != *k)
      fail_data(path, ":", line_no, ": mixed factors in one file (",
                factor_name(*kind), " vs ", factor_name(*k), ")");
    kind = *k;
    std::optional<double> v = parse_double(trim(cells[2]));
    if (!v)
      fail_data(path, ":", line_no, ": non-numeric value '", cells[2], "'");
    std::string id = trim(cells[0]);
    if (!seen.insert(id).second)
      fail_data(path, ":", line_no, ": duplicate id '", id, "'");
    values.emplace_back(std::move(id), *v);
  }
  if (!kind) fail_data(path, ": no factor rows found");
  return FactorScores{*kind, std::move(values)};
}

// ---------------------------------------------------------------------------
// join_factors
// ---------------------------------------------------------------------------

/// One factor column offered to the join; ids absent from `values` cause the
/// affected row to be dropped (and reported), not imputed.
struct FactorColumn {
  FactorKind kind;
  std::unordered_map<std::string, double> values;
};

/// Inner join on pair id, in the order of `pair_ids`. Rows missing any
/// active factor or the target are dropped and recorded on the result.
inline FactorTable join_factors(const std::vector<std::string>& pair_ids,
                                const std::vector<FactorColumn>& factors,
                                const ScoreTable& target) {
  std::vector<FactorKind> kinds;
  kinds.reserve(factors.size());
  for (const auto& f : factors) kinds.push_back(f.kind);
  FactorTable table(kinds, target.metric_name());

  std::vector<double> row(factors.size());
  for (const std::string& id : pair_ids) {
    bool complete = true;
    for (std::size_t c = 0; c < factors.size() && complete; ++c) {
      auto it = factors[c].values.find(id);
      if (it == factors[c].values.end())
        complete = false;
      else
        row[c] = it->second;
    }
    std::optional<double> t = target.find(id);
    if (!t) complete = false;
    if (!complete) {
      table.record_dropped(id);
      continue;
    }
    table.add_row(id, row, *t);
  }
  if (table.n_rows() == 0)
    fail_data("join produced no rows: no pair id has every active factor and a '",
              target.metric_name(), "' score");
  return table;
}

// ---------------------------------------------------------------------------
// FactorTable TSV round-trip
// ---------------------------------------------------------------------------

inline void write_factor_table_tsv(const std::string& path,
                                   const FactorTable& table) {
  std::ofstream out = open_output(path);
  out << "id";
  for (FactorKind k : table.factors()) out << '\t' << factor_name(k);
  out << '\t' << table.target_name() << '\n';
  for (std::size_t r = 0; r < table.n_rows(); ++r) {
    out << table.ids()[r];
    for (std::size_t c = 0; c < table.n_factors(); ++c)
      out << '\t' << format_double(table.column(c)[r]);
    out << '\t' << format_double(table.target()[r]) << '\n';
  }
}

inline FactorTable read_factor_table_tsv(const std::string& path) {
  std::vector<std::string> lines = read_lines(path);
  std::size_t first = 0;
  while (first < lines.size() && detail::skip_line(lines[first])) ++first;
  if (first == lines.size()) fail_data(path, ": missing header row");
  std::vector<std::string> header = split(lines[first], '\t');
  if (header.size() < 3 || header[0] != "id")
    fail_data(path, ": header must be id, factor columns, target");

  std::vector<FactorKind> kinds;
  for (std::size_t c = 1; c + 1 < header.size(); ++c) {
    std::optional<FactorKind> k = factor_from_name(header[c]);
    if (!k) fail_data(path, ": unknown factor column '", header[c], "'");
    kinds.push_back(*k);
  }
  FactorTable table(kinds, header.back());

  for (std::size_t i = first + 1; i < lines.size(); ++i) {
    if (detail::skip_line(lines[i])) continue;
    std::vector<std::string> cells = split(lines[i], '\t');
    if (cells.size() != header.size())
      fail_data(path, ":", i + 1, ": expected ", header.size(), " columns, got ",
                cells.size());
    std::vector<double> row(kinds.size());
    for (std::size_t c = 0; c < kinds.size(); ++c) {
      std::optional<double> v = parse_double(cells[c + 1]);
      if (!v) fail_data(path, ":", i + 1, ": non-numeric value '", cells[c + 1], "'");
      row[c] = *v;
    }
    std::optional<double> t = parse_double(cells.back());
    if (!t) fail_data(path, ":", i + 1, ": non-numeric target '", cells.back(), "'");
    table.add_row(cells[0], row, *t);
  }
  return table;
}

}  // namespace metriclens
