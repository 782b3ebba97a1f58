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

#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "json.hpp"
#include "metriclens/adversarial.hpp"
#include "metriclens/config.hpp"
#include "metriclens/ensemble.hpp"
#include "metriclens/error.hpp"
#include "metriclens/factors.hpp"
#include "metriclens/io.hpp"
#include "metriclens/lexical.hpp"
#include "metriclens/morphology.hpp"
#include "metriclens/regression.hpp"
#include "metriclens/tree_edit.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

using ordered_json = nlohmann::ordered_json;

namespace detail {

inline void require_input(const std::string& path, const std::string& what) {
  if (path.empty()) fail_config(what, " is not configured");
  if (!std::filesystem::exists(path))
    fail_config(what, " file not found: ", path);
}

inline bool factor_active(const RunConfig& cfg, FactorKind kind) {
  for (FactorKind k : cfg.active_factors)
    if (k == kind) return true;
  return false;
}

inline std::vector<std::string> fold_tokens(const std::vector<std::string>& tokens,
                                            bool casefold) {
  if (!casefold) return tokens;
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const std::string& t : tokens) out.push_back(lower_ascii(t));
  return out;
}

inline void write_json(const std::string& path, const ordered_json& j) {
  std::ofstream out = open_output(path);
  out << j.dump(2) << '\n';
}

inline ordered_json read_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_data("cannot open file: ", path);
  ordered_json j;
  try {
    j = ordered_json::parse(in);
  } catch (const std::exception& e) {
    fail_data(path, ": invalid JSON: ", e.what());
  }
  return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// factors
// ---------------------------------------------------------------------------

/// Computes every active factor for every pair and writes one TSV per
/// factor plus a manifest under <out>/factors/. Pairs that cannot be
/// scored for a factor (no human score, no parse, out-of-vocabulary
/// sentence, no parallel score) are skipped for that factor and listed in
/// the manifest; the regression join later drops incomplete rows.
inline void run_factors(const RunConfig& cfg) {
  // -- validate the full configuration before doing any work
  if (cfg.active_factors.empty())
    fail_config("factors.active must list at least one factor");
  detail::require_input(cfg.pairs, "paths.pairs");
  if (detail::factor_active(cfg, FactorKind::SYN)) {
    detail::require_input(cfg.parses_x, "paths.parses_x");
    detail::require_input(cfg.parses_y, "paths.parses_y");
  }
  if (detail::factor_active(cfg, FactorKind::MOR)) {
    detail::require_input(cfg.embeddings, "paths.embeddings");
    detail::require_input(cfg.tagged_words, "paths.tagged_words");
    if (!cfg.tagged_words_y.empty())
      detail::require_input(cfg.tagged_words_y, "paths.tagged_words_y");
  }
  if (detail::factor_active(cfg, FactorKind::CLB))
    detail::require_input(cfg.parallel_scores, "paths.parallel_scores");

  // -- load inputs and compute all columns (no output is touched yet)
  const std::vector<SentencePair> pairs =
      load_pair_dataset(cfg.pairs, "tsv", cfg.lang_x, cfg.lang_y);

  struct EmittedFactor {
    FactorKind kind;
    std::vector<std::pair<std::string, double>> values;
    std::vector<std::string> skipped_ids;
  };
  std::vector<EmittedFactor> emitted;
  ordered_json deactivated = ordered_json::object();

  for (FactorKind kind : all_factor_kinds()) {
    if (!detail::factor_active(cfg, kind)) continue;
    EmittedFactor out;
    out.kind = kind;

    switch (kind) {
      case FactorKind::SEM: {
        for (const SentencePair& p : pairs) {
          if (p.sem)
            out.values.emplace_back(p.id, sem_score(p));
          else
            out.skipped_ids.push_back(p.id);
        }
        break;
      }
      case FactorKind::SYN: {
        const std::vector<ConlluSentence> xs = load_conllu(cfg.parses_x);
        const std::vector<ConlluSentence> ys = load_conllu(cfg.parses_y);
        const auto xi = index_by_sent_id(xs, cfg.parses_x);
        const auto yi = index_by_sent_id(ys, cfg.parses_y);
        for (const SentencePair& p : pairs) {
          auto ix = xi.find(p.id);
          auto iy = yi.find(p.id);
          if (ix == xi.end() || iy == yi.end()) {
            out.skipped_ids.push_back(p.id);
            continue;
          }
          out.values.emplace_back(
              p.id, syn_score(xs[ix->second].tree, ys[iy->second].tree));
        }
        break;
      }
      case FactorKind::LEX: {
        for (const SentencePair& p : pairs) {
          out.values.emplace_back(
              p.id, lex_pair_score(detail::fold_tokens(p.x_tokens, cfg.casefold),
                                   detail::fold_tokens(p.y_tokens, cfg.casefold),
                                   cfg.lex_direction, cfg.brevity_penalty));
        }
        break;
      }
      case FactorKind::MOR: {
        std::vector<std::pair<std::string, std::string>> tagged =
            load_tagged_words(cfg.tagged_words);
        std::vector<std::pair<std::string, std::string>> tagged_y;
        if (!cfg.tagged_words_y.empty()) tagged_y = load_tagged_words(cfg.tagged_words_y);
        if (cfg.casefold) {
          for (auto& [w, b] : tagged) w = lower_ascii(w);
          for (auto& [w, b] : tagged_y) w = lower_ascii(w);
        }
        if (cfg.lang_x != cfg.lang_y) {
          MorGate gate = mor_cross_lingual_gate(tagged, tagged_y,
                                                cfg.mor_overlap_threshold);
          if (!gate.active) {
            deactivated["MOR"] = gate.reason;
            continue;  // factor not emitted at all
          }
        }
        tagged.insert(tagged.end(), tagged_y.begin(), tagged_y.end());
        const EmbeddingTable base = load_embeddings(cfg.embeddings);
        const MorphLexicon lexicon =
            build_morph_lexicon(tagged, cfg.lexicon_pair_cap, cfg.seed);
        const EmbeddingTable retro =
            retrofit_embeddings(base, lexicon, cfg.retrofit_iterations);
        for (const SentencePair& p : pairs) {
          try {
            out.values.emplace_back(
                p.id, mor_score(detail::fold_tokens(p.x_tokens, cfg.casefold),
                                detail::fold_tokens(p.y_tokens, cfg.casefold),
                                retro));
          } catch (const DataError&) {
            out.skipped_ids.push_back(p.id);  // whole sentence out of vocabulary
          }
        }
        break;
      }
      case FactorKind::CLB: {
        const ScoreTable parallel = load_score_table(cfg.parallel_scores, "CLB");
        const std::unordered_map<std::string, double> clb = clb_scores(parallel);
        for (const SentencePair& p : pairs) {
          auto it = clb.find(p.id);
          if (it == clb.end())
            out.skipped_ids.push_back(p.id);
          else
            out.values.emplace_back(p.id, it->second);
        }
        break;
      }
    }
    emitted.push_back(std::move(out));
  }

  // -- write outputs
  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / "factors";
  std::filesystem::create_directories(dir);

  ordered_json manifest;
  manifest["command"] = "factors";
  manifest["seed"] = cfg.seed;
  ordered_json pair_ids = ordered_json::array();
  for (const SentencePair& p : pairs) pair_ids.push_back(p.id);
  manifest["pairs"] = std::move(pair_ids);
  manifest["options"] = {
      {"casefold", cfg.casefold},
      {"lex_direction", cfg.lex_direction == LexDirection::kHypAgainstRef
                            ? "hyp_vs_ref"
                            : cfg.lex_direction == LexDirection::kRefAgainstHyp
                                  ? "ref_vs_hyp"
                                  : "symmetric"},
      {"brevity_penalty", cfg.brevity_penalty},
      {"retrofit_iterations", cfg.retrofit_iterations},
      {"lexicon_pair_cap", cfg.lexicon_pair_cap},
  };
  ordered_json factors = ordered_json::object();
  for (const auto& f : emitted) {
    const std::string file = std::string(factor_name(f.kind)) + ".tsv";
    write_factor_scores_tsv((dir / file).string(), f.kind, f.values);
    ordered_json entry;
    entry["file"] = file;
    entry["rows"] = f.values.size();
    entry["skipped_ids"] = f.skipped_ids;
    factors[factor_name(f.kind)] = std::move(entry);
  }
  manifest["factors"] = std::move(factors);
  if (!deactivated.empty()) manifest["deactivated"] = std::move(deactivated);
  detail::write_json((dir / "manifest.json").string(), manifest);
}

// ---------------------------------------------------------------------------
// regress
// ---------------------------------------------------------------------------

namespace detail {

inline ordered_json fit_report_json(const RegressionFit& fit) {
  ordered_json j;
  j["metric"] = fit.metric;
  j["n"] = fit.n_rows;
  j["dropped"] = fit.dropped_rows;
  ordered_json coeffs = ordered_json::object();
  for (std::size_t i : canonical_order(fit)) {
    ordered_json c;
    c["value"] = fit.coefficients[i];
    c["p"] = fit.p_values[i];
    c["significant"] = fit.p_values[i] < 0.05;
    coeffs[factor_name(fit.factors[i])] = std::move(c);
  }
  j["coefficients"] = std::move(coeffs);
  j["intercept"] = fit.intercept;
  j["r2"] = fit.r_squared;
  return j;
}

/// Joins, z-normalizes every column and the target, fits, and writes the
/// raw joined table plus both report renderings.
inline RegressionFit join_normalize_fit(
    const std::vector<std::string>& pair_ids,
    const std::vector<FactorColumn>& columns, const ScoreTable& target,
    const std::filesystem::path& dir, const std::string& suffix) {
  FactorTable table = join_factors(pair_ids, columns, target);
  write_factor_table_tsv((dir / ("factor_table" + suffix + ".tsv")).string(),
                         table);
  for (std::size_t c = 0; c < table.n_factors(); ++c) {
    table.column(c) =
        z_normalize(table.column(c), factor_name(table.factors()[c]));
    table.mark_normalized(c);
  }
  table.target() = z_normalize(table.target(), table.target_name());
  table.mark_target_normalized();

  RegressionFit fit = fit_ols(table);
  write_json((dir / ("fit_report" + suffix + ".json")).string(),
             fit_report_json(fit));
  std::ofstream tsv =
      open_output((dir / ("fit_report" + suffix + ".tsv")).string());
  tsv << fit_report_tsv(fit);
  return fit;
}

}  // namespace detail

/// Reads the factor files listed in the factors manifest, joins them with
/// the metric's scores, and fits the explanatory regression. When the CLB
/// factor was emitted, a second CLB-augmented fit is reported alongside
/// the base fit.
inline void run_regress(const RunConfig& cfg) {
  if (cfg.metric_name.empty()) fail_config("regress.metric is not configured");
  detail::require_input(cfg.metric_scores, "regress.scores");
  const std::filesystem::path fdir =
      std::filesystem::path(cfg.out_dir) / "factors";
  const std::string manifest_path = (fdir / "manifest.json").string();
  if (!std::filesystem::exists(manifest_path))
    fail_config("factor manifest not found: ", manifest_path,
                " (run the factors command first)");

  const ordered_json manifest = detail::read_json(manifest_path);
  if (!manifest.contains("pairs") || !manifest.contains("factors"))
    fail_data(manifest_path, ": not a factors manifest");
  std::vector<std::string> pair_ids;
  for (const auto& id : manifest["pairs"]) pair_ids.push_back(id.get<std::string>());

  std::vector<FactorColumn> base_columns;
  std::optional<FactorColumn> clb_column;
  for (const auto& [name, entry] : manifest["factors"].items()) {
    FactorScores scores =
        read_factor_scores_tsv((fdir / entry["file"].get<std::string>()).string());
    if (std::string(factor_name(scores.kind)) != name)
      fail_data(manifest_path, ": factor file mismatch for ", name);
    FactorColumn col;
    col.kind = scores.kind;
    for (auto& [id, v] : scores.values) col.values.emplace(id, v);
    if (scores.kind == FactorKind::CLB)
      clb_column = std::move(col);
    else
      base_columns.push_back(std::move(col));
  }
  if (base_columns.empty())
    fail_config("no non-CLB factor files available; nothing to regress on");

  const ScoreTable target = load_score_table(cfg.metric_scores, cfg.metric_name);

  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / "regress";
  std::filesystem::create_directories(dir);
  detail::join_normalize_fit(pair_ids, base_columns, target, dir, "");
  if (clb_column) {
    std::vector<FactorColumn> with_clb = base_columns;
    with_clb.push_back(*clb_column);
    detail::join_normalize_fit(pair_ids, with_clb, target, dir, "_clb");
  }
}

// ---------------------------------------------------------------------------
// adversarial
// ---------------------------------------------------------------------------

/// Builds (or loads) the (A, B, C) triples and, when score tables for
/// (A,B) and (A,C) are configured, evaluates the metric's preference.
inline void run_adversarial(const RunConfig& cfg) {
  const bool have_ab = !cfg.adv_scores_ab.empty();
  const bool have_ac = !cfg.adv_scores_ac.empty();
  if (have_ab != have_ac)
    fail_config("adversarial.scores_ab and adversarial.scores_ac must be "
                "configured together");
  const bool from_triples = !cfg.adv_triples.empty();
  if (!from_triples && cfg.adv_mode.empty())
    fail_config("configure adversarial.mode with adversarial.input, or "
                "adversarial.triples");
  if (from_triples) {
    detail::require_input(cfg.adv_triples, "adversarial.triples");
  } else {
    if (cfg.adv_mode != "freitag" && cfg.adv_mode != "paws")
      fail_config("adversarial.mode must be freitag or paws, got '",
                  cfg.adv_mode, "'");
    detail::require_input(cfg.adv_input, "adversarial.input");
  }
  if (have_ab) {
    detail::require_input(cfg.adv_scores_ab, "adversarial.scores_ab");
    detail::require_input(cfg.adv_scores_ac, "adversarial.scores_ac");
  }

  TripleBuildStats stats;
  std::vector<AdversarialTriple> triples;
  if (from_triples) {
    triples = read_triples_tsv(cfg.adv_triples);
  } else if (cfg.adv_mode == "freitag") {
    triples = build_triples_freitag(load_freitag_anchors(cfg.adv_input),
                                    cfg.seed, &stats);
  } else {
    triples = build_triples_paws(load_paws_anchors(cfg.adv_input),
                                 cfg.adv_top_k, &stats);
  }
  if (triples.empty()) fail_data("no adversarial triples to evaluate");

  std::optional<PreferenceReport> prefs;
  if (have_ab) {
    ScoreTable ab = load_score_table(cfg.adv_scores_ab, cfg.adv_metric);
    ScoreTable ac = load_score_table(cfg.adv_scores_ac, cfg.adv_metric);
    prefs = evaluate_preferences(triples, ab, ac);
  }

  const std::filesystem::path dir =
      std::filesystem::path(cfg.out_dir) / "adversarial";
  std::filesystem::create_directories(dir);
  if (!from_triples) write_triples_tsv((dir / "triples.tsv").string(), triples);

  double mean_ab = 0.0, mean_ac = 0.0;
  for (const AdversarialTriple& t : triples) {
    mean_ab += t.lex_ab;
    mean_ac += t.lex_ac;
  }
  mean_ab /= static_cast<double>(triples.size());
  mean_ac /= static_cast<double>(triples.size());

  ordered_json report;
  report["command"] = "adversarial";
  report["mode"] = from_triples ? "triples" : cfg.adv_mode;
  report["n_triples"] = triples.size();
  report["mean_lex_ab"] = mean_ab;
  report["mean_lex_ac"] = mean_ac;
  report["skipped_anchors"] = stats.skipped_anchors;
  report["identity_permutations"] = stats.identity_permutations;
  report["evaluated"] = prefs.has_value();
  if (prefs) {
    report["metric"] = prefs->metric;
    report["b_preference"] = prefs->b_preference;
    report["c_preference"] = prefs->c_preference;
    report["tie_fraction"] = prefs->tie_fraction;
    report["mean_gap"] = prefs->mean_gap;

    std::ofstream tsv = open_output((dir / "preferences.tsv").string());
    tsv << "id\tscore_ab\tscore_ac\tpreference\n";
    for (const auto& row : prefs->rows)
      tsv << row.id << '\t' << format_double(row.score_ab) << '\t'
          << format_double(row.score_ac) << '\t' << row.preference << '\n';
  }
  detail::write_json((dir / "report.json").string(), report);
}

// ---------------------------------------------------------------------------
// ensemble
// ---------------------------------------------------------------------------

/// Averages member metrics per combo and reports the segment-level Pearson
/// correlation of each member and of the ensemble against human scores.
inline void run_ensemble(const RunConfig& cfg) {
  if (cfg.ensemble_members.size() < 2)
    fail_config("ensemble.members must list at least 2 members");
  if (cfg.ensemble_combos.empty())
    fail_config("ensemble.combos must list at least one combo");
  detail::require_input(cfg.ensemble_human, "ensemble.human");
  for (std::size_t i = 0; i < cfg.ensemble_members.size(); ++i) {
    detail::require_input(cfg.ensemble_members[i].second,
                          "ensemble member '" + cfg.ensemble_members[i].first + "'");
    for (std::size_t j = i + 1; j < cfg.ensemble_members.size(); ++j)
      if (cfg.ensemble_members[i].first == cfg.ensemble_members[j].first)
        fail_config("duplicate ensemble member name '",
                    cfg.ensemble_members[i].first, "'");
  }

  std::vector<ScoreTable> members;
  for (const auto& [name, path] : cfg.ensemble_members)
    members.push_back(load_score_table(path, name));
  const ScoreTable human = load_score_table(cfg.ensemble_human, "human");

  const std::vector<EnsembleReport> reports = evaluate_ensembles(
      members, human, cfg.ensemble_combos, cfg.ensemble_normalize);

  const std::filesystem::path dir = std::filesystem::path(cfg.out_dir) / "ensemble";
  std::filesystem::create_directories(dir);

  ordered_json j;
  j["command"] = "ensemble";
  j["normalize_first"] = cfg.ensemble_normalize;
  ordered_json combos = ordered_json::array();
  std::ofstream tsv = open_output((dir / "report.tsv").string());
  tsv << "combo\tn\tensemble_r\tbest_member\tbest_member_r\timprovement_pct\n";
  for (const EnsembleReport& r : reports) {
    ordered_json e;
    e["members"] = r.members;
    ordered_json per_member = ordered_json::array();
    for (std::size_t i = 0; i < r.members.size(); ++i)
      per_member.push_back({{"name", r.members[i]}, {"r", r.member_r[i]}});
    e["member_r"] = std::move(per_member);
    e["ensemble_r"] = r.ensemble_r;
    e["best_member"] = r.best_member;
    e["best_member_r"] = r.best_member_r;
    e["improvement_pct"] = r.improvement_pct;
    e["n"] = r.n;
    combos.push_back(std::move(e));

    tsv << join(r.members, "+") << '\t' << r.n << '\t'
        << format_double(r.ensemble_r) << '\t' << r.best_member << '\t'
        << format_double(r.best_member_r) << '\t'
        << format_double(r.improvement_pct) << '\n';
  }
  j["combos"] = std::move(combos);
  detail::write_json((dir / "report.json").string(), j);
}

}  // namespace metriclens
