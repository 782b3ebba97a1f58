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
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/regression.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

/// Sample Pearson correlation coefficient.
inline double pearson(const std::vector<double>& xs,
                      const std::vector<double>& ys) {
  if (xs.size() != ys.size())
    fail_data("pearson: length mismatch (", xs.size(), " vs ", ys.size(), ")");
  if (xs.size() < 3)
    fail_data("pearson: need at least 3 observations, got ", xs.size());
  const double mx = mean_of(xs), my = mean_of(ys);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) fail_data("pearson: first argument is constant");
  if (syy == 0.0) fail_data("pearson: second argument is constant");
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

namespace detail {

/// Ids common to all tables, ordered by the first table for determinism.
inline std::vector<std::string> id_intersection(
    const std::vector<const ScoreTable*>& tables) {
  std::vector<std::string> ids;
  for (const std::string& id : tables.front()->ids()) {
    bool everywhere = true;
    for (std::size_t t = 1; t < tables.size() && everywhere; ++t)
      everywhere = tables[t]->contains(id);
    if (everywhere) ids.push_back(id);
  }
  return ids;
}

inline std::vector<double> column_for(const ScoreTable& table,
                                      const std::vector<std::string>& ids) {
  std::vector<double> col;
  col.reserve(ids.size());
  for (const std::string& id : ids) col.push_back(*table.find(id));
  return col;
}

}  // namespace detail

/// Averages member metrics per pair id over the id intersection. With
/// `normalize_first` each member column is z-normalized over the
/// intersection before averaging, so members on different scales carry
/// equal weight; without it the raw scores are averaged.
inline ScoreTable average_metrics(const std::vector<const ScoreTable*>& tables,
                                  bool normalize_first = true) {
  if (tables.size() < 2)
    fail_data("average_metrics: need at least 2 member tables");
  const std::vector<std::string> ids = detail::id_intersection(tables);
  if (ids.empty())
    fail_data("average_metrics: member tables share no pair ids");

  std::vector<std::vector<double>> columns;
  std::vector<std::string> names;
  for (const ScoreTable* t : tables) {
    std::vector<double> col = detail::column_for(*t, ids);
    if (normalize_first) col = z_normalize(col, t->metric_name());
    columns.push_back(std::move(col));
    names.push_back(t->metric_name());
  }

  ScoreTable out("avg(" + join(names, "+") + ")");
  const double inv = 1.0 / static_cast<double>(columns.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double sum = 0.0;
    for (const auto& col : columns) sum += col[i];
    out.add(ids[i], sum * inv);
  }
  return out;
}

struct EnsembleReport {
  std::vector<std::string> members;
  std::vector<double> member_r;   // aligned with members
  double ensemble_r = 0.0;
  double best_member_r = 0.0;
  std::string best_member;
  double improvement_pct = 0.0;   // (ensemble_r - best_member_r) / |best_member_r| * 100
  std::size_t n = 0;              // pairs evaluated
};

/// Evaluates one combo: segment-level Pearson of each member and of their
/// average against the human scores, over the ids all tables share.
/// Member correlations are computed on exactly the columns that enter the
/// average (normalized when `normalize_first`), which Pearson is invariant
/// to; this keeps a metric ensembled with itself at an improvement of
/// exactly 0.
inline EnsembleReport evaluate_ensemble(
    const std::vector<const ScoreTable*>& members, const ScoreTable& human,
    bool normalize_first = true) {
  if (members.size() < 2)
    fail_data("evaluate_ensemble: a combo needs at least 2 members");
  std::vector<const ScoreTable*> all = members;
  all.push_back(&human);
  const std::vector<std::string> ids = detail::id_intersection(all);
  if (ids.size() < 3)
    fail_data("evaluate_ensemble: only ", ids.size(),
              " pair ids shared by all members and the human scores (need 3)");

  const std::vector<double> h = detail::column_for(human, ids);

  EnsembleReport report;
  report.n = ids.size();
  std::vector<std::vector<double>> columns;
  for (const ScoreTable* m : members) {
    std::vector<double> col = detail::column_for(*m, ids);
    if (normalize_first) col = z_normalize(col, m->metric_name());
    const double r = pearson(col, h);
    report.members.push_back(m->metric_name());
    report.member_r.push_back(r);
    if (report.best_member.empty() || r > report.best_member_r) {
      report.best_member = m->metric_name();
      report.best_member_r = r;
    }
    columns.push_back(std::move(col));
  }

  std::vector<double> ensemble(ids.size(), 0.0);
  const double inv = 1.0 / static_cast<double>(columns.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    double sum = 0.0;
    for (const auto& col : columns) sum += col[i];
    ensemble[i] = sum * inv;
  }
  report.ensemble_r = pearson(ensemble, h);
  report.improvement_pct = (report.ensemble_r - report.best_member_r) /
                           std::abs(report.best_member_r) * 100.0;
  return report;
}

/// One report per combo. Combo members are metric names resolved against
/// `members`; unknown names are an error.
inline std::vector<EnsembleReport> evaluate_ensembles(
    const std::vector<ScoreTable>& members, const ScoreTable& human,
    const std::vector<std::vector<std::string>>& combos,
    bool normalize_first = true) {
  std::vector<EnsembleReport> reports;
  for (const std::vector<std::string>& combo : combos) {
    if (combo.size() < 2)
      fail_config("ensemble combo needs at least 2 members, got ", combo.size());
    std::vector<const ScoreTable*> tables;
    for (const std::string& name : combo) {
      const ScoreTable* found = nullptr;
      for (const ScoreTable& m : members)
        if (m.metric_name() == name) {
          found = &m;
          break;
        }
      if (!found) fail_config("unknown ensemble member '", name, "'");
      tables.push_back(found);
    }
    reports.push_back(evaluate_ensemble(tables, human, normalize_first));
  }
  return reports;
}

}  // namespace metriclens
