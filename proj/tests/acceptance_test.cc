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
//
// Release gate for the toolkit: ten end-to-end acceptance criteria, each
// printing exactly one PASS/FAIL line. Numeric criteria are checked against
// independent brute-force oracles that share no code with the library.

#include <gtest/gtest.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <unordered_set>
#include <vector>

#include "metriclens/adversarial.hpp"
#include "metriclens/ensemble.hpp"
#include "metriclens/io.hpp"
#include "metriclens/lexical.hpp"
#include "metriclens/morphology.hpp"
#include "metriclens/random.hpp"
#include "metriclens/regression.hpp"
#include "metriclens/tree_edit.hpp"
#include "test_util.hpp"

namespace metriclens {
namespace {

namespace fs = std::filesystem;

/// Prints the one-line verdict for a criterion when the test body ends,
/// whether it ran to completion or bailed out on a failed assertion.
class Criterion {
 public:
  Criterion(int id, const char* title) : id_(id), title_(title) {}
  ~Criterion() {
    const bool ok = !::testing::Test::HasFailure();
    std::printf("acceptance %02d: %s  %s\n", id_, ok ? "PASS" : "FAIL", title_);
    std::fflush(stdout);
  }

 private:
  int id_;
  const char* title_;
};

std::string fixtures_dir() {
  return testing::env_or("METRICLENS_FIXTURES", "fixtures");
}

// --- oracle 1: tree edit distance by exhaustive mapping enumeration ---------
//
// With free relabels and unit insert/delete the distance is n1 + n2 - 2k,
// where k is the largest order- and ancestry-preserving mapping. Two node
// subsets admit such a mapping exactly when their induced forests (parent =
// nearest selected ancestor, siblings in original order) have equal shapes,
// so for tiny trees every subset can be enumerated and compared by a
// canonical parenthesis string.

constexpr std::size_t kNone = DependencyTree::kNoParent;

DependencyTree tree(const std::vector<std::size_t>& parents) {
  return DependencyTree::from_parents(parents, "acceptance tree");
}

DependencyTree random_dependency_tree(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::size_t> parents(n, kNone);
  for (std::size_t i = 1; i < n; ++i) parents[order[i]] = order[rng.below(i)];
  return tree(parents);
}

std::vector<std::size_t> preorder_ranks(const DependencyTree& t) {
  std::vector<std::size_t> rank(t.size());
  std::size_t next = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t u) {
    rank[u] = next++;
    for (std::size_t c : t.children(u)) visit(c);
  };
  visit(t.root());
  return rank;
}

std::string induced_shape(const DependencyTree& t,
                          const std::vector<std::size_t>& pre_rank,
                          unsigned mask) {
  const std::size_t n = t.size();
  std::vector<int> ipar(n, -1);
  std::vector<std::vector<std::size_t>> ichild(n);
  std::vector<std::size_t> members, roots;
  for (std::size_t u = 0; u < n; ++u)
    if (mask >> u & 1u) members.push_back(u);
  for (std::size_t u : members) {
    std::size_t p = t.parent(u);
    while (p != kNone && !(mask >> p & 1u)) p = t.parent(p);
    if (p == kNone)
      roots.push_back(u);
    else
      ipar[u] = static_cast<int>(p);
  }
  for (std::size_t u : members)
    if (ipar[u] >= 0) ichild[static_cast<std::size_t>(ipar[u])].push_back(u);
  auto by_rank = [&](std::size_t a, std::size_t b) {
    return pre_rank[a] < pre_rank[b];
  };
  std::sort(roots.begin(), roots.end(), by_rank);
  for (std::size_t u : members)
    std::sort(ichild[u].begin(), ichild[u].end(), by_rank);

  std::string out;
  std::function<void(std::size_t)> serialize = [&](std::size_t u) {
    out += '(';
    for (std::size_t c : ichild[u]) serialize(c);
    out += ')';
  };
  for (std::size_t r : roots) serialize(r);
  return out;
}

std::size_t oracle_ted(const DependencyTree& t1, const DependencyTree& t2) {
  const std::size_t n1 = t1.size(), n2 = t2.size();
  const auto r1 = preorder_ranks(t1), r2 = preorder_ranks(t2);
  std::unordered_set<std::string> shapes1;
  for (unsigned mask = 0; mask < (1u << n1); ++mask)
    shapes1.insert(induced_shape(t1, r1, mask));
  std::size_t best = 0;  // the empty mapping is always admissible
  for (unsigned mask = 0; mask < (1u << n2); ++mask) {
    const std::size_t k = static_cast<std::size_t>(__builtin_popcount(mask));
    if (k > best && shapes1.count(induced_shape(t2, r2, mask))) best = k;
  }
  return n1 + n2 - 2 * best;
}

// --- oracle 2: clipped precision by greedy one-to-one token matching --------

double oracle_clipped_precision(const std::vector<std::string>& cand,
                                const std::vector<std::string>& ref) {
  std::vector<bool> used(ref.size(), false);
  std::size_t credit = 0;
  for (const std::string& c : cand) {
    for (std::size_t j = 0; j < ref.size(); ++j) {
      if (!used[j] && ref[j] == c) {
        used[j] = true;
        ++credit;
        break;
      }
    }
  }
  return static_cast<double>(credit) / static_cast<double>(cand.size());
}

// --- oracle 3: least squares by Gauss-Jordan on the normal equations --------

std::vector<double> oracle_ols(const std::vector<std::vector<double>>& rows,
                               const std::vector<double>& y) {
  const std::size_t n = rows.size();
  const std::size_t d = rows[0].size() + 1;  // + intercept
  std::vector<std::vector<double>> aug(d, std::vector<double>(d + 1, 0.0));
  for (std::size_t r = 0; r < n; ++r) {
    std::vector<double> x(d, 1.0);
    for (std::size_t c = 1; c < d; ++c) x[c] = rows[r][c - 1];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) aug[i][j] += x[i] * x[j];
      aug[i][d] += x[i] * y[r];
    }
  }
  for (std::size_t col = 0; col < d; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < d; ++r)
      if (std::fabs(aug[r][col]) > std::fabs(aug[pivot][col])) pivot = r;
    std::swap(aug[col], aug[pivot]);
    const double p = aug[col][col];
    for (std::size_t j = col; j <= d; ++j) aug[col][j] /= p;
    for (std::size_t r = 0; r < d; ++r) {
      if (r == col) continue;
      const double f = aug[r][col];
      for (std::size_t j = col; j <= d; ++j) aug[r][j] -= f * aug[col][j];
    }
  }
  std::vector<double> beta(d);
  for (std::size_t i = 0; i < d; ++i) beta[i] = aug[i][d];
  return beta;  // beta[0] is the intercept
}

FactorTable make_table(const std::vector<FactorKind>& kinds,
                       const std::vector<std::vector<double>>& rows,
                       const std::vector<double>& y) {
  FactorTable t(kinds, "metric");
  for (std::size_t r = 0; r < rows.size(); ++r)
    t.add_row("r" + std::to_string(r), rows[r], y[r]);
  return t;
}

// --- CLI helpers for the end-to-end criteria ---------------------------------

std::string cli_binary() { return testing::env_or("METRICLENS_BIN", ""); }

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + cli_binary() + "\" " + args + " >/dev/null 2>&1";
  return std::system(cmd.c_str());
}

/// Relative path -> bytes for every regular file under root.
std::map<std::string, std::string> snapshot_tree(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(root))
    if (entry.is_regular_file())
      out[fs::relative(entry.path(), root).string()] =
          testing::read_file(entry.path());
  return out;
}

// -----------------------------------------------------------------------------

TEST(Acceptance, C01TreeEditDistanceMatchesExhaustiveOracle) {
  Criterion verdict(
      1, "tree edit distance matches the exhaustive mapping oracle "
         "(500 random pairs)");
  const auto start = std::chrono::steady_clock::now();
  Rng rng(501);
  for (int i = 0; i < 500; ++i) {
    const DependencyTree a = random_dependency_tree(1 + rng.below(6), rng);
    const DependencyTree b = random_dependency_tree(1 + rng.below(6), rng);
    ASSERT_EQ(tree_edit_distance(a, b), oracle_ted(a, b))
        << "case " << i << ": sizes " << a.size() << " and " << b.size();
  }
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed.count(), 10.0);
}

TEST(Acceptance, C02WorkedSyntacticExamplesScoreExactly) {
  Criterion verdict(
      2, "both worked dependency examples give distance 2 and the documented "
         "syn scores");
  // "He knew very little about him" vs "he was very unknowable".
  const DependencyTree t1 = tree({1, kNone, 3, 1, 5, 1});
  const DependencyTree t2 = tree({3, 3, 3, kNone});
  EXPECT_EQ(tree_edit_distance(t1, t2), 2u);
  EXPECT_EQ(syn_score(t1, t2), 1.0 - 2.0 / (6.0 + 4.0));
  // "it is a great mother" vs "Sie ist eine großartige Mutter".
  const DependencyTree t3 = tree({4, 4, 4, 4, kNone});
  const DependencyTree t4 = tree({1, kNone, 4, 4, 1});
  EXPECT_EQ(tree_edit_distance(t3, t4), 2u);
  EXPECT_EQ(syn_score(t3, t4), 1.0 - 2.0 / (5.0 + 5.0));
}

TEST(Acceptance, C03ClippedPrecisionMatchesGreedyMatchingOracle) {
  Criterion verdict(
      3, "clipped unigram precision matches the greedy matching oracle "
         "(200 pairs, 1e-12)");
  static const std::vector<std::string> vocab = {"a", "b", "c", "d",
                                                 "e", "f", "g", "h"};
  Rng rng(503);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::string> cand(1 + rng.below(12)), ref(1 + rng.below(12));
    for (std::string& t : cand) t = vocab[rng.below(vocab.size())];
    for (std::string& t : ref) t = vocab[rng.below(vocab.size())];
    ASSERT_NEAR(lex_score(cand, ref), oracle_clipped_precision(cand, ref),
                1e-12)
        << "case " << i;
  }
}

TEST(Acceptance, C04RegressionRecoversPlantedCoefficients) {
  Criterion verdict(
      4, "least squares recovers planted coefficients (+-0.05), matches the "
         "Gauss-Jordan oracle (1e-8), and hits the analytic R2 (+-0.03) "
         "within 1 s");
  const std::vector<double> planted = {0.28, 0.15, 0.64, -0.06};
  const double sigma = 0.1;
  const std::size_t n = 1000;
  Rng rng(504);
  std::vector<std::vector<double>> rows(n, std::vector<double>(4));
  std::vector<double> y(n);
  for (std::size_t r = 0; r < n; ++r) {
    double signal = 0.0;
    for (std::size_t c = 0; c < 4; ++c) {
      rows[r][c] = rng.normal();
      signal += planted[c] * rows[r][c];
    }
    y[r] = signal + sigma * rng.normal();
  }

  const auto start = std::chrono::steady_clock::now();
  const RegressionFit fit = fit_ols(make_table(
      {FactorKind::SEM, FactorKind::SYN, FactorKind::LEX, FactorKind::MOR},
      rows, y));
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed.count(), 1.0);

  const std::vector<double> beta = oracle_ols(rows, y);
  EXPECT_NEAR(fit.intercept, beta[0], 1e-8);
  for (std::size_t c = 0; c < 4; ++c) {
    EXPECT_NEAR(fit.coefficients[c], planted[c], 0.05) << "factor " << c;
    EXPECT_NEAR(fit.coefficients[c], beta[c + 1], 1e-8) << "factor " << c;
  }
  // Unit-variance regressors: R2 = sum(b^2) / (sum(b^2) + sigma^2).
  double signal_var = 0.0;
  for (double b : planted) signal_var += b * b;
  const double expected_r2 = signal_var / (signal_var + sigma * sigma);
  EXPECT_NEAR(fit.r_squared, expected_r2, 0.03);
}

TEST(Acceptance, C05ZeroEffectFactorStaysInsignificant) {
  Criterion verdict(
      5, "a zero-effect factor gets p >= 0.05 in at least 90 of 100 trials");
  int insignificant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng rng(1000 + static_cast<std::uint64_t>(trial));
    const std::size_t n = 200;
    std::vector<std::vector<double>> rows(n, std::vector<double>(4));
    std::vector<double> y(n);
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t c = 0; c < 4; ++c) rows[r][c] = rng.normal();
      // MOR (column 3) has no effect on the target at all.
      y[r] = 0.3 * rows[r][0] + 0.2 * rows[r][1] + 0.5 * rows[r][2] +
             0.3 * rng.normal();
    }
    const RegressionFit fit = fit_ols(make_table(
        {FactorKind::SEM, FactorKind::SYN, FactorKind::LEX, FactorKind::MOR},
        rows, y));
    if (fit.p_values[3] >= 0.05) ++insignificant;
  }
  EXPECT_GE(insignificant, 90);
}

TEST(Acceptance, C06RetrofittingContractsTowardTheLexicon) {
  Criterion verdict(
      6, "retrofitting: non-increasing objective, exact two-word fixed "
         "point, identity without a lexicon");
  Rng rng(506);

  // (a) the quadratic objective never increases across ten sweeps.
  std::vector<std::string> words;
  std::vector<std::pair<std::string, std::string>> tagged;
  for (int i = 0; i < 50; ++i) {
    words.push_back("w" + std::to_string(i));
    tagged.emplace_back(words.back(), "Class=" + std::to_string(rng.below(6)));
  }
  EmbeddingTable base(8);
  for (const std::string& w : words) {
    std::vector<double> v(8);
    for (double& c : v) c = rng.normal();
    base.insert(w, std::move(v));
  }
  const MorphLexicon lex = build_morph_lexicon(tagged);
  ASSERT_GT(lex.pairs().size(), 0u);
  std::vector<double> trace;
  retrofit_embeddings(base, lex, 10, &trace);
  ASSERT_EQ(trace.size(), 10u);
  for (std::size_t i = 1; i < trace.size(); ++i)
    EXPECT_LE(trace[i], trace[i - 1] + 1e-12) << "sweep " << i;

  // (b) a single linked pair converges to the known stationary point
  // q1 = (2u + v) / 3, q2 = (2v + u) / 3.
  std::vector<double> u(5), v(5);
  for (std::size_t c = 0; c < 5; ++c) {
    u[c] = rng.normal();
    v[c] = rng.normal();
  }
  EmbeddingTable two(5);
  two.insert("u", std::vector<double>(u));
  two.insert("v", std::vector<double>(v));
  MorphLexicon pair_lex;
  pair_lex.add("u", "v", "Tense=Past");
  const EmbeddingTable retro = retrofit_embeddings(two, pair_lex, 60);
  for (std::size_t c = 0; c < 5; ++c) {
    EXPECT_NEAR((*retro.find("u"))[c], (2.0 * u[c] + v[c]) / 3.0, 1e-8);
    EXPECT_NEAR((*retro.find("v"))[c], (2.0 * v[c] + u[c]) / 3.0, 1e-8);
  }

  // (c) no lexicon, no movement.
  const EmbeddingTable frozen = retrofit_embeddings(base, MorphLexicon(), 10);
  for (const std::string& w : base.words())
    EXPECT_EQ(*frozen.find(w), *base.find(w));
}

TEST(Acceptance, C07AdversarialPreferenceSeparatesMetrics) {
  Criterion verdict(
      7, "on fixture triples the lexical-overlap metric always prefers the "
         "adversarial C, the held-out metric always prefers the paraphrase B");
  const std::string fix = fixtures_dir();
  const std::vector<FreitagAnchor> anchors =
      load_freitag_anchors(fix + "/adversarial_freitag.tsv");
  TripleBuildStats stats;
  const std::vector<AdversarialTriple> triples =
      build_triples_freitag(anchors, 42, &stats);
  ASSERT_EQ(triples.size(), 24u);
  EXPECT_EQ(stats.identity_permutations, 0u);
  for (const AdversarialTriple& t : triples)
    ASSERT_EQ(t.lex_ac, 1.0) << t.id;  // C permutes A's tokens in place

  const PreferenceReport overlap = evaluate_preferences(
      triples, load_score_table(fix + "/adv_scores_ab.tsv", "lexoverlap"),
      load_score_table(fix + "/adv_scores_ac.tsv", "lexoverlap"));
  EXPECT_EQ(overlap.c_preference, 1.0);
  EXPECT_EQ(overlap.b_preference, 0.0);

  const PreferenceReport held_out = evaluate_preferences(
      triples, load_score_table(fix + "/adv_scores_oracle_ab.tsv", "oracle"),
      load_score_table(fix + "/adv_scores_oracle_ac.tsv", "oracle"));
  EXPECT_EQ(held_out.b_preference, 1.0);
  EXPECT_EQ(held_out.c_preference, 0.0);
}

TEST(Acceptance, C08EnsembleBeatsItsMembers) {
  Criterion verdict(
      8, "the fixture ensemble outperforms both members; a duplicated "
         "member gains exactly zero");
  const std::string fix = fixtures_dir();
  const std::vector<ScoreTable> members = {
      load_score_table(fix + "/m_alpha.tsv", "m_alpha"),
      load_score_table(fix + "/m_beta.tsv", "m_beta")};
  const ScoreTable human = load_score_table(fix + "/human.tsv", "human");
  const std::vector<EnsembleReport> reports =
      evaluate_ensembles(members, human,
                         {{"m_alpha", "m_beta"}, {"m_alpha", "m_alpha"}},
                         /*normalize_first=*/true);
  ASSERT_EQ(reports.size(), 2u);
  EXPECT_GT(reports[0].ensemble_r, reports[0].member_r[0]);
  EXPECT_GT(reports[0].ensemble_r, reports[0].member_r[1]);
  EXPECT_GT(reports[0].improvement_pct, 0.0);
  EXPECT_EQ(reports[1].improvement_pct, 0.0);
}

TEST(Acceptance, C09CliRerunsAreByteIdentical) {
  Criterion verdict(
      9, "two seeded CLI runs over all four commands produce byte-identical "
         "output trees within 30 s");
  ASSERT_FALSE(cli_binary().empty()) << "METRICLENS_BIN is not set";
  const std::string config = fixtures_dir() + "/config.toml";
  ASSERT_TRUE(fs::exists(config)) << config;

  const auto start = std::chrono::steady_clock::now();
  testing::TempDir tmp;
  const std::string runs[2] = {tmp.file("run1"), tmp.file("run2")};
  for (const std::string& out : runs)
    for (const char* sub : {"factors", "regress", "adversarial", "ensemble"})
      ASSERT_EQ(run_cli(std::string(sub) + " --config \"" + config +
                        "\" --out \"" + out + "\""),
                0)
          << sub << " -> " << out;
  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  EXPECT_LT(elapsed.count(), 30.0);

  const auto tree1 = snapshot_tree(runs[0]);
  const auto tree2 = snapshot_tree(runs[1]);
  ASSERT_FALSE(tree1.empty());
  ASSERT_EQ(tree1.size(), tree2.size());
  for (const auto& [rel, bytes] : tree1) {
    const auto it = tree2.find(rel);
    ASSERT_NE(it, tree2.end()) << rel << " missing from the second run";
    EXPECT_EQ(bytes, it->second) << rel << " differs between runs";
  }
}

TEST(Acceptance, C10RegressionReportMatchesGoldenBytes) {
  Criterion verdict(
      10, "the CLI regression report is byte-identical to the checked-in "
          "golden file");
  ASSERT_FALSE(cli_binary().empty()) << "METRICLENS_BIN is not set";
  const std::string config = fixtures_dir() + "/config.toml";
  const std::string golden =
      testing::env_or("METRICLENS_GOLDEN", "tests/golden") +
      "/fit_report.tsv";
  ASSERT_TRUE(fs::exists(golden)) << golden;

  testing::TempDir tmp;
  const std::string out = tmp.file("run");
  ASSERT_EQ(run_cli("factors --config \"" + config + "\" --out \"" + out +
                    "\""),
            0);
  ASSERT_EQ(run_cli("regress --config \"" + config + "\" --out \"" + out +
                    "\""),
            0);
  EXPECT_EQ(testing::read_file(out + "/regress/fit_report.tsv"),
            testing::read_file(golden));
}

}  // namespace
}  // namespace metriclens
