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

#include "metriclens/morphology.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "metriclens/random.hpp"

namespace metriclens {
namespace {

using TaggedWords = std::vector<std::pair<std::string, std::string>>;

TEST(CanonicalBundle, SortsFeaturesAndNormalizesEmpties) {
  EXPECT_EQ(canonicalize_bundle("Tense=Past|VerbForm=Part"),
            canonicalize_bundle("VerbForm=Part|Tense=Past"));
  EXPECT_EQ(canonicalize_bundle("B=2|A=1"), "A=1|B=2");
  EXPECT_EQ(canonicalize_bundle(" A=1 | B=2 "), "A=1|B=2");
  EXPECT_EQ(canonicalize_bundle("_"), "");
  EXPECT_EQ(canonicalize_bundle(""), "");
}

TEST(KthPair, EnumeratesEveryUnorderedPairOnce) {
  for (std::size_t w : {2u, 3u, 5u, 9u}) {
    std::set<std::pair<std::size_t, std::size_t>> seen;
    const std::uint64_t total = std::uint64_t(w) * (w - 1) / 2;
    for (std::uint64_t k = 0; k < total; ++k) {
      auto [i, j] = detail::kth_pair(w, k);
      ASSERT_LT(i, j);
      ASSERT_LT(j, w);
      ASSERT_TRUE(seen.emplace(i, j).second) << "duplicate at k=" << k;
    }
    EXPECT_EQ(seen.size(), total);
  }
}

TEST(MorphLexicon, PairsWordsSharingCanonicalBundles) {
  const TaggedWords tagged = {
      {"walked", "Tense=Past|VerbForm=Part"},
      {"jumped", "VerbForm=Part|Tense=Past"},  // scrambled order, same bundle
      {"ran", "Tense=Past"},
      {"walked", "Tense=Past|VerbForm=Part"},  // duplicate row
      {"cat", "Number=Sing"},                  // singleton class: no pairs
  };
  const MorphLexicon lex = build_morph_lexicon(tagged);
  ASSERT_EQ(lex.pairs().size(), 1u);
  EXPECT_EQ(lex.pairs()[0].first, "jumped");  // stored with first <= second
  EXPECT_EQ(lex.pairs()[0].second, "walked");
  EXPECT_EQ(lex.pairs()[0].bundle, "Tense=Past|VerbForm=Part");
}

TEST(MorphLexicon, CapDownsamplesDeterministically) {
  TaggedWords tagged;
  for (int i = 0; i < 40; ++i)
    tagged.emplace_back("w" + std::to_string(i), "Number=Sing");
  // 40 choose 2 = 780 pairs, capped at 100.
  const MorphLexicon a = build_morph_lexicon(tagged, 100, 7);
  const MorphLexicon b = build_morph_lexicon(tagged, 100, 7);
  const MorphLexicon c = build_morph_lexicon(tagged, 100, 8);
  ASSERT_EQ(a.pairs().size(), 100u);
  ASSERT_EQ(b.pairs().size(), 100u);
  for (std::size_t i = 0; i < a.pairs().size(); ++i) {
    EXPECT_EQ(a.pairs()[i].first, b.pairs()[i].first);
    EXPECT_EQ(a.pairs()[i].second, b.pairs()[i].second);
  }
  bool differs = false;  // a different seed picks a different sample
  for (std::size_t i = 0; i < c.pairs().size() && !differs; ++i)
    differs = a.pairs()[i].first != c.pairs()[i].first ||
              a.pairs()[i].second != c.pairs()[i].second;
  EXPECT_TRUE(differs);
  // No duplicates in the sample.
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& p : a.pairs())
    ASSERT_TRUE(seen.emplace(p.first, p.second).second);
}

EmbeddingTable random_table(const std::vector<std::string>& words,
                            std::size_t dim, Rng& rng) {
  EmbeddingTable t(dim);
  for (const std::string& w : words) {
    std::vector<double> v(dim);
    for (double& c : v) c = rng.normal();
    t.insert(w, std::move(v));
  }
  return t;
}

TEST(Retrofit, EmptyLexiconIsIdentity) {
  Rng rng(3);
  const EmbeddingTable base = random_table({"a", "b", "c"}, 4, rng);
  std::vector<double> trace;
  const EmbeddingTable retro =
      retrofit_embeddings(base, MorphLexicon(), 10, &trace);
  for (const std::string& w : base.words())
    EXPECT_EQ(*retro.find(w), *base.find(w));
  ASSERT_EQ(trace.size(), 10u);
  for (double v : trace) EXPECT_EQ(v, 0.0);
}

TEST(Retrofit, ObjectiveIsNonIncreasing) {
  // Random 50-word lexicon graph over random vectors.
  Rng rng(17);
  std::vector<std::string> words;
  TaggedWords tagged;
  for (int i = 0; i < 50; ++i) {
    words.push_back("w" + std::to_string(i));
    // ~6 tag classes of ~8 words each.
    tagged.emplace_back(words.back(),
                        "Class=" + std::to_string(rng.below(6)));
  }
  const EmbeddingTable base = random_table(words, 8, rng);
  const MorphLexicon lex = build_morph_lexicon(tagged);
  ASSERT_GT(lex.pairs().size(), 0u);

  std::vector<double> trace;
  retrofit_embeddings(base, lex, 10, &trace);
  ASSERT_EQ(trace.size(), 10u);
  for (std::size_t i = 1; i < trace.size(); ++i)
    EXPECT_LE(trace[i], trace[i - 1] + 1e-12)
        << "objective increased at sweep " << i;
}

TEST(Retrofit, TwoWordFixedPoint) {
  // For a single pair (u, v) the stationary point of the update
  // q1 <- (q1_hat + q2) / 2, q2 <- (q2_hat + q1) / 2 is
  // q1 = (2 u + v) / 3 and q2 = (2 v + u) / 3.
  Rng rng(23);
  const std::size_t dim = 5;
  std::vector<double> u(dim), v(dim);
  for (std::size_t c = 0; c < dim; ++c) {
    u[c] = rng.normal();
    v[c] = rng.normal();
  }
  EmbeddingTable base(dim);
  base.insert("u", std::vector<double>(u));
  base.insert("v", std::vector<double>(v));
  MorphLexicon lex;
  lex.add("u", "v", "Tense=Past");

  // The sweep contracts the error by 4x per iteration; 60 sweeps put the
  // iterate well inside 1e-8 of the fixed point.
  const EmbeddingTable retro = retrofit_embeddings(base, lex, 60);
  const std::vector<double>& q1 = *retro.find("u");
  const std::vector<double>& q2 = *retro.find("v");
  for (std::size_t c = 0; c < dim; ++c) {
    EXPECT_NEAR(q1[c], (2.0 * u[c] + v[c]) / 3.0, 1e-8);
    EXPECT_NEAR(q2[c], (2.0 * v[c] + u[c]) / 3.0, 1e-8);
  }
}

TEST(Retrofit, PairsOutsideVocabularyAreIgnored) {
  Rng rng(29);
  const EmbeddingTable base = random_table({"a", "b"}, 3, rng);
  MorphLexicon lex;
  lex.add("a", "missing", "X=1");  // no effect: "missing" has no vector
  const EmbeddingTable retro = retrofit_embeddings(base, lex, 10);
  EXPECT_EQ(*retro.find("a"), *base.find("a"));
  EXPECT_EQ(*retro.find("b"), *base.find("b"));
}

TEST(MorGate, SharedBundlesKeepFactorActive) {
  const TaggedWords en = {{"walked", "Tense=Past"}, {"cats", "Number=Plur"}};
  const TaggedWords de = {{"ging", "Tense=Past"}, {"katzen", "Number=Plur"}};
  const MorGate gate = mor_cross_lingual_gate(en, de, 0.05);
  EXPECT_TRUE(gate.active);
  EXPECT_EQ(gate.shared_fraction, 0.5);  // 2 of 4 cross pairs share a bundle
}

TEST(MorGate, DisjointInventoriesDeactivate) {
  const TaggedWords en = {{"walked", "Tense=Past"}};
  const TaggedWords ja = {{"aruita", "Polite=Form"}};
  const MorGate gate = mor_cross_lingual_gate(en, ja, 0.05);
  EXPECT_FALSE(gate.active);
  EXPECT_EQ(gate.shared_fraction, 0.0);
  EXPECT_FALSE(gate.reason.empty());
}

TEST(MorGate, EmptySideDeactivates) {
  const MorGate gate = mor_cross_lingual_gate({{"w", "T=1"}}, {}, 0.05);
  EXPECT_FALSE(gate.active);
  EXPECT_FALSE(gate.reason.empty());
}

TEST(MorScore, CosineOfAveragedVectors) {
  EmbeddingTable t(2);
  t.insert("hot", {1.0, 0.0});
  t.insert("cold", {0.0, 1.0});
  t.insert("warm", {1.0, 0.0});
  EXPECT_NEAR(mor_score({"hot"}, {"warm"}, t), 1.0, 1e-15);
  EXPECT_NEAR(mor_score({"hot"}, {"cold"}, t), 0.0, 1e-15);
  // Mean of orthogonal unit vectors against one of them: cos = 1/sqrt(2).
  EXPECT_NEAR(mor_score({"hot", "cold"}, {"hot"}, t), 1.0 / std::sqrt(2.0),
              1e-15);
  // OOV tokens are skipped, not imputed.
  EXPECT_NEAR(mor_score({"hot", "zzz"}, {"warm"}, t), 1.0, 1e-15);
  EXPECT_THROW(mor_score({"zzz"}, {"warm"}, t), DataError);
}

}  // namespace
}  // namespace metriclens
