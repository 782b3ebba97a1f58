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
// Regenerates the bundled demo dataset under fixtures/ (or a directory
// given as argv[1]). Everything is derived from fixed seeds, so the output
// is byte-identical on every run. After writing, the tool re-loads the
// files and verifies the statistical properties the dataset is built to
// demonstrate (planted regression signal, by-construction adversarial
// preferences, complementary ensemble members); it exits nonzero if any
// check fails, so a bad regeneration cannot go unnoticed.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "metriclens/adversarial.hpp"
#include "metriclens/ensemble.hpp"
#include "metriclens/factors.hpp"
#include "metriclens/io.hpp"
#include "metriclens/lexical.hpp"
#include "metriclens/morphology.hpp"
#include "metriclens/random.hpp"
#include "metriclens/regression.hpp"
#include "metriclens/tree_edit.hpp"

namespace fs = std::filesystem;
using namespace metriclens;

namespace {

constexpr std::uint64_t kSeedSentences = 0xA11CE001;
constexpr std::uint64_t kSeedTrees = 0xA11CE002;
constexpr std::uint64_t kSeedVectors = 0xA11CE003;
constexpr std::uint64_t kSeedToyMetric = 0xA11CE004;
constexpr std::uint64_t kSeedNoise = 0xA11CE007;
constexpr std::uint64_t kSeedParallel = 0xA11CE005;
constexpr std::uint64_t kSeedEnsemble = 0xA11CE006;
constexpr std::uint64_t kSeedAdversarial = 0xA11CE008;
constexpr std::uint64_t kConfigSeed = 42;  // seed written into config.toml

struct VocabWord {
  std::string form;
  std::string upos;
  std::string xpos;
  std::string feats;  // "_" when untagged
};

const std::vector<VocabWord>& nouns() {
  static const std::vector<VocabWord> v = {
      {"man", "NOUN", "NN", "Number=Sing"},
      {"dog", "NOUN", "NN", "Number=Sing"},
      {"house", "NOUN", "NN", "Number=Sing"},
      {"river", "NOUN", "NN", "Number=Sing"},
      {"car", "NOUN", "NN", "Number=Sing"},
      {"tree", "NOUN", "NN", "Number=Sing"},
      {"bird", "NOUN", "NN", "Number=Sing"},
      {"city", "NOUN", "NN", "Number=Sing"},
      {"road", "NOUN", "NN", "Number=Sing"},
      {"child", "NOUN", "NN", "Number=Sing"},
      {"teacher", "NOUN", "NN", "Number=Sing"},
      {"garden", "NOUN", "NN", "Number=Sing"},
      {"books", "NOUN", "NNS", "Number=Plur"},
      {"storms", "NOUN", "NNS", "Number=Plur"},
      {"bridges", "NOUN", "NNS", "Number=Plur"},
  };
  return v;
}

const std::vector<VocabWord>& verbs() {
  static const std::vector<VocabWord> v = {
      {"walks", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"sees", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"follows", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"crosses", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"finds", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"knows", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"builds", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"watches", "VERB", "VBZ", "Mood=Ind|Number=Sing|Person=3|Tense=Pres"},
      {"reached", "VERB", "VBN", "Tense=Past|VerbForm=Part"},
      {"combined", "VERB", "VBN", "Tense=Past|VerbForm=Part"},
      {"painted", "VERB", "VBN", "Tense=Past|VerbForm=Part"},
      {"planted", "VERB", "VBN", "Tense=Past|VerbForm=Part"},
  };
  return v;
}

const std::vector<VocabWord>& adjectives() {
  static const std::vector<VocabWord> v = {
      {"old", "ADJ", "JJ", "Degree=Pos"},   {"green", "ADJ", "JJ", "Degree=Pos"},
      {"small", "ADJ", "JJ", "Degree=Pos"}, {"quiet", "ADJ", "JJ", "Degree=Pos"},
      {"bright", "ADJ", "JJ", "Degree=Pos"},
  };
  return v;
}

const std::vector<VocabWord>& determiners() {
  static const std::vector<VocabWord> v = {
      {"the", "DET", "DT", "_"}, {"a", "DET", "DT", "_"},
      {"every", "DET", "DT", "_"},
  };
  return v;
}

const std::vector<VocabWord>& prepositions() {
  static const std::vector<VocabWord> v = {
      {"near", "ADP", "IN", "_"},   {"under", "ADP", "IN", "_"},
      {"across", "ADP", "IN", "_"}, {"behind", "ADP", "IN", "_"},
  };
  return v;
}

// Alternative wording used to build low-overlap paraphrases.
const std::vector<std::string>& alt_nouns() {
  static const std::vector<std::string> v = {
      "person", "animal", "building", "stream",  "vehicle",
      "plant",  "creature", "town",   "path",    "kid",
      "mentor", "yard",   "volumes",  "tempests", "spans"};
  return v;
}
const std::vector<std::string>& alt_verbs() {
  static const std::vector<std::string> v = {
      "strolls", "notices", "trails",  "spans_across", "locates",
      "understands", "erects", "observes", "attained", "merged",
      "coloured", "sowed"};
  return v;
}
const std::vector<std::string>& alt_adjectives() {
  static const std::vector<std::string> v = {"aged", "verdant", "tiny", "calm",
                                             "vivid"};
  return v;
}

std::map<std::string, VocabWord> vocab_index() {
  std::map<std::string, VocabWord> idx;
  for (const auto* list :
       {&nouns(), &verbs(), &adjectives(), &determiners(), &prepositions()})
    for (const VocabWord& w : *list) idx[w.form] = w;
  return idx;
}

template <typename T>
const T& pick(const std::vector<T>& v, Rng& rng) {
  return v[static_cast<std::size_t>(rng.below(v.size()))];
}

std::string fixed6(double v) { return format_fixed(v, 6); }

// --- sentence pairs -------------------------------------------------------

struct PairFixture {
  std::string id;
  std::vector<std::string> x;
  std::vector<std::string> y;
  bool has_sem = true;
  double sem = 0.0;
};

std::vector<std::string> make_sentence(Rng& rng) {
  std::vector<std::string> toks;
  toks.push_back(pick(determiners(), rng).form);
  if (rng.uniform() < 0.6) toks.push_back(pick(adjectives(), rng).form);
  toks.push_back(pick(nouns(), rng).form);
  toks.push_back(pick(verbs(), rng).form);
  toks.push_back(pick(determiners(), rng).form);
  toks.push_back(pick(nouns(), rng).form);
  toks.push_back(pick(prepositions(), rng).form);
  toks.push_back(pick(determiners(), rng).form);
  toks.push_back(pick(nouns(), rng).form);
  return toks;
}

std::vector<PairFixture> make_pairs() {
  const auto idx = vocab_index();
  std::vector<PairFixture> pairs;
  for (int i = 1; i <= 60; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "p%03d", i);
    Rng rng(derive_seed(kSeedSentences, id));
    PairFixture p;
    p.id = id;
    p.x = make_sentence(rng);

    // y keeps each content word with a pair-specific probability and
    // swaps the rest inside the same word class.
    const double keep_p = 0.3 + 0.65 * rng.uniform();
    std::size_t kept = 0, content = 0;
    for (const std::string& tok : p.x) {
      const VocabWord& w = idx.at(tok);
      if (w.upos == "DET" || w.upos == "ADP") {
        p.y.push_back(tok);
        continue;
      }
      ++content;
      if (rng.uniform() < keep_p) {
        ++kept;
        p.y.push_back(tok);
        continue;
      }
      if (w.upos == "NOUN")
        p.y.push_back(pick(nouns(), rng).form);
      else if (w.upos == "VERB")
        p.y.push_back(pick(verbs(), rng).form);
      else
        p.y.push_back(pick(adjectives(), rng).form);
    }
    const double overlap =
        content == 0 ? 1.0
                     : static_cast<double>(kept) / static_cast<double>(content);
    p.sem = std::min(5.0, std::max(0.0, 5.0 * (0.75 * overlap +
                                               0.25 * rng.uniform())));
    p.sem = std::stod(format_fixed(p.sem, 2));  // store at 2 decimals
    pairs.push_back(std::move(p));
  }
  // Two pairs without a human score; one pair whose hypothesis is fully
  // out of vocabulary (exercises the MOR skip path).
  pairs[6].has_sem = false;   // p007
  pairs[22].has_sem = false;  // p023
  pairs[12].y = {"zyqqer", "vombix"};  // p013
  return pairs;
}

void write_pairs(const fs::path& dir, const std::vector<PairFixture>& pairs) {
  std::ofstream out = open_output((dir / "pairs.tsv").string());
  out << "# demo sentence pairs: id, x (reference), y (hypothesis), sem\n";
  out << "id\tx\ty\tsem\n";
  for (const PairFixture& p : pairs) {
    out << p.id << '\t' << join(p.x, " ") << '\t' << join(p.y, " ") << '\t';
    if (p.has_sem) out << format_fixed(p.sem, 2);
    out << '\n';
  }
}

// --- dependency parses ----------------------------------------------------

std::vector<std::size_t> random_tree(std::size_t n, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(order);
  std::vector<std::size_t> parent(n, DependencyTree::kNoParent);
  for (std::size_t i = 1; i < n; ++i)
    parent[order[i]] = order[rng.below(i)];
  return parent;
}

void write_conllu(const fs::path& path, const std::vector<PairFixture>& pairs,
                  bool x_side) {
  const auto idx = vocab_index();
  std::ofstream out = open_output(path.string());
  for (const PairFixture& p : pairs) {
    const std::vector<std::string>& toks = x_side ? p.x : p.y;
    Rng rng(derive_seed(kSeedTrees, p.id + (x_side ? "/x" : "/y")));
    std::vector<std::size_t> parent = random_tree(toks.size(), rng);
    out << "# sent_id = " << p.id << '\n';
    out << "# text = " << join(toks, " ") << '\n';
    for (std::size_t i = 0; i < toks.size(); ++i) {
      auto it = idx.find(toks[i]);
      const std::string upos = it == idx.end() ? "NOUN" : it->second.upos;
      const std::string xpos = it == idx.end() ? "NN" : it->second.xpos;
      const std::string feats = it == idx.end() ? "_" : it->second.feats;
      const std::size_t head =
          parent[i] == DependencyTree::kNoParent ? 0 : parent[i] + 1;
      out << i + 1 << '\t' << toks[i] << '\t' << toks[i] << '\t' << upos << '\t'
          << xpos << '\t' << feats << '\t' << head << '\t'
          << (head == 0 ? "root" : "dep") << "\t_\t_\n";
    }
    out << '\n';
  }
}

// --- embeddings and morphological tags -------------------------------------

void write_vectors(const fs::path& dir) {
  std::vector<std::string> words;
  for (const auto* list :
       {&nouns(), &verbs(), &adjectives(), &determiners(), &prepositions()})
    for (const VocabWord& w : *list) words.push_back(w.form);
  std::ofstream out = open_output((dir / "vectors.vec").string());
  out << words.size() << " 8\n";
  for (const std::string& w : words) {
    Rng rng(derive_seed(kSeedVectors, w));
    out << w;
    for (int c = 0; c < 8; ++c) out << ' ' << format_fixed(0.5 * rng.normal(), 4);
    out << '\n';
  }
}

void write_tagged_words(const fs::path& dir) {
  std::ofstream out = open_output((dir / "tagged_words.tsv").string());
  out << "# word <TAB> UD feature bundle\n";
  for (const auto* list : {&nouns(), &verbs(), &adjectives()})
    for (const VocabWord& w : *list)
      if (w.feats != "_") {
        // One bundle is written in a scrambled feature order on purpose;
        // canonicalization must absorb it.
        if (w.form == "combined")
          out << w.form << "\tVerbForm=Part|Tense=Past\n";
        else
          out << w.form << '\t' << w.feats << '\n';
      }
  out << "reached\tTense=Past|VerbForm=Part\n";  // duplicate row, deduplicated
}

// --- score tables -----------------------------------------------------------

void write_metric_scores(const fs::path& dir,
                         const std::vector<PairFixture>& pairs) {
  // Planted signal: toymetric = 0.5 * z(LEX) + 0.3 * z(SEM) + 0.1 * noise.
  std::vector<double> lex_with_sem, sem_with_sem;
  for (const PairFixture& p : pairs) {
    if (!p.has_sem) continue;
    lex_with_sem.push_back(lex_pair_score(p.x, p.y));
    sem_with_sem.push_back(p.sem);
  }
  const double lex_mean = mean_of(lex_with_sem), lex_sd = population_std(lex_with_sem);
  const double sem_mean = mean_of(sem_with_sem), sem_sd = population_std(sem_with_sem);

  std::ofstream toy = open_output((dir / "scores_toymetric.tsv").string());
  std::ofstream noise = open_output((dir / "scores_noise.tsv").string());
  std::ofstream parallel = open_output((dir / "scores_parallel.tsv").string());
  toy << "id\tscore\n";
  noise << "id\tscore\n";
  parallel << "id\tscore\n";
  for (const PairFixture& p : pairs) {
    const double zlex = (lex_pair_score(p.x, p.y) - lex_mean) / lex_sd;
    Rng rng(derive_seed(kSeedToyMetric, p.id));
    double t = 0.5 * zlex + 0.1 * rng.normal();
    if (p.has_sem) t += 0.3 * (p.sem - sem_mean) / sem_sd;
    toy << p.id << '\t' << fixed6(t) << '\n';

    Rng nr(derive_seed(kSeedNoise, p.id));
    noise << p.id << '\t' << fixed6(nr.normal()) << '\n';

    Rng pr(derive_seed(kSeedParallel, p.id));
    parallel << p.id << '\t' << fixed6(0.88 + 0.08 * pr.uniform()) << '\n';
  }
}

void write_ensemble_tables(const fs::path& dir,
                           const std::vector<PairFixture>& pairs) {
  std::ofstream human = open_output((dir / "human.tsv").string());
  std::ofstream ma = open_output((dir / "m_alpha.tsv").string());
  std::ofstream mb = open_output((dir / "m_beta.tsv").string());
  human << "id\tscore\n";
  ma << "id\tscore\n";
  mb << "id\tscore\n";
  for (const PairFixture& p : pairs) {
    Rng rng(derive_seed(kSeedEnsemble, p.id));
    const double f1 = rng.normal();
    const double f2 = rng.normal();
    human << p.id << '\t' << fixed6(f1 + f2) << '\n';
    ma << p.id << '\t' << fixed6(f1 + 0.3 * rng.normal()) << '\n';
    mb << p.id << '\t' << fixed6(f2 + 0.3 * rng.normal()) << '\n';
  }
}

// --- adversarial fixtures ---------------------------------------------------

struct FreitagRow {
  std::string id;
  std::vector<std::string> a, b, tags;
};

std::vector<FreitagRow> make_freitag_rows() {
  std::vector<FreitagRow> rows;
  for (int i = 1; i <= 24; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "f%03d", i);
    Rng rng(derive_seed(kSeedAdversarial, id));
    FreitagRow r;
    r.id = id;

    // Anchor with three distinct nouns, so noun permutation can really
    // rearrange the sentence.
    std::vector<std::string> ns;
    while (ns.size() < 3) {
      std::string n = pick(nouns(), rng).form;
      bool dup = false;
      for (const std::string& seen : ns) dup |= seen == n;
      if (!dup) ns.push_back(n);
    }
    const std::string adj = pick(adjectives(), rng).form;
    const std::string verb = pick(verbs(), rng).form;
    const std::string prep = pick(prepositions(), rng).form;
    r.a = {"the", adj, ns[0], verb, "the", ns[1], prep, "the", ns[2]};
    r.tags = {"DT", "JJ", "NN", "VBZ", "DT", "NN", "IN", "DT", "NN"};

    // Low-overlap paraphrase: mostly alternative wording, with a couple of
    // anchor words kept so the overlap is small but rarely zero.
    r.b = {"some",
           pick(alt_adjectives(), rng),
           pick(alt_nouns(), rng),
           pick(alt_verbs(), rng),
           "some",
           pick(alt_nouns(), rng),
           "beside",
           "some",
           pick(alt_nouns(), rng)};
    if (rng.uniform() < 0.5) r.b[2] = ns[0];
    if (rng.uniform() < 0.35) r.b[3] = verb;
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_freitag(const fs::path& dir, const std::vector<FreitagRow>& rows) {
  std::ofstream out = open_output((dir / "adversarial_freitag.tsv").string());
  out << "id\tA\tB\tA_pos\n";
  for (const FreitagRow& r : rows)
    out << r.id << '\t' << join(r.a, " ") << '\t' << join(r.b, " ") << '\t'
        << join(r.tags, " ") << '\n';
}

void write_adversarial_scores(const fs::path& dir,
                              const std::vector<AdversarialTriple>& triples,
                              const std::string& ab_name,
                              const std::string& ac_name, bool oracle) {
  std::ofstream ab = open_output((dir / ab_name).string());
  std::ofstream ac = open_output((dir / ac_name).string());
  ab << "id\tscore\n";
  ac << "id\tscore\n";
  for (const AdversarialTriple& t : triples) {
    if (oracle) {
      // A paraphrase-aware metric: high whenever B is the paraphrase,
      // low for the scrambled C, regardless of surface overlap.
      ab << t.id << '\t' << fixed6(0.8 + 0.1 * t.lex_ab) << '\n';
      ac << t.id << '\t' << fixed6(0.2 + 0.1 * t.lex_ac) << '\n';
    } else {
      // Surface-overlap metric: the lexical factor itself.
      ab << t.id << '\t' << format_double(t.lex_ab) << '\n';
      ac << t.id << '\t' << format_double(t.lex_ac) << '\n';
    }
  }
}

std::vector<PawsAnchor> make_paws_anchors() {
  std::vector<PawsAnchor> anchors;
  for (int i = 1; i <= 30; ++i) {
    char id[8];
    std::snprintf(id, sizeof(id), "w%03d", i);
    Rng rng(derive_seed(kSeedAdversarial ^ 0x9999, id));
    PawsAnchor a;
    a.id = id;
    std::vector<std::string> ns;
    while (ns.size() < 2) {
      std::string n = pick(nouns(), rng).form;
      if (ns.empty() || ns[0] != n) ns.push_back(n);
    }
    const std::string verb = pick(verbs(), rng).form;
    a.a_tokens = {"the", ns[0], verb, "the", ns[1], pick(prepositions(), rng).form,
                  "the", pick(nouns(), rng).form};

    const bool skip_paraphrase = i == 25 || i == 26;
    const bool skip_nonpara = i >= 27;
    if (!skip_paraphrase) {
      PawsAnchor::Candidate b;
      b.tokens = {"some", pick(alt_nouns(), rng), pick(alt_verbs(), rng),
                  "some", pick(alt_nouns(), rng), "beside",
                  "some", pick(alt_nouns(), rng)};
      if (rng.uniform() < 0.5) b.tokens[1] = ns[0];
      b.is_paraphrase = true;
      a.candidates.push_back(std::move(b));
    }
    if (!skip_nonpara) {
      // Entity-swapped anchor: maximal overlap, different meaning.
      PawsAnchor::Candidate c;
      c.tokens = a.a_tokens;
      std::swap(c.tokens[1], c.tokens[4]);
      c.is_paraphrase = false;
      a.candidates.push_back(std::move(c));
      if (rng.uniform() < 0.4) {
        PawsAnchor::Candidate c2;  // a weaker non-paraphrase candidate
        c2.tokens = a.a_tokens;
        c2.tokens.back() = pick(alt_nouns(), rng);
        c2.is_paraphrase = false;
        a.candidates.push_back(std::move(c2));
      }
    }
    anchors.push_back(std::move(a));
  }
  return anchors;
}

void write_paws(const fs::path& dir, const std::vector<PawsAnchor>& anchors) {
  std::ofstream out = open_output((dir / "adversarial_paws.tsv").string());
  out << "id\tA\tcandidate\tlabel\n";
  for (const PawsAnchor& a : anchors)
    for (const auto& cand : a.candidates)
      out << a.id << '\t' << join(a.a_tokens, " ") << '\t'
          << join(cand.tokens, " ") << '\t' << (cand.is_paraphrase ? 1 : 0)
          << '\n';
}

// --- configs ---------------------------------------------------------------

void write_configs(const fs::path& dir) {
  {
    std::ofstream out = open_output((dir / "config.toml").string());
    out << "# Demo run configuration; paths are relative to this file.\n"
           "\n"
           "[paths]\n"
           "pairs = \"pairs.tsv\"\n"
           "parses_x = \"x.conllu\"\n"
           "parses_y = \"y.conllu\"\n"
           "embeddings = \"vectors.vec\"\n"
           "tagged_words = \"tagged_words.tsv\"\n"
           "parallel_scores = \"scores_parallel.tsv\"\n"
           "\n"
           "[dataset]\n"
           "lang_x = \"en\"\n"
           "lang_y = \"en\"\n"
           "\n"
           "[factors]\n"
           "active = [\"SEM\", \"SYN\", \"LEX\", \"MOR\", \"CLB\"]\n"
           "\n"
           "[options]\n"
           "seed = 42\n"
           "casefold = true\n"
           "lex_direction = \"hyp_vs_ref\"\n"
           "retrofit_iterations = 10\n"
           "\n"
           "[output]\n"
           "dir = \"out\"\n"
           "\n"
           "[regress]\n"
           "metric = \"toymetric\"\n"
           "scores = \"scores_toymetric.tsv\"\n"
           "\n"
           "[adversarial]\n"
           "mode = \"freitag\"\n"
           "input = \"adversarial_freitag.tsv\"\n"
           "scores_ab = \"adv_scores_ab.tsv\"\n"
           "scores_ac = \"adv_scores_ac.tsv\"\n"
           "metric = \"lexoverlap\"\n"
           "\n"
           "[ensemble]\n"
           "human = \"human.tsv\"\n"
           "members = [\"m_alpha=m_alpha.tsv\", \"m_beta=m_beta.tsv\"]\n"
           "combos = [\"m_alpha+m_beta\", \"m_alpha+m_alpha\"]\n"
           "normalize = true\n";
  }
  {
    std::ofstream out = open_output((dir / "config_paws.toml").string());
    out << "# Same dataset, selection-based adversarial construction.\n"
           "\n"
           "[paths]\n"
           "pairs = \"pairs.tsv\"\n"
           "\n"
           "[factors]\n"
           "active = [\"LEX\"]\n"
           "\n"
           "[options]\n"
           "seed = 42\n"
           "\n"
           "[output]\n"
           "dir = \"out_paws\"\n"
           "\n"
           "[adversarial]\n"
           "mode = \"paws\"\n"
           "input = \"adversarial_paws.tsv\"\n"
           "scores_ab = \"adv_paws_scores_ab.tsv\"\n"
           "scores_ac = \"adv_paws_scores_ac.tsv\"\n"
           "metric = \"lexoverlap\"\n"
           "top_k = 20\n";
  }
}

// --- self-checks -------------------------------------------------------------

[[noreturn]] void check_failed(const std::string& what) {
  std::cerr << "fixture self-check failed: " << what << '\n';
  std::exit(2);
}

void require(bool ok, const std::string& what) {
  if (!ok) check_failed(what);
}

/// Recomputes the factor columns exactly as the factors command would
/// (default options) and fits the given target.
RegressionFit fit_against(const fs::path& dir, const std::string& score_file,
                          const std::string& metric) {
  const std::vector<SentencePair> pairs =
      load_pair_dataset((dir / "pairs.tsv").string());
  const std::vector<ConlluSentence> xs = load_conllu((dir / "x.conllu").string());
  const std::vector<ConlluSentence> ys = load_conllu((dir / "y.conllu").string());
  const auto xi = index_by_sent_id(xs, "x.conllu");
  const auto yi = index_by_sent_id(ys, "y.conllu");
  const EmbeddingTable base = load_embeddings((dir / "vectors.vec").string());
  const MorphLexicon lexicon = build_morph_lexicon(
      load_tagged_words((dir / "tagged_words.tsv").string()), 100000, kConfigSeed);
  const EmbeddingTable retro = retrofit_embeddings(base, lexicon, 10);

  std::vector<FactorColumn> cols(4);
  cols[0].kind = FactorKind::SEM;
  cols[1].kind = FactorKind::SYN;
  cols[2].kind = FactorKind::LEX;
  cols[3].kind = FactorKind::MOR;
  std::vector<std::string> ids;
  for (const SentencePair& p : pairs) {
    ids.push_back(p.id);
    if (p.sem) cols[0].values[p.id] = sem_score(p);
    cols[1].values[p.id] =
        syn_score(xs[xi.at(p.id)].tree, ys[yi.at(p.id)].tree);
    cols[2].values[p.id] = lex_pair_score(p.x_tokens, p.y_tokens);
    try {
      cols[3].values[p.id] = mor_score(p.x_tokens, p.y_tokens, retro);
    } catch (const DataError&) {
      // fully out-of-vocabulary hypothesis: MOR skipped for this pair
    }
  }
  FactorTable table = join_factors(
      ids, cols, load_score_table((dir / score_file).string(), metric));
  for (std::size_t c = 0; c < table.n_factors(); ++c)
    table.column(c) = z_normalize(table.column(c), factor_name(table.factors()[c]));
  table.target() = z_normalize(table.target(), metric);
  return fit_ols(table);
}

void self_check(const fs::path& dir) {
  const std::vector<SentencePair> pairs =
      load_pair_dataset((dir / "pairs.tsv").string());
  require(pairs.size() == 60, "expected 60 pairs");

  // Planted regression signal: LEX dominates SEM; fit is tight.
  const RegressionFit toy = fit_against(dir, "scores_toymetric.tsv", "toymetric");
  require(toy.n_rows == 57, "toymetric join must keep 57 rows, got " +
                                std::to_string(toy.n_rows));
  require(toy.dropped_rows == 3, "toymetric join must drop 3 rows");
  double lex_coef = 0, sem_coef = 0;
  double lex_p = 1, sem_p = 1;
  for (std::size_t i = 0; i < toy.factors.size(); ++i) {
    if (toy.factors[i] == FactorKind::LEX) lex_coef = toy.coefficients[i], lex_p = toy.p_values[i];
    if (toy.factors[i] == FactorKind::SEM) sem_coef = toy.coefficients[i], sem_p = toy.p_values[i];
  }
  require(lex_coef > sem_coef, "LEX coefficient must exceed SEM");
  require(lex_p < 0.05 && sem_p < 0.05, "planted factors must be significant");
  require(toy.r_squared > 0.8, "toymetric R^2 must exceed 0.8, got " +
                                   format_double(toy.r_squared));

  // Pure-noise target: nothing may look significant.
  const RegressionFit noise = fit_against(dir, "scores_noise.tsv", "noise");
  for (std::size_t i = 0; i < noise.factors.size(); ++i)
    require(noise.p_values[i] >= 0.05,
            std::string("noise fit: factor ") + factor_name(noise.factors[i]) +
                " must be non-significant, p = " +
                format_double(noise.p_values[i]));

  // Freitag triples: C preserves A's token multiset, so lex(A,C) is
  // exactly 1 and a surface-overlap metric must always prefer C.
  TripleBuildStats stats;
  const std::vector<AdversarialTriple> triples = build_triples_freitag(
      load_freitag_anchors((dir / "adversarial_freitag.tsv").string()),
      kConfigSeed, &stats);
  require(triples.size() == 24, "expected 24 freitag triples");
  require(stats.identity_permutations == 0, "no identity permutations expected");
  for (const AdversarialTriple& t : triples) {
    require(t.lex_ac == 1.0, "lex(A,C) must be exactly 1 for " + t.id);
    require(t.lex_ab < 0.9, "lex(A,B) must stay below 0.9 for " + t.id);
  }
  const PreferenceReport lex_pref = evaluate_preferences(
      triples,
      load_score_table((dir / "adv_scores_ab.tsv").string(), "lexoverlap"),
      load_score_table((dir / "adv_scores_ac.tsv").string(), "lexoverlap"));
  require(lex_pref.c_preference == 1.0, "overlap metric must prefer C on every triple");
  const PreferenceReport oracle_pref = evaluate_preferences(
      triples,
      load_score_table((dir / "adv_scores_oracle_ab.tsv").string(), "oracle"),
      load_score_table((dir / "adv_scores_oracle_ac.tsv").string(), "oracle"));
  require(oracle_pref.b_preference == 1.0, "oracle metric must prefer B on every triple");

  // Selection-mode triples: 24 of 30 anchors are usable, top 20 kept.
  TripleBuildStats paws_stats;
  const std::vector<AdversarialTriple> paws = build_triples_paws(
      load_paws_anchors((dir / "adversarial_paws.tsv").string()), 20, &paws_stats);
  require(paws.size() == 20, "expected 20 selected triples, got " +
                                 std::to_string(paws.size()));
  require(paws_stats.skipped_anchors == 6, "expected 6 skipped anchors");
  for (std::size_t i = 1; i < paws.size(); ++i)
    require(paws[i - 1].lex_ab <= paws[i].lex_ab, "triples must sort by lex_ab");

  // Complementary ensemble members must beat the best single member.
  const ScoreTable human = load_score_table((dir / "human.tsv").string(), "human");
  std::vector<ScoreTable> members;
  members.push_back(load_score_table((dir / "m_alpha.tsv").string(), "m_alpha"));
  members.push_back(load_score_table((dir / "m_beta.tsv").string(), "m_beta"));
  const std::vector<EnsembleReport> reports = evaluate_ensembles(
      members, human, {{"m_alpha", "m_beta"}, {"m_alpha", "m_alpha"}}, true);
  require(reports[0].ensemble_r > reports[0].member_r[0] &&
              reports[0].ensemble_r > reports[0].member_r[1],
          "ensemble must beat both members");
  require(reports[1].improvement_pct == 0.0,
          "self-ensemble improvement must be exactly 0");

  std::cout << "fixture self-checks passed\n"
            << "  toymetric: R^2 = " << format_fixed(toy.r_squared, 4)
            << ", n = " << toy.n_rows << ", dropped = " << toy.dropped_rows << '\n'
            << "  freitag: mean lex_ab = "
            << format_fixed(lex_pref.c_preference, 2)
            << "-preference C, oracle B-preference = "
            << format_fixed(oracle_pref.b_preference, 2) << '\n'
            << "  ensemble: r(alpha) = " << format_fixed(reports[0].member_r[0], 4)
            << ", r(beta) = " << format_fixed(reports[0].member_r[1], 4)
            << ", r(ensemble) = " << format_fixed(reports[0].ensemble_r, 4) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  try {
    const fs::path dir = argc > 1 ? argv[1] : "fixtures";
    fs::create_directories(dir);

    const std::vector<PairFixture> pairs = make_pairs();
    write_pairs(dir, pairs);
    write_conllu(dir / "x.conllu", pairs, /*x_side=*/true);
    write_conllu(dir / "y.conllu", pairs, /*x_side=*/false);
    write_vectors(dir);
    write_tagged_words(dir);
    write_metric_scores(dir, pairs);
    write_ensemble_tables(dir, pairs);

    const std::vector<FreitagRow> rows = make_freitag_rows();
    write_freitag(dir, rows);
    TripleBuildStats stats;
    const std::vector<AdversarialTriple> triples = build_triples_freitag(
        load_freitag_anchors((dir / "adversarial_freitag.tsv").string()),
        kConfigSeed, &stats);
    write_adversarial_scores(dir, triples, "adv_scores_ab.tsv",
                             "adv_scores_ac.tsv", /*oracle=*/false);
    write_adversarial_scores(dir, triples, "adv_scores_oracle_ab.tsv",
                             "adv_scores_oracle_ac.tsv", /*oracle=*/true);

    const std::vector<PawsAnchor> paws = make_paws_anchors();
    write_paws(dir, paws);
    TripleBuildStats paws_stats;
    const std::vector<AdversarialTriple> paws_triples = build_triples_paws(
        load_paws_anchors((dir / "adversarial_paws.tsv").string()), 20,
        &paws_stats);
    write_adversarial_scores(dir, paws_triples, "adv_paws_scores_ab.tsv",
                             "adv_paws_scores_ac.tsv", /*oracle=*/false);

    write_configs(dir);
    self_check(dir);
  } catch (const std::exception& e) {
    std::cerr << "fixture generation failed: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
