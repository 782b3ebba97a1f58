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

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metriclens/error.hpp"
#include "metriclens/lexical.hpp"
#include "metriclens/strings.hpp"
#include "metriclens/types.hpp"

namespace metriclens {

// ---------------------------------------------------------------------------
// Declarative config file (TOML-style subset)
// ---------------------------------------------------------------------------

/// Parses a small TOML subset: [section] / [section.sub] headers,
/// `key = value` entries with quoted strings, integers, floats, booleans
/// and arrays of quoted strings, and `#` comments. Keys are flattened to
/// "section.key". All parse failures are ValidationErrors.
class Config {
 public:
  struct Value {
    enum class Kind { kString, kNumber, kBool, kArray };
    Kind kind = Kind::kString;
    std::string scalar;                // string content / number text / true|false
    std::vector<std::string> array;
  };

  static Config parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_config("cannot open config file: ", path);
    std::ostringstream buf;
    buf << in.rdbuf();
    Config cfg = parse_string(buf.str(), path);
    cfg.dir_ = std::filesystem::path(path).parent_path().string();
    return cfg;
  }

  static Config parse_string(const std::string& text,
                             const std::string& origin = "<config>") {
    Config cfg;
    cfg.origin_ = origin;
    std::string section;
    std::size_t line_no = 0;
    std::istringstream in(text);
    std::string raw;
    while (std::getline(in, raw)) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::string line = strip_comment(raw, origin, line_no);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']')
          fail_config(origin, ":", line_no, ": unterminated section header");
        section = trim(line.substr(1, line.size() - 2));
        if (section.empty())
          fail_config(origin, ":", line_no, ": empty section name");
        continue;
      }
      std::size_t eq = find_unquoted(line, '=');
      if (eq == std::string::npos)
        fail_config(origin, ":", line_no, ": expected 'key = value'");
      std::string key = trim(line.substr(0, eq));
      if (key.empty()) fail_config(origin, ":", line_no, ": empty key");
      std::string full = section.empty() ? key : section + "." + key;
      if (cfg.values_.count(full))
        fail_config(origin, ":", line_no, ": duplicate key '", full, "'");
      cfg.values_[full] = parse_value(trim(line.substr(eq + 1)), origin, line_no);
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string get_string(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::kString)
      fail_config("config key '", key, "' must be a quoted string");
    return v.scalar;
  }

  std::string get_string_or(const std::string& key,
                            const std::string& fallback) const {
    return has(key) ? get_string(key) : fallback;
  }

  long long get_int_or(const std::string& key, long long fallback) const {
    if (!has(key)) return fallback;
    const Value& v = require(key);
    std::optional<long long> parsed =
        v.kind == Value::Kind::kNumber ? parse_int(v.scalar) : std::nullopt;
    if (!parsed) fail_config("config key '", key, "' must be an integer");
    return *parsed;
  }

  double get_double_or(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const Value& v = require(key);
    std::optional<double> parsed =
        v.kind == Value::Kind::kNumber ? parse_double(v.scalar) : std::nullopt;
    if (!parsed) fail_config("config key '", key, "' must be a number");
    return *parsed;
  }

  bool get_bool_or(const std::string& key, bool fallback) const {
    if (!has(key)) return fallback;
    const Value& v = require(key);
    if (v.kind != Value::Kind::kBool)
      fail_config("config key '", key, "' must be true or false");
    return v.scalar == "true";
  }

  std::vector<std::string> get_string_array(const std::string& key) const {
    const Value& v = require(key);
    if (v.kind != Value::Kind::kArray)
      fail_config("config key '", key, "' must be an array of strings");
    return v.array;
  }

  /// Resolves a path relative to the config file's directory.
  std::string resolve_path(const std::string& p) const {
    std::filesystem::path fp(p);
    if (fp.is_absolute() || dir_.empty()) return p;
    return (std::filesystem::path(dir_) / fp).string();
  }

 private:
  const Value& require(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end())
      fail_config("missing required config key '", key, "' (", origin_, ")");
    return it->second;
  }

  static std::string strip_comment(const std::string& line,
                                   const std::string& origin,
                                   std::size_t line_no) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      char c = line[i];
      if (in_string && c == '\\') {
        ++i;  // skip the escaped character
        continue;
      }
      if (c == '"') in_string = !in_string;
      if (c == '#' && !in_string) return line.substr(0, i);
    }
    if (in_string)
      fail_config(origin, ":", line_no, ": unterminated string");
    return line;
  }

  static std::size_t find_unquoted(const std::string& s, char target) {
    bool in_string = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
      char c = s[i];
      if (in_string && c == '\\') {
        ++i;
        continue;
      }
      if (c == '"') in_string = !in_string;
      if (c == target && !in_string) return i;
    }
    return std::string::npos;
  }

  static std::string parse_quoted(const std::string& s, std::size_t& pos,
                                  const std::string& origin,
                                  std::size_t line_no) {
    std::string out;
    ++pos;  // opening quote
    while (pos < s.size() && s[pos] != '"') {
      if (s[pos] == '\\') {
        ++pos;
        if (pos >= s.size())
          fail_config(origin, ":", line_no, ": dangling escape in string");
        switch (s[pos]) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default:
            fail_config(origin, ":", line_no, ": unsupported escape '\\",
                        std::string(1, s[pos]), "'");
        }
      } else {
        out += s[pos];
      }
      ++pos;
    }
    if (pos >= s.size())
      fail_config(origin, ":", line_no, ": unterminated string");
    ++pos;  // closing quote
    return out;
  }

  static Value parse_value(const std::string& text, const std::string& origin,
                           std::size_t line_no) {
    Value v;
    if (text.empty()) fail_config(origin, ":", line_no, ": missing value");
    if (text.front() == '"') {
      std::size_t pos = 0;
      v.kind = Value::Kind::kString;
      v.scalar = parse_quoted(text, pos, origin, line_no);
      if (trim(text.substr(pos)).size() > 0)
        fail_config(origin, ":", line_no, ": trailing characters after string");
      return v;
    }
    if (text.front() == '[') {
      if (text.back() != ']')
        fail_config(origin, ":", line_no, ": unterminated array");
      v.kind = Value::Kind::kArray;
      std::size_t pos = 1;
      while (true) {
        while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' ||
                                     text[pos] == ','))
          ++pos;
        if (pos >= text.size() - 1) break;
        if (text[pos] != '"')
          fail_config(origin, ":", line_no,
                      ": arrays may contain only quoted strings");
        v.array.push_back(parse_quoted(text, pos, origin, line_no));
      }
      return v;
    }
    if (text == "true" || text == "false") {
      v.kind = Value::Kind::kBool;
      v.scalar = text;
      return v;
    }
    if (parse_double(text)) {
      v.kind = Value::Kind::kNumber;
      v.scalar = text;
      return v;
    }
    fail_config(origin, ":", line_no, ": cannot parse value '", text, "'");
  }

  std::map<std::string, Value> values_;
  std::string origin_ = "<config>";
  std::string dir_;
};

// ---------------------------------------------------------------------------
// Typed run configuration
// ---------------------------------------------------------------------------

/// Everything the pipeline commands need, already typed and with paths
/// resolved relative to the config file. Construction validates value
/// syntax only; per-command requirements (which inputs an active factor
/// needs, etc.) are checked by the command runners before any output is
/// written.
struct RunConfig {
  // [paths]
  std::string pairs;
  std::string parses_x;
  std::string parses_y;
  std::string embeddings;
  std::string tagged_words;
  std::string tagged_words_y;    // second language, cross-lingual runs only
  std::string parallel_scores;   // metric on (source, translation) pairs → CLB

  // [dataset]
  std::string lang_x = "en";
  std::string lang_y = "en";

  // [factors]
  std::vector<FactorKind> active_factors;

  // [options]
  std::uint64_t seed = 0;
  bool casefold = true;
  LexDirection lex_direction = LexDirection::kHypAgainstRef;
  bool brevity_penalty = false;
  std::size_t retrofit_iterations = 10;
  std::size_t lexicon_pair_cap = 100000;
  double mor_overlap_threshold = 0.05;

  // [output]
  std::string out_dir = "out";

  // [regress]
  std::string metric_name;
  std::string metric_scores;

  // [adversarial]
  std::string adv_mode;     // "freitag" or "paws"
  std::string adv_input;    // raw anchors file
  std::string adv_triples;  // pre-built triples file (alternative to input)
  std::string adv_scores_ab;
  std::string adv_scores_ac;
  std::string adv_metric = "metric";
  std::size_t adv_top_k = 100;

  // [ensemble]
  std::string ensemble_human;
  std::vector<std::pair<std::string, std::string>> ensemble_members;  // name, path
  std::vector<std::vector<std::string>> ensemble_combos;
  bool ensemble_normalize = true;

  static RunConfig from_config(const Config& cfg) {
    RunConfig rc;
    auto path_or = [&cfg](const std::string& key) {
      return cfg.has(key) ? cfg.resolve_path(cfg.get_string(key)) : std::string();
    };

    rc.pairs = path_or("paths.pairs");
    rc.parses_x = path_or("paths.parses_x");
    rc.parses_y = path_or("paths.parses_y");
    rc.embeddings = path_or("paths.embeddings");
    rc.tagged_words = path_or("paths.tagged_words");
    rc.tagged_words_y = path_or("paths.tagged_words_y");
    rc.parallel_scores = path_or("paths.parallel_scores");

    rc.lang_x = cfg.get_string_or("dataset.lang_x", "en");
    rc.lang_y = cfg.get_string_or("dataset.lang_y", "en");

    if (cfg.has("factors.active")) {
      for (const std::string& name : cfg.get_string_array("factors.active")) {
        std::optional<FactorKind> kind = factor_from_name(name);
        if (!kind) fail_config("unknown factor '", name, "' in factors.active");
        for (FactorKind k : rc.active_factors)
          if (k == *kind) fail_config("factor '", name, "' listed twice");
        rc.active_factors.push_back(*kind);
      }
      if (rc.active_factors.empty())
        fail_config("factors.active must name at least one factor");
    } else {
      // The four core factors; CLB only runs when asked for.
      rc.active_factors = {FactorKind::SEM, FactorKind::SYN, FactorKind::LEX,
                           FactorKind::MOR};
    }

    long long seed = cfg.get_int_or("options.seed", 0);
    if (seed < 0) fail_config("options.seed must be non-negative");
    rc.seed = static_cast<std::uint64_t>(seed);
    rc.casefold = cfg.get_bool_or("options.casefold", true);
    const std::string dir =
        cfg.get_string_or("options.lex_direction", "hyp_vs_ref");
    if (dir == "hyp_vs_ref")
      rc.lex_direction = LexDirection::kHypAgainstRef;
    else if (dir == "ref_vs_hyp")
      rc.lex_direction = LexDirection::kRefAgainstHyp;
    else if (dir == "symmetric")
      rc.lex_direction = LexDirection::kSymmetric;
    else
      fail_config("options.lex_direction must be hyp_vs_ref, ref_vs_hyp or "
                  "symmetric, got '", dir, "'");
    rc.brevity_penalty = cfg.get_bool_or("options.brevity_penalty", false);
    long long iters = cfg.get_int_or("options.retrofit_iterations", 10);
    if (iters <= 0) fail_config("options.retrofit_iterations must be positive");
    rc.retrofit_iterations = static_cast<std::size_t>(iters);
    long long cap = cfg.get_int_or("options.lexicon_pair_cap", 100000);
    if (cap <= 0) fail_config("options.lexicon_pair_cap must be positive");
    rc.lexicon_pair_cap = static_cast<std::size_t>(cap);
    rc.mor_overlap_threshold =
        cfg.get_double_or("options.mor_overlap_threshold", 0.05);

    // The default "out" also lands next to the config file; a --out
    // override from the command line is used verbatim.
    rc.out_dir = cfg.resolve_path(cfg.get_string_or("output.dir", "out"));

    rc.metric_name = cfg.get_string_or("regress.metric", "");
    rc.metric_scores = path_or("regress.scores");

    rc.adv_mode = cfg.get_string_or("adversarial.mode", "");
    if (!rc.adv_mode.empty() && rc.adv_mode != "freitag" && rc.adv_mode != "paws")
      fail_config("adversarial.mode must be freitag or paws, got '",
                  rc.adv_mode, "'");
    rc.adv_input = path_or("adversarial.input");
    rc.adv_triples = path_or("adversarial.triples");
    rc.adv_scores_ab = path_or("adversarial.scores_ab");
    rc.adv_scores_ac = path_or("adversarial.scores_ac");
    rc.adv_metric = cfg.get_string_or("adversarial.metric", "metric");
    long long top_k = cfg.get_int_or("adversarial.top_k", 100);
    if (top_k <= 0) fail_config("adversarial.top_k must be positive");
    rc.adv_top_k = static_cast<std::size_t>(top_k);

    rc.ensemble_human = path_or("ensemble.human");
    if (cfg.has("ensemble.members")) {
      for (const std::string& entry : cfg.get_string_array("ensemble.members")) {
        std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 >= entry.size())
          fail_config("ensemble.members entries must be 'name=path', got '",
                      entry, "'");
        rc.ensemble_members.emplace_back(
            trim(entry.substr(0, eq)),
            cfg.resolve_path(trim(entry.substr(eq + 1))));
      }
    }
    if (cfg.has("ensemble.combos")) {
      for (const std::string& entry : cfg.get_string_array("ensemble.combos")) {
        std::vector<std::string> names;
        for (const std::string& part : split(entry, '+')) {
          std::string name = trim(part);
          if (name.empty())
            fail_config("empty member name in ensemble combo '", entry, "'");
          names.push_back(std::move(name));
        }
        if (names.size() < 2)
          fail_config("ensemble combo '", entry, "' needs at least 2 members");
        rc.ensemble_combos.push_back(std::move(names));
      }
    }
    rc.ensemble_normalize = cfg.get_bool_or("ensemble.normalize", true);
    return rc;
  }
};

}  // namespace metriclens
