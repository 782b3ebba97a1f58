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
// Command-line front end: factors / regress / adversarial / ensemble.
// Exit codes: 0 success, 1 configuration or usage error, 2 runtime error.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "metriclens/pipeline.hpp"

namespace {

struct CommandOpts {
  std::string config_path;
  std::int64_t seed = 0;
  std::string out_dir;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

void add_common_options(CLI::App* cmd, CommandOpts* opts) {
  cmd->add_option("--config", opts->config_path,
                  "Run configuration file (TOML subset)")
      ->required();
  opts->seed_opt = cmd->add_option("--seed", opts->seed,
                                   "Override the configured random seed")
                       ->check(CLI::NonNegativeNumber);
  opts->out_opt =
      cmd->add_option("--out", opts->out_dir, "Override the output directory");
}

metriclens::RunConfig load_run_config(const CommandOpts& opts) {
  metriclens::Config cfg = metriclens::Config::parse_file(opts.config_path);
  metriclens::RunConfig rc = metriclens::RunConfig::from_config(cfg);
  if (opts.seed_opt->count() > 0)
    rc.seed = static_cast<std::uint64_t>(opts.seed);
  if (opts.out_opt->count() > 0) rc.out_dir = opts.out_dir;
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "metriclens: explains text-generation evaluation metrics through "
      "linguistic factor regression, adversarial paraphrase preference "
      "tests, and metric ensembling"};
  app.require_subcommand(1);

  CommandOpts factors_opts, regress_opts, adversarial_opts, ensemble_opts;
  CLI::App* factors = app.add_subcommand(
      "factors", "Compute the active factor scores for every sentence pair");
  add_common_options(factors, &factors_opts);
  CLI::App* regress = app.add_subcommand(
      "regress", "Regress a metric's scores onto the computed factors");
  add_common_options(regress, &regress_opts);
  CLI::App* adversarial = app.add_subcommand(
      "adversarial",
      "Build (A,B,C) paraphrase triples and evaluate metric preferences");
  add_common_options(adversarial, &adversarial_opts);
  CLI::App* ensemble = app.add_subcommand(
      "ensemble", "Evaluate score-averaging metric ensembles against humans");
  add_common_options(ensemble, &ensemble_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // bad usage is a validation failure
  }

  try {
    if (factors->parsed())
      metriclens::run_factors(load_run_config(factors_opts));
    else if (regress->parsed())
      metriclens::run_regress(load_run_config(regress_opts));
    else if (adversarial->parsed())
      metriclens::run_adversarial(load_run_config(adversarial_opts));
    else if (ensemble->parsed())
      metriclens::run_ensemble(load_run_config(ensemble_opts));
  } catch (const metriclens::ValidationError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 1;
  } catch (const metriclens::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
