// Copyright 2026 The binmwf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"
#include "binmwf/error.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config, "Run configuration (flat key = value file)");
  cmd->add_option("--out", opts.out, "Output directory")->capture_default_str();
  cmd->add_option("--seed", opts.seed, "Seed overriding the configuration");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace binmwf::app;

  CLI::App app{"Binaural multichannel Wiener filtering with interaural cue preservation"};
  app.require_subcommand(1);

  CommonOptions opts;
  auto* process = app.add_subcommand("process", "Enhance a scene with each configured variant");
  auto* sweep = app.add_subcommand("sweep", "Evaluate the configured variants over run.alphas");
  auto* calibrate = app.add_subcommand("calibrate", "Find the weighting factor for a given SNR loss");
  auto* phase = app.add_subcommand("phase-pdf", "Tabulate the interaural phase density");
  for (auto* cmd : {process, sweep, calibrate, phase}) add_common(cmd, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalidConfig;
  }

  try {
    RunConfig cfg = opts.config.empty() ? RunConfig{} : load_config(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    if (process->parsed()) return run_process(cfg, opts.out, std::cout);
    if (sweep->parsed()) return run_sweep(cfg, opts.out, std::cout);
    if (calibrate->parsed()) return run_calibrate(cfg, opts.out, std::cout);
    return run_phase_pdf(cfg, opts.out, std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << '\n';
    return kExitInvalidConfig;
  } catch (const binmwf::IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitIo;
  } catch (const binmwf::InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitInvalidConfig;
  }
}
