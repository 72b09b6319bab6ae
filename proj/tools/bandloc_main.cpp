// Copyright 2026 The bandloc Authors
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

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "bandloc/config.hpp"
#include "bandloc/runner.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitCapExceeded = 3;
constexpr int kExitAssertFailure = 4;

int run_experiment(const std::string& name, const std::string& config_path,
                   std::int64_t seed_override, int threads_override,
                   const std::string& out_override, bool assert_mode) {
  bandloc::cli::ExperimentConfig cfg;
  try {
    const bandloc::cli::Experiment experiment = bandloc::cli::experiment_from_name(name);
    std::string text = "{}";
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) {
        std::cerr << "bandloc: cannot read config file " << config_path << "\n";
        return kExitConfigError;
      }
      std::stringstream buffer;
      buffer << in.rdbuf();
      text = buffer.str();
    }
    cfg = bandloc::cli::parse_config(text, experiment);
  } catch (const bandloc::ConfigError& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const bandloc::DomainError& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return kExitConfigError;
  }

  if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
  if (threads_override > 0) cfg.threads = threads_override;
  if (!out_override.empty()) cfg.out_dir = out_override;
  cfg.assert_mode = assert_mode;

  try {
    const bandloc::cli::RunReport report = bandloc::cli::run(cfg);
    for (const auto& warning : report.document["warnings"])
      std::cerr << "warning: " << warning.get<std::string>() << "\n";
    std::cout << report.document["experiment"].get<std::string>() << ": wrote ";
    for (std::size_t i = 0; i < report.files_written.size(); ++i) {
      if (i) std::cout << ", ";
      std::cout << cfg.out_dir << "/" << report.files_written[i];
    }
    std::cout << "\n";
    if (!report.assertions_passed) {
      for (const std::string& failure : report.assertion_failures)
        std::cerr << "assertion failed: " << failure << "\n";
      if (assert_mode) return kExitAssertFailure;
    }
    return 0;
  } catch (const bandloc::CapExceeded& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return kExitCapExceeded;
  } catch (const bandloc::ConfigError& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const bandloc::DomainError& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const bandloc::Error& e) {
    std::cerr << "bandloc: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bandloc: numerical experiments on random band matrix localization"};
  app.require_subcommand(1);

  static const char* kExperiments[] = {"decay",  "apriori",    "jacobian-verify",
                                       "shift-verify", "events", "correlator",
                                       "lemma-check"};
  std::string config_path;
  std::int64_t seed = -1;
  int threads = 0;
  std::string out_dir;
  bool assert_mode = false;

  for (const char* name : kExperiments) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "root seed override");
    sub->add_option("--threads", threads, "worker thread override");
    sub->add_option("--out", out_dir, "output directory override");
    sub->add_flag("--assert", assert_mode, "turn result checks into the exit code");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string chosen = app.get_subcommands().front()->get_name();
  return run_experiment(chosen, config_path, seed, threads, out_dir, assert_mode);
}
