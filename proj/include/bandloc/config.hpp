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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bandloc/ensembles.hpp"

namespace bandloc::cli {

enum class Experiment {
  Decay,
  Apriori,
  JacobianVerify,
  ShiftVerify,
  Events,
  Correlator,
  LemmaCheck,
};

std::string experiment_name(Experiment e);
Experiment experiment_from_name(const std::string& name);

struct ExperimentConfig {
  Experiment experiment = Experiment::Decay;
  ensembles::ModelParams model;

  double s = 0.5;
  double r = 0.25;
  double q = 0.4;

  std::vector<int> distances{8, 16, 32, 64, 128};
  std::vector<int> n_list{16, 32, 64};
  std::vector<std::pair<int, int>> pairs;  // correlator site pairs

  std::int64_t n_samples = 10000;
  int trials = 100;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: resolve from BANDLOC_THREADS or hardware

  double cutoff_k = 4.0;
  double phi_fraction = 1.0 / 12.0;
  int sharp = 3;
  double delta = 0.0;  // 0: derived where needed
  double c_norm = 3.0;
  double k_event = 16.0;
  int dense_cap = 4096;

  std::string out_dir = "out";
  bool assert_mode = false;

  // Hard validation of cross-field constraints; returns soft warnings.
  std::vector<std::string> validate() const;
};

// Strict parse of a flat JSON config document: unknown keys, duplicate keys
// and type mismatches are ConfigError with the offending key named. Defaults
// are filled in and echoed by the runner. The experiment selected on the
// command line must match the optional "experiment" key.
ExperimentConfig parse_config(const std::string& text, Experiment experiment);

// Resolved thread count: explicit > 0 wins, else BANDLOC_THREADS, else
// hardware concurrency.
int resolve_threads(int requested);

}  // namespace bandloc::cli
