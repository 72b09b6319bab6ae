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

#include <json.hpp>

#include <string>
#include <vector>

#include "bandloc/config.hpp"

namespace bandloc::cli {

inline constexpr const char* kVersion = "0.1.0";

struct RunReport {
  nlohmann::json document;
  bool assertions_passed = true;
  std::vector<std::string> assertion_failures;
  std::vector<std::string> files_written;
};

// Dispatches the experiment, writes its CSV series and run_report.json under
// config.out_dir, and returns the report. CSV bytes depend only on (config,
// seed), never on the thread count.
RunReport run(const ExperimentConfig& config);

}  // namespace bandloc::cli
