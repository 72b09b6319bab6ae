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
#include <random>

#include "bandloc/types.hpp"

namespace bandloc {

// Counter-split random stream: every (root seed, salt, index) triple yields
// an independent deterministic generator, so Monte Carlo loops can hand out
// stream(k) to sample k and stay order- and thread-count-independent.
class RngStream {
 public:
  RngStream(std::uint64_t root_seed, std::uint64_t salt, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(root_seed),
                      static_cast<std::uint32_t>(root_seed >> 32),
                      static_cast<std::uint32_t>(salt),
                      static_cast<std::uint32_t>(salt >> 32),
                      static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    engine_.seed(seq);
  }

  double normal() { return normal_(engine_); }

  double normal(double stddev) { return stddev * normal_(engine_); }

  Complex complex_normal(double component_stddev) {
    const double re = normal_(engine_);
    const double im = normal_(engine_);
    return Complex(component_stddev * re, component_stddev * im);
  }

  double uniform() { return uniform_(engine_); }

  // Uniform draw from [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform_(engine_); }

  std::uint64_t next_u64() { return engine_(); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Factory bound to one root seed; call sites pick distinct salts so that
// independent estimators never share streams.
class RngFactory {
 public:
  explicit RngFactory(std::uint64_t root_seed) : root_(root_seed) {}

  RngStream stream(std::uint64_t salt, std::uint64_t index) const {
    return RngStream(root_, salt, index);
  }

  std::uint64_t root() const { return root_; }

 private:
  std::uint64_t root_;
};

}  // namespace bandloc
