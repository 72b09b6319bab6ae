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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace bandloc {

// Mergeable (count, sum, sum of squares) accumulator. Merging is associative,
// which is what makes block-parallel Monte Carlo reductions reproducible.
struct OnlineMoments {
  std::int64_t count = 0;
  double sum = 0.0;
  double sum_sq = 0.0;

  void add(double x) {
    ++count;
    sum += x;
    sum_sq += x * x;
  }

  void merge(const OnlineMoments& other) {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
  }

  double mean() const { return count > 0 ? sum / static_cast<double>(count) : 0.0; }

  // Population variance of the accumulated values.
  double variance() const {
    if (count <= 0) return 0.0;
    const double m = mean();
    const double v = sum_sq / static_cast<double>(count) - m * m;
    return v > 0.0 ? v : 0.0;
  }

  // Standard error of the mean.
  double stderr_mean() const {
    if (count <= 1) return 0.0;
    const double n = static_cast<double>(count);
    const double sample_var = variance() * n / (n - 1.0);
    return std::sqrt(sample_var / n);
  }
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 1.0;
};

// Wilson score interval for a binomial proportion. Preferred over the normal
// approximation because tail events here often have zero or near-zero counts.
WilsonInterval wilson_interval(std::int64_t hits, std::int64_t trials, double z = 1.96);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r_squared = 0.0;
};

// Weighted least squares fit y ~ intercept + slope * x with weights treated
// as inverse variances. Any non-positive weight disables weighting for the
// whole fit (all points then count equally).
LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w);

// Runs fn(i) for i in [0, n). Work is handed out in fixed-size blocks through
// an atomic counter; any per-block state the caller accumulates must be merged
// in block order afterwards to stay independent of scheduling. Exceptions
// escape to the caller.
void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn);

// Parallel Monte Carlo reduction: produce(i) is evaluated for each sample
// index and folded into per-block accumulators which are merged in index
// order, so the result is bit-identical for any thread count.
template <typename Acc, typename Produce>
Acc parallel_reduce(std::int64_t n, int threads, Produce produce) {
  constexpr std::int64_t kBlock = 256;
  const std::int64_t n_blocks = (n + kBlock - 1) / kBlock;
  std::vector<Acc> partials(static_cast<std::size_t>(n_blocks));
  parallel_for(n_blocks, threads, [&](std::int64_t b) {
    Acc local;
    const std::int64_t lo = b * kBlock;
    const std::int64_t hi = std::min(n, lo + kBlock);
    for (std::int64_t i = lo; i < hi; ++i) produce(i, local);
    partials[static_cast<std::size_t>(b)] = local;
  });
  Acc total;
  for (const Acc& p : partials) total.merge(p);
  return total;
}

}  // namespace bandloc
