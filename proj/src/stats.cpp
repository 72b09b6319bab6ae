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

#include "bandloc/stats.hpp"

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "bandloc/types.hpp"

namespace bandloc {

WilsonInterval wilson_interval(std::int64_t hits, std::int64_t trials, double z) {
  WilsonInterval iv;
  if (trials <= 0) return iv;
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(hits) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  iv.lower = std::max(0.0, center - half);
  iv.upper = std::min(1.0, center + half);
  return iv;
}

LineFit weighted_line_fit(const std::vector<double>& x, const std::vector<double>& y,
                          const std::vector<double>& w) {
  if (x.size() != y.size() || (x.size() != w.size() && !w.empty()) || x.size() < 2)
    throw DomainError("weighted_line_fit: need >= 2 points with matching weights");

  std::vector<double> weights = w;
  bool usable = !weights.empty();
  for (double wi : weights)
    if (!(wi > 0.0) || !std::isfinite(wi)) usable = false;
  if (!usable) weights.assign(x.size(), 1.0);

  double sw = 0.0, swx = 0.0, swy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += weights[i];
    swx += weights[i] * x[i];
    swy += weights[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += weights[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += weights[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (!(sxx > 0.0)) throw DomainError("weighted_line_fit: degenerate abscissae");

  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  // With weights = 1/var(y_i), var(slope) = 1/sxx.
  fit.slope_stderr = std::sqrt(1.0 / sxx);

  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double fit_i = fit.intercept + fit.slope * x[i];
    ss_res += weights[i] * (y[i] - fit_i) * (y[i] - fit_i);
    ss_tot += weights[i] * (y[i] - ybar) * (y[i] - ybar);
  }
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

void parallel_for(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
  if (n <= 0) return;
  const int workers =
      static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(threads, n)));
  if (workers == 1) {
    for (std::int64_t i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int t = 0; t < workers; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace bandloc
