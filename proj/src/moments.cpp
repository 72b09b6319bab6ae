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

#include "bandloc/moments.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "bandloc/greens.hpp"
#include "bandloc/stats.hpp"

namespace bandloc::moments {

void MomentSeries::validate() const {
  for (std::size_t i = 1; i < estimates.size(); ++i)
    if (estimates[i].distance <= estimates[i - 1].distance)
      throw DomainError("moment series: distances must be strictly increasing");
}

namespace {

struct MomentAccumulator {
  OnlineMoments values;
  std::int64_t excluded = 0;

  void merge(const MomentAccumulator& other) {
    values.merge(other.values);
    excluded += other.excluded;
  }
};

MomentEstimate finish(MomentAccumulator acc, double s, int distance) {
  MomentEstimate est;
  est.s = s;
  est.distance = distance;
  est.mean = acc.values.mean();
  est.stderr_mean = acc.values.stderr_mean();
  est.n_samples = acc.values.count;
  est.n_excluded = acc.excluded;
  return est;
}

}  // namespace

MomentEstimate fractional_moment(const ModelParams& params, double s, int x, int y,
                                 std::int64_t n_samples, const RngFactory& rng,
                                 std::uint64_t salt, int threads) {
  if (!(s > 0.0) || !(s < 1.0)) throw DomainError("fractional_moment: s must be in (0, 1)");
  if (x < 1 || y < x || y > params.n)
    throw DomainError("fractional_moment: need 1 <= x <= y <= n");
  const bool corner = (x == 1 && y == params.n);

  auto acc = parallel_reduce<MomentAccumulator>(
      n_samples, threads, [&](std::int64_t i, MomentAccumulator& local) {
        RngStream stream = rng.stream(salt, static_cast<std::uint64_t>(i));
        try {
          const BlockHamiltonian h = ensembles::sample_hamiltonian(params, stream);
          double value;
          if (corner) {
            value = std::exp(s * greens::corner_green(h, params.z).log_operator_norm());
          } else {
            value = std::pow(operator_norm(greens::dense_green_block(h, params.z, x, y)), s);
          }
          local.values.add(value);
        } catch (const ExactlySingular&) {
          ++local.excluded;
        }
      });
  return finish(std::move(acc), s, y - x);
}

std::vector<MomentEstimate> apriori_envelope(int w, double z, double s,
                                             const std::vector<int>& n_list,
                                             std::int64_t n_samples, const RngFactory& rng,
                                             std::uint64_t salt, int threads) {
  std::vector<MomentEstimate> estimates;
  estimates.reserve(n_list.size());
  for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
    ModelParams params;
    params.n = n_list[idx];
    params.w = w;
    params.z = z;
    MomentEstimate est = fractional_moment(params, s, 1, params.n, n_samples, rng,
                                           salt * 1000003u + idx, threads);
    est.distance = n_list[idx];  // envelope is indexed by chain length
    estimates.push_back(est);
  }
  return estimates;
}

DecayFit fit_localization_length(const MomentSeries& series) {
  series.validate();
  if (series.estimates.size() < 4)
    throw DomainError("fit_localization_length: need at least 4 distances");

  std::vector<double> x, y, w;
  for (const MomentEstimate& est : series.estimates) {
    if (!(est.mean > 0.0))
      throw DomainError("fit_localization_length: all means must be positive");
    x.push_back(static_cast<double>(est.distance));
    y.push_back(std::log(est.mean));
    // Delta method: var(log m) = (stderr / m)^2.
    const double rel = est.stderr_mean / est.mean;
    w.push_back(rel > 0.0 ? 1.0 / (rel * rel) : -1.0);
  }
  const LineFit line = weighted_line_fit(x, y, w);
  if (line.slope >= 0.0)
    throw NonDecaying("fit_localization_length: fitted slope " + std::to_string(line.slope) +
                      " is not negative");
  DecayFit fit;
  fit.mu = -line.slope;
  fit.xi = 1.0 / fit.mu;
  fit.intercept = line.intercept;
  fit.r_squared = line.r_squared;
  fit.mu_stderr = line.slope_stderr;
  fit.xi_stderr = line.slope_stderr / (fit.mu * fit.mu);
  return fit;
}

double f_weight(double r, double s, double q) {
  if (!(r > 0.0) || !(r < s) || !(s < 1.0))
    throw DomainError("f_weight: need 0 < r < s < 1");
  if (!(q > 0.0) || !(q < s)) throw DomainError("f_weight: need q in (0, s)");
  return std::min(r, q) * (s - std::max(r, q)) / s;
}

TiltedStats tilted_stats(const std::vector<double>& samples, double q) {
  if (samples.empty()) throw DomainError("tilted_stats: empty sample list");
  const double x_max = *std::max_element(samples.begin(), samples.end());
  double sum_w = 0.0, sum_w2 = 0.0, sum_wx = 0.0;
  for (double x : samples) {
    const double w = std::exp(q * (x - x_max));
    sum_w += w;
    sum_w2 += w * w;
    sum_wx += w * x;
  }
  TiltedStats out;
  out.effective_sample_size = sum_w * sum_w / sum_w2;
  if (out.effective_sample_size < 10.0)
    throw DegenerateWeights("tilted_stats: effective sample size " +
                            std::to_string(out.effective_sample_size) + " < 10");
  out.mean = sum_wx / sum_w;
  double sum_wdev = 0.0;
  for (double x : samples) {
    const double w = std::exp(q * (x - x_max));
    sum_wdev += w * (x - out.mean) * (x - out.mean);
  }
  out.variance = sum_wdev / sum_w;
  return out;
}

void DiscreteDistribution::validate() const {
  if (values.empty() || values.size() != weights.size())
    throw DomainError("distribution: values/weights mismatch");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0)) throw DomainError("distribution: weights must be positive");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw DomainError("distribution: weights must sum to 1");
}

double DiscreteDistribution::moment(double power) const {
  double m = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) m += weights[i] * std::pow(values[i], power);
  return m;
}

double DiscreteDistribution::tilted_log_variance(double q) const {
  // Weights proportional to w_i y_i^q = w_i e^{q log y_i}, stabilized.
  double log_max = -1e300;
  for (double y : values) log_max = std::max(log_max, q * std::log(y));
  double sum_w = 0.0, sum_wx = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = std::log(values[i]);
    const double w = weights[i] * std::exp(q * x - log_max);
    sum_w += w;
    sum_wx += w * x;
  }
  const double mean = sum_wx / sum_w;
  double sum_dev = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double x = std::log(values[i]);
    const double w = weights[i] * std::exp(q * x - log_max);
    sum_dev += w * (x - mean) * (x - mean);
  }
  return sum_dev / sum_w;
}

IdentityCheck log_variance_identity_check(const DiscreteDistribution& dist, double r, double s,
                                          double quad_tolerance) {
  dist.validate();
  if (!(r > 0.0) || !(r < s) || !(s < 1.0))
    throw DomainError("log_variance_identity_check: need 0 < r < s < 1");
  for (double y : dist.values)
    if (!(y > 0.0)) throw DomainError("log_variance_identity_check: values must be positive");

  auto integrand = [&](double q) { return f_weight(r, s, q) * dist.tilted_log_variance(q); };
  using gk = boost::math::quadrature::gauss_kronrod<double, 15>;
  // The weight has a kink at q = r; integrate the two smooth pieces apart.
  const double integral = gk::integrate(integrand, 0.0, r, 12, quad_tolerance) +
                          gk::integrate(integrand, r, s, 12, quad_tolerance);

  IdentityCheck check;
  check.lhs = dist.moment(r);
  check.rhs = std::pow(dist.moment(s), r / s) * std::exp(-integral);
  check.gap = std::abs(check.lhs - check.rhs);
  return check;
}

double eigen_correlator(const BlockHamiltonian& h, int i, int j, int dense_cap) {
  const int size = h.params.n * h.params.w;
  if (size > dense_cap)
    throw CapExceeded("eigen_correlator: nW = " + std::to_string(size) +
                      " exceeds the dense diagonalization cap " + std::to_string(dense_cap));
  if (i < 1 || j < 1 || i > size || j > size)
    throw DomainError("eigen_correlator: site index out of range");

  Eigen::SelfAdjointEigenSolver<Matrix> solver(ensembles::assemble_dense(h));
  if (solver.info() != Eigen::Success)
    throw Error("eigen_correlator: diagonalization failed");
  const Matrix& vectors = solver.eigenvectors();
  double sum = 0.0;
  for (int k = 0; k < size; ++k)
    sum += std::abs(vectors(i - 1, k)) * std::abs(vectors(j - 1, k));
  return sum;
}

}  // namespace bandloc::moments
