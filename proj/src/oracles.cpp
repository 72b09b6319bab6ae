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

#include "bandloc/oracles.hpp"

#include <cmath>

namespace bandloc::oracles {

MwCheck mw_lower_bound_check(const moments::DiscreteDistribution& dist, double alpha, double a,
                             double beta, double epsilon) {
  dist.validate();
  if (!(alpha > 0.0) || !(alpha < a)) throw DomainError("mw_check: need 0 < alpha < a");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) throw DomainError("mw_check: epsilon in (0, 1)");
  if (!(beta > 0.0)) throw DomainError("mw_check: beta must be positive");

  double p_small = 0.0, p_up = 0.0, p_down = 0.0, second = 0.0;
  for (std::size_t i = 0; i < dist.values.size(); ++i) {
    const double x = dist.values[i];
    const double w = dist.weights[i];
    if (std::abs(x) <= alpha) p_small += w;
    if (x >= a) p_up += w;
    if (x <= -a) p_down += w;
    second += w * x * x;
  }

  MwCheck check;
  check.lhs = p_small;
  check.rhs = beta * std::sqrt(p_up * p_down) + epsilon;
  check.hypothesis_holds = check.lhs <= check.rhs;
  check.bound = (1.0 - epsilon) / (1.0 + 0.5 * beta) * alpha * alpha;
  check.second_moment = second;
  check.passes = !check.hypothesis_holds || second >= check.bound - 1e-15;
  return check;
}

RealMatrix finite_diff_jacobian(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                                const shift::ShiftContext& ctx, double step) {
  if (!(step > 0.0)) throw DomainError("finite_diff_jacobian: step must be positive");
  const int w = static_cast<int>(a.rows());
  const int dim = 2 * w * w;
  RealMatrix jac(dim, dim);
  const RealVector base = realify(a);
  for (int k = 0; k < dim; ++k) {
    RealVector fwd = base, bwd = base;
    fwd(k) += step;
    bwd(k) -= step;
    const RealVector plus = realify(shift::eta(unrealify(fwd, w), g, gtilde, ctx));
    const RealVector minus = realify(shift::eta(unrealify(bwd, w), g, gtilde, ctx));
    jac.col(k) = (plus - minus) / (2.0 * step);
  }
  return jac;
}

TailEstimate tail_probability(const std::function<Matrix(RngStream&)>& draw,
                              const std::function<bool(const Matrix&)>& event,
                              std::int64_t n_samples, const RngFactory& rng,
                              std::uint64_t salt, int threads, const std::string& label) {
  if (n_samples < 1000) throw DomainError("tail_probability: need at least 1e3 samples");
  struct HitCount {
    std::int64_t hits = 0;
    void merge(const HitCount& o) { hits += o.hits; }
  };
  auto acc = parallel_reduce<HitCount>(n_samples, threads, [&](std::int64_t i, HitCount& local) {
    RngStream stream = rng.stream(salt, static_cast<std::uint64_t>(i));
    if (event(draw(stream))) ++local.hits;
  });

  TailEstimate est;
  est.event = label;
  est.hits = acc.hits;
  est.n_samples = n_samples;
  est.probability = static_cast<double>(acc.hits) / static_cast<double>(n_samples);
  est.interval = wilson_interval(acc.hits, n_samples);
  return est;
}

std::vector<TailEstimate> tail_curve(const std::function<Matrix(RngStream&)>& draw,
                                     const std::function<double(const Matrix&)>& statistic,
                                     const std::vector<double>& thresholds,
                                     std::int64_t n_samples, const RngFactory& rng,
                                     std::uint64_t salt, int threads) {
  if (n_samples < 1000) throw DomainError("tail_curve: need at least 1e3 samples");
  struct Hits {
    std::vector<std::int64_t> hits;
    void merge(const Hits& o) {
      if (hits.empty()) hits.assign(o.hits.size(), 0);
      for (std::size_t k = 0; k < o.hits.size(); ++k) hits[k] += o.hits[k];
    }
  };
  auto acc = parallel_reduce<Hits>(n_samples, threads, [&](std::int64_t i, Hits& local) {
    if (local.hits.empty()) local.hits.assign(thresholds.size(), 0);
    RngStream stream = rng.stream(salt, static_cast<std::uint64_t>(i));
    const double value = statistic(draw(stream));
    for (std::size_t k = 0; k < thresholds.size(); ++k)
      if (value > thresholds[k]) ++local.hits[k];
  });
  if (acc.hits.empty()) acc.hits.assign(thresholds.size(), 0);

  std::vector<TailEstimate> out;
  out.reserve(thresholds.size());
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    TailEstimate est;
    est.event = "statistic > " + std::to_string(thresholds[k]);
    est.hits = acc.hits[k];
    est.n_samples = n_samples;
    est.probability = static_cast<double>(est.hits) / static_cast<double>(n_samples);
    est.interval = wilson_interval(est.hits, n_samples);
    out.push_back(est);
  }
  return out;
}

std::vector<CovCheck> change_of_variables_check(const ensembles::ModelParams& params,
                                                double delta, double cutoff_k,
                                                std::int64_t n_samples, const RngFactory& rng,
                                                std::uint64_t salt, int threads) {
  struct NamedFn {
    const char* name;
    double (*fn)(const std::vector<Matrix>&);
  };
  // Bounded test functions of the hopping blocks.
  static const NamedFn kFunctions[] = {
      {"tanh_re_trace",
       [](const std::vector<Matrix>& t) {
         double acc = 0.0;
         for (const Matrix& m : t) acc += m.trace().real();
         return std::tanh(acc);
       }},
      {"gauss_hs",
       [](const std::vector<Matrix>& t) {
         double acc = 0.0;
         for (const Matrix& m : t) acc += hs_norm_sq(m);
         return std::exp(-acc / static_cast<double>(t[0].rows()));
       }},
      {"cauchy_hs",
       [](const std::vector<Matrix>& t) {
         double acc = 0.0;
         for (const Matrix& m : t) acc += hs_norm_sq(m);
         return 1.0 / (1.0 + acc);
       }},
  };
  constexpr int kNumFunctions = 3;

  shift::ShiftContext ctx;
  ctx.delta = delta;
  ctx.sign = +1;
  ctx.cutoff.k = cutoff_k;
  ctx.z = params.z;

  struct Acc {
    OnlineMoments diffs[kNumFunctions];
    std::int64_t excluded = 0;
    void merge(const Acc& o) {
      for (int f = 0; f < kNumFunctions; ++f) diffs[f].merge(o.diffs[f]);
      excluded += o.excluded;
    }
  };
  const int w = params.w;
  auto acc = parallel_reduce<Acc>(n_samples, threads, [&](std::int64_t i, Acc& local) {
    RngStream stream = rng.stream(salt, static_cast<std::uint64_t>(i));
    try {
      const ensembles::BlockHamiltonian h = ensembles::sample_hamiltonian(params, stream);
      const greens::GammaChain chain = greens::gamma_chain(h, params.z);
      std::vector<Matrix> shifted(h.t.size());
      double jacobian = 1.0;
      for (std::size_t j = 0; j < h.t.size(); ++j) {
        const Matrix& g = chain.gammas[j + 1];
        const Matrix& gtilde = chain.inverses[j];
        shifted[j] = shift::eta(h.t[j], g, gtilde, ctx);
        const Matrix q = shift::q_vector(h.t[j], g, gtilde, ctx.z, w, ctx.cutoff);
        const double phi = shift::phi_exponent(h.t[j], g, gtilde, ctx);
        const double p = hs_inner_re(q, h.t[j]);
        jacobian *= std::exp(2.0 * w * w * ctx.delta * phi) * std::abs(1.0 + ctx.delta * p);
      }
      const double delta_energy = shift::energy_functional(chain, shifted, params.z) -
                                  shift::energy_functional(chain, h.t, params.z);
      const double weight = jacobian * std::exp(-w * delta_energy);
      for (int f = 0; f < kNumFunctions; ++f) {
        const double lhs = kFunctions[f].fn(h.t);
        const double rhs = kFunctions[f].fn(shifted) * weight;
        local.diffs[f].add(rhs - lhs);
      }
    } catch (const ExactlySingular&) {
      ++local.excluded;
    }
  });

  std::vector<CovCheck> out;
  for (int f = 0; f < kNumFunctions; ++f) {
    CovCheck check;
    check.name = kFunctions[f].name;
    check.mean_diff = acc.diffs[f].mean();
    check.stderr_diff = acc.diffs[f].stderr_mean();
    check.n_samples = acc.diffs[f].count;
    check.n_excluded = acc.excluded;
    out.push_back(check);
  }
  return out;
}

PigeonholeResult pigeonhole_check(const std::vector<std::vector<bool>>& flags) {
  if (flags.size() != 4) throw DomainError("pigeonhole_check: need exactly 4 flag vectors");
  const std::size_t m = flags[0].size();
  for (const auto& f : flags)
    if (f.size() != m) throw DomainError("pigeonhole_check: flag length mismatch");

  PigeonholeResult result;
  int total = 0;
  for (const auto& f : flags)
    for (bool b : f) total += b ? 1 : 0;
  for (std::size_t j = 0; j < m; ++j) {
    if (flags[0][j] && flags[1][j] && flags[2][j] && flags[3][j]) ++result.count;
  }
  result.prediction = total - 3 * static_cast<int>(m);
  result.holds = result.count >= result.prediction;
  return result;
}

}  // namespace bandloc::oracles
