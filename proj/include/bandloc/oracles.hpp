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
#include <functional>
#include <string>
#include <vector>

#include "bandloc/moments.hpp"
#include "bandloc/rng.hpp"
#include "bandloc/shift.hpp"
#include "bandloc/stats.hpp"
#include "bandloc/types.hpp"

namespace bandloc::oracles {

struct TailEstimate {
  std::string event;
  double probability = 0.0;
  WilsonInterval interval;
  std::int64_t hits = 0;
  std::int64_t n_samples = 0;
};

struct MwCheck {
  bool hypothesis_holds = false;
  double lhs = 0.0;        // P[|X| <= alpha]
  double rhs = 0.0;        // beta sqrt(P[X >= a] P[X <= -a]) + epsilon
  double bound = 0.0;      // (1 - eps) / (1 + beta/2) * alpha^2
  double second_moment = 0.0;
  bool passes = true;      // conclusion holds whenever the hypothesis does
};

// Exact evaluation of the fluctuation lower bound on a finite distribution:
// if P[|X| <= alpha] <= beta sqrt(P[X >= a] P[X <= -a]) + eps then
// E[X^2] >= (1 - eps) / (1 + beta/2) alpha^2.
MwCheck mw_lower_bound_check(const moments::DiscreteDistribution& dist, double alpha, double a,
                             double beta, double epsilon);

// Central-difference derivative of eta in every realified coordinate
// direction; the independent oracle for eta_derivative. step is absolute.
RealMatrix finite_diff_jacobian(const Matrix& a, const Matrix& g, const Matrix& gtilde,
                                const shift::ShiftContext& ctx, double step);

// Empirical tail frequency with a Wilson 95% interval. draw produces one
// block per stream, event tests it.
TailEstimate tail_probability(const std::function<Matrix(RngStream&)>& draw,
                              const std::function<bool(const Matrix&)>& event,
                              std::int64_t n_samples, const RngFactory& rng,
                              std::uint64_t salt = 0, int threads = 1,
                              const std::string& label = "");

// Tail frequencies of statistic > threshold for several thresholds evaluated
// on one shared sample set, so the estimates are monotone in the threshold by
// construction.
std::vector<TailEstimate> tail_curve(const std::function<Matrix(RngStream&)>& draw,
                                     const std::function<double(const Matrix&)>& statistic,
                                     const std::vector<double>& thresholds,
                                     std::int64_t n_samples, const RngFactory& rng,
                                     std::uint64_t salt = 0, int threads = 1);

struct CovCheck {
  std::string name;
  double mean_diff = 0.0;
  double stderr_diff = 0.0;
  std::int64_t n_samples = 0;
  std::int64_t n_excluded = 0;
};

// Monte Carlo change-of-variables identity for the plus shift: for bounded
// test functions h of the hoppings,
//   E[h(T)] = E[h(eta(T)) J e^{-W (E(Gamma, eta(T)) - E(Gamma, T))}]
// with J the Jacobian determinant of the bond-wise map at fixed Gamma. The
// per-sample difference of the two integrands is averaged, so the check is
// mean_diff consistent with zero.
std::vector<CovCheck> change_of_variables_check(const ensembles::ModelParams& params,
                                                double delta, double cutoff_k,
                                                std::int64_t n_samples, const RngFactory& rng,
                                                std::uint64_t salt = 0, int threads = 1);

struct PigeonholeResult {
  int count = 0;        // indices where all four conditions hold
  int prediction = 0;   // inclusion-exclusion lower bound
  bool holds = false;   // count >= prediction
};

// Counting argument behind the event inclusion: given four per-index flag
// vectors of equal length m, the number of indices satisfying all four is at
// least sum_i #flags_i - 3m.
PigeonholeResult pigeonhole_check(const std::vector<std::vector<bool>>& flags);

}  // namespace bandloc::oracles
